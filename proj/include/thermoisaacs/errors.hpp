#pragma once

#include <stdexcept>
#include <string>

namespace thermoisaacs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (input value, initial output) not in the admissible set of the relay.
struct InadmissibleInitialPair : Error {
  using Error::Error;
};

// Hybrid start state violates the sector invariant.
struct InadmissibleInitialState : Error {
  using Error::Error;
};

// dt*M too large relative to the hysteresis band: a single step could tunnel
// past a threshold without being seen.
struct StepTooLarge : Error {
  using Error::Error;
};

// h*M >= band width: switch nodes would not be contained in the opposite
// sector and the cross-sector reads of the discrete operator break down.
struct DiscreteZenoViolation : Error {
  using Error::Error;
};

// Control requested at a node where its foot point leaves the sector.
struct InadmissibleControl : Error {
  using Error::Error;
};

// No control keeps the foot point inside the sector at some node.
struct EmptyAdmissibleSet : Error {
  using Error::Error;
};

// Policy query outside the computational cube.
struct OutsideCube : Error {
  using Error::Error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

// Expression / problem-file syntax or semantic error.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace thermoisaacs
