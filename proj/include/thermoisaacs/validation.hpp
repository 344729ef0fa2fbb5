#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thermoisaacs/problem.hpp"

namespace thermoisaacs {

inline constexpr int kDefaultSamplesPerFace = 64;
inline constexpr int kDefaultIsaacsSamples = 4096;
inline constexpr std::uint64_t kValidationSeed = 0x5eedBA5Eu;

/// Per (player, mode) verdict of the switching-controllability check: on the
/// switching boundary of each sector the first dynamics component must take
/// both signs over the control set.
struct ControllabilityResult {
  bool x_mode_minus = false;  // boundary {x1 = rho_hi} of the w=-1 sector
  bool x_mode_plus = false;   // boundary {x1 = rho_lo} of the w=+1 sector
  bool y_mode_minus = false;
  bool y_mode_plus = false;
  std::vector<std::string> failures;
  bool all() const {
    return x_mode_minus && x_mode_plus && y_mode_minus && y_mode_plus;
  }
};

ControllabilityResult validate_controllability(
    const GameProblem& p, int samples_per_face = kDefaultSamplesPerFace,
    std::uint64_t seed = kValidationSeed);

/// Samples each face of the cube and checks the outward dynamics component is
/// nonpositive (tangential motion within 1e-12 counts as non-exiting).
struct InvarianceResult {
  bool ok = false;
  std::vector<std::string> violations;
};

InvarianceResult validate_invariance(const GameProblem& p,
                                     int samples_per_face = kDefaultSamplesPerFace,
                                     std::uint64_t seed = kValidationSeed);

/// Max over sampled (x, y, w, z, p, q) of |minmax - maxmin| of the Hamiltonian
/// -f.p - g.q - ell over the discrete control sets. Zero exactly when the cost
/// decouples (the structural case); positive with a coupled ell_override.
double check_isaacs_condition(const GameProblem& p,
                              int samples = kDefaultIsaacsSamples,
                              std::uint64_t seed = kValidationSeed);

/// Sampled magnitude bounds. Sample sets are nested in `samples`, so every
/// bound is nondecreasing in the sample count.
struct SampledBounds {
  double dyn_f = 0;   // max |f|_2
  double dyn_g = 0;   // max |g|_2
  double dyn_f1 = 0;  // max |f_1|, drives the switching guards
  double dyn_g1 = 0;
  double cost = 0;        // max ell1 + ell2
  double cost_min = 0;    // min ell1 + ell2
  double lipschitz = 0;   // finite-difference estimate in the state variables
  double bound_M() const;  // max(|f|, |g|, ell)
  double dyn_M() const;    // max(|f|, |g|)
};

SampledBounds sample_bounds(const GameProblem& p, int samples = 2048,
                            std::uint64_t seed = kValidationSeed);

struct ValidationReport {
  SampledBounds bounds;
  ControllabilityResult controllability;
  InvarianceResult invariance;
  double isaacs_gap = 0;
  std::vector<std::string> warnings;
  bool hard_ok() const { return controllability.all() && invariance.ok; }
};

ValidationReport validate_problem(const GameProblem& p,
                                  int samples_per_face = kDefaultSamplesPerFace,
                                  int isaacs_samples = kDefaultIsaacsSamples,
                                  std::uint64_t seed = kValidationSeed);

}  // namespace thermoisaacs
