#pragma once

#include <cstdint>

#include "thermoisaacs/hybrid_dynamics.hpp"
#include "thermoisaacs/isaacs_solver.hpp"

namespace thermoisaacs {

/// Stationary feedback read off a solved value field.
struct FeedbackPolicy {
  const GameProblem* problem = nullptr;
  const SectorGrid* grid = nullptr;
  const ValueField* field = nullptr;
  SolverConfig config;
};

struct ControlChoice {
  int a_index = 0;
  int b_index = 0;
};

/// Multilinear interpolation of the sector field at an off-node state.
double field_value_at(const SectorGrid& g, const ValueField& v, int w, int z,
                      std::span<const double> x, std::span<const double> y);
double interpolated_value(const FeedbackPolicy& policy, const HybridState& s);

/// One-step optimization at an off-node state: foot points are recomputed from
/// s directly, and a foot whose first coordinate leaves the current sector is
/// evaluated in the switched sector (the continuous analog of the scheme's
/// exit rows). Returns the outer optimizer's argument and the inner best
/// response; ties resolve to the first-listed control. Throws OutsideCube /
/// InadmissibleInitialState.
ControlChoice feedback_controls(const FeedbackPolicy& policy,
                                const HybridState& s);

/// Rolls out both players under feedback_controls.
Trajectory closed_loop_rollout(const FeedbackPolicy& policy,
                               const HybridState& s0, double T, double dt);

/// Discounted cost of the feedback rollout. Requires lambda*T >= 35 so the
/// truncation error is below 1e-15 of scale (throws InvalidArgument).
double closed_loop_value(const FeedbackPolicy& policy, const HybridState& s0,
                         double T, double dt);

struct AdversarialOptions {
  int trials = 200;
  double T = -1;   // < 0: 40 / lambda
  double dt = -1;  // < 0: grid h
  int dwell = 5;   // steps each random control value is held
  std::uint64_t seed = 0x6a11ce5eedull;
};

struct AdversarialResult {
  // Freeze the minimizer's feedback, random switched-dwell b: max over trials
  // of cost - interpolated value.
  double gap_adverse_b = 0;
  // Freeze the maximizer's feedback, random a: max of interpolated value - cost.
  double gap_adverse_a = 0;
  double max_gap() const {
    return gap_adverse_b > gap_adverse_a ? gap_adverse_b : gap_adverse_a;
  }
};

/// Throws InvalidArgument when trials < 1.
AdversarialResult adversarial_check(const FeedbackPolicy& policy,
                                    const HybridState& s0,
                                    const AdversarialOptions& opt);

/// 0.05 * (sampled max ell) / lambda, the default verification gap tolerance.
double default_gap_tol(const GameProblem& p);

}  // namespace thermoisaacs
