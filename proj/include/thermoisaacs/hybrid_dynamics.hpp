#pragma once

#include <functional>
#include <span>
#include <vector>

#include "thermoisaacs/problem.hpp"

namespace thermoisaacs {

struct HybridState {
  std::vector<double> x;
  std::vector<double> y;
  int w = -1;
  int z = -1;
};

struct SwitchingEvent {
  enum class Kind { XOnly, YOnly, Simultaneous };
  double time = 0;  // crossing instant, interpolated inside the step
  Kind kind = Kind::XOnly;
  int new_w = -1;
  int new_z = -1;
};

/// Explicit-Euler sample path. states[k] is the state at time k*dt with the
/// modes in effect from step k on; a crossing detected inside step k flips the
/// mode stored at k+1 (left-continuity at step scale). Controls are recorded
/// as indices into the problem's discrete sets.
struct Trajectory {
  double dt = 0;
  std::vector<HybridState> states;
  std::vector<SwitchingEvent> events;
  std::vector<int> alpha_used;
  std::vector<int> beta_used;
  long clamp_count = 0;  // Euler feet clamped back into Q
};

using ControlProvider = std::function<int(int step, const HybridState&)>;

/// Integrates ceil(T/dt) steps from s0 under per-step control providers.
/// Throws InadmissibleInitialState when s0 violates the sector invariant,
/// StepTooLarge when dt*M exceeds half a hysteresis band. The number of
/// recorded events is asserted against zeno_bound. dyn_M < 0 resamples the
/// dynamics bound; callers running many rollouts should pass it in.
Trajectory simulate_with(const GameProblem& p, const HybridState& s0,
                         const ControlProvider& alpha,
                         const ControlProvider& beta, double T, double dt,
                         double dyn_M = -1);

/// Open-loop variant; alpha/beta are control indices, one per step.
Trajectory simulate(const GameProblem& p, const HybridState& s0,
                    std::span<const int> alpha, std::span<const int> beta,
                    double T, double dt, double dyn_M = -1);

/// Left-endpoint quadrature of exp(-lambda t) ell along the trajectory.
double discounted_cost(const GameProblem& p, const Trajectory& traj,
                       std::span<const int> alpha, std::span<const int> beta,
                       double T);
double discounted_cost(const GameProblem& p, const Trajectory& traj, double T);

/// Upper bound on the number of switching events on [0, T]:
/// 2 * (ceil(T * M / min(bands)) + 1) with M the sampled dynamics bound.
int zeno_bound(const GameProblem& p, double T);
int zeno_bound(const GameProblem& p, double T, double dyn_M);

}  // namespace thermoisaacs
