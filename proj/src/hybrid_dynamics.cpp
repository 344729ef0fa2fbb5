#include "thermoisaacs/hybrid_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thermoisaacs/errors.hpp"
#include "thermoisaacs/relay.hpp"
#include "thermoisaacs/util.hpp"
#include "thermoisaacs/validation.hpp"

namespace thermoisaacs {

namespace {

double min_band(const GameProblem& p) {
  return std::min(p.rho.hi - p.rho.lo, p.eta.hi - p.eta.lo);
}

int step_count(double T, double dt) {
  // The small slack keeps T an exact multiple of dt from rounding up.
  return int(std::ceil(T / dt - 1e-12));
}

void check_initial(const GameProblem& p, const HybridState& s0) {
  if (int(s0.x.size()) != p.n || int(s0.y.size()) != p.m)
    throw InadmissibleInitialState("initial state dimensions do not match the problem");
  if ((s0.w != -1 && s0.w != 1) || (s0.z != -1 && s0.z != 1))
    throw InadmissibleInitialState("modes must be -1 or +1");
  if (!relay_pair_admissible(s0.x[0], s0.w, p.rho))
    throw InadmissibleInitialState("(x1, w) = (" + format_double(s0.x[0]) + ", " +
                                   std::to_string(s0.w) + ") is outside the sector");
  if (!relay_pair_admissible(s0.y[0], s0.z, p.eta))
    throw InadmissibleInitialState("(y1, z) = (" + format_double(s0.y[0]) + ", " +
                                   std::to_string(s0.z) + ") is outside the sector");
}

}  // namespace

int zeno_bound(const GameProblem& p, double T, double dyn_M) {
  if (!(T >= 0)) throw InvalidArgument("horizon must be nonnegative");
  if (!(dyn_M >= 0)) throw InvalidArgument("dynamics bound must be nonnegative");
  const double band = min_band(p);
  return 2 * (int(std::ceil(T * dyn_M / band)) + 1);
}

int zeno_bound(const GameProblem& p, double T) {
  return zeno_bound(p, T, sample_bounds(p).dyn_M());
}

Trajectory simulate_with(const GameProblem& p, const HybridState& s0,
                         const ControlProvider& alpha,
                         const ControlProvider& beta, double T, double dt,
                         double dyn_M) {
  if (!(T > 0)) throw InvalidArgument("horizon must be positive");
  if (!(dt > 0)) throw InvalidArgument("dt must be positive");
  check_initial(p, s0);
  if (dyn_M < 0) dyn_M = sample_bounds(p).dyn_M();
  if (dt * dyn_M > 0.5 * min_band(p))
    throw StepTooLarge("dt * M = " + format_double(dt * dyn_M) +
                       " exceeds half the narrowest hysteresis band " +
                       format_double(min_band(p)));

  const int steps = step_count(T, dt);
  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(std::size_t(steps) + 1);
  traj.states.push_back(s0);
  traj.alpha_used.reserve(std::size_t(steps));
  traj.beta_used.reserve(std::size_t(steps));

  std::vector<double> fx(static_cast<std::size_t>(p.n)), gy(static_cast<std::size_t>(p.m));
  for (int k = 0; k < steps; ++k) {
    const HybridState& cur = traj.states.back();
    const int ai = alpha(k, cur);
    const int bi = beta(k, cur);
    if (ai < 0 || ai >= int(p.controls_a.size()) || bi < 0 ||
        bi >= int(p.controls_b.size()))
      throw InadmissibleControl("control index out of range at step " +
                                std::to_string(k));
    traj.alpha_used.push_back(ai);
    traj.beta_used.push_back(bi);

    p.f(cur.x, cur.w, p.controls_a[std::size_t(ai)], fx);
    p.g(cur.y, cur.z, p.controls_b[std::size_t(bi)], gy);

    HybridState nxt = cur;
    for (int i = 0; i < p.n; ++i) {
      double v = cur.x[std::size_t(i)] + dt * fx[std::size_t(i)];
      const double lo = p.qx[std::size_t(i)][0], hi = p.qx[std::size_t(i)][1];
      if (v < lo) {
        v = lo;
        ++traj.clamp_count;
      } else if (v > hi) {
        v = hi;
        ++traj.clamp_count;
      }
      nxt.x[std::size_t(i)] = v;
    }
    for (int j = 0; j < p.m; ++j) {
      double v = cur.y[std::size_t(j)] + dt * gy[std::size_t(j)];
      const double lo = p.qy[std::size_t(j)][0], hi = p.qy[std::size_t(j)][1];
      if (v < lo) {
        v = lo;
        ++traj.clamp_count;
      } else if (v > hi) {
        v = hi;
        ++traj.clamp_count;
      }
      nxt.y[std::size_t(j)] = v;
    }

    const auto xc = relay_segment_crossing(cur.w, cur.x[0], nxt.x[0], p.rho);
    const auto yc = relay_segment_crossing(cur.z, cur.y[0], nxt.y[0], p.eta);
    if (xc) nxt.w = -cur.w;
    if (yc) nxt.z = -cur.z;
    if (xc && yc) {
      const double tx = (double(k) + *xc) * dt;
      const double ty = (double(k) + *yc) * dt;
      if (*xc == *yc) {
        traj.events.push_back(
            {tx, SwitchingEvent::Kind::Simultaneous, nxt.w, nxt.z});
      } else if (*xc < *yc) {
        traj.events.push_back({tx, SwitchingEvent::Kind::XOnly, nxt.w, cur.z});
        traj.events.push_back({ty, SwitchingEvent::Kind::YOnly, nxt.w, nxt.z});
      } else {
        traj.events.push_back({ty, SwitchingEvent::Kind::YOnly, cur.w, nxt.z});
        traj.events.push_back({tx, SwitchingEvent::Kind::XOnly, nxt.w, nxt.z});
      }
    } else if (xc) {
      traj.events.push_back(
          {(double(k) + *xc) * dt, SwitchingEvent::Kind::XOnly, nxt.w, cur.z});
    } else if (yc) {
      traj.events.push_back(
          {(double(k) + *yc) * dt, SwitchingEvent::Kind::YOnly, cur.w, nxt.z});
    }
    traj.states.push_back(std::move(nxt));
  }

  // Unreachable when the step guard holds; kept as a hard invariant.
  if (int(traj.events.size()) > zeno_bound(p, double(steps) * dt, dyn_M))
    throw Error("internal: switching events exceed the Zeno bound");
  return traj;
}

Trajectory simulate(const GameProblem& p, const HybridState& s0,
                    std::span<const int> alpha, std::span<const int> beta,
                    double T, double dt, double dyn_M) {
  if (!(T > 0) || !(dt > 0))
    throw InvalidArgument("horizon and dt must be positive");
  const int steps = step_count(T, dt);
  if (int(alpha.size()) < steps || int(beta.size()) < steps)
    throw InvalidArgument("control sequences shorter than the step count " +
                          std::to_string(steps));
  return simulate_with(
      p, s0, [&](int k, const HybridState&) { return alpha[std::size_t(k)]; },
      [&](int k, const HybridState&) { return beta[std::size_t(k)]; }, T, dt,
      dyn_M);
}

double discounted_cost(const GameProblem& p, const Trajectory& traj,
                       std::span<const int> alpha, std::span<const int> beta,
                       double T) {
  if (!(traj.dt > 0)) throw InvalidArgument("trajectory has no step size");
  const int steps = std::min(int(traj.states.size()) - 1,
                             step_count(T, traj.dt));
  if (int(alpha.size()) < steps || int(beta.size()) < steps)
    throw InvalidArgument("control sequences shorter than the quadrature range");
  double acc = 0;
  for (int k = 0; k < steps; ++k) {
    const HybridState& s = traj.states[std::size_t(k)];
    const auto& a = p.controls_a[std::size_t(alpha[std::size_t(k)])];
    const auto& b = p.controls_b[std::size_t(beta[std::size_t(k)])];
    acc += std::exp(-p.lambda * double(k) * traj.dt) *
           p.ell_total(s.x, s.y, s.w, s.z, a, b) * traj.dt;
  }
  return acc;
}

double discounted_cost(const GameProblem& p, const Trajectory& traj, double T) {
  return discounted_cost(p, traj, traj.alpha_used, traj.beta_used, T);
}

}  // namespace thermoisaacs
