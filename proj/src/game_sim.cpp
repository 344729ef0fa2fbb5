#include "thermoisaacs/game_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "thermoisaacs/errors.hpp"
#include "thermoisaacs/util.hpp"
#include "thermoisaacs/validation.hpp"

namespace thermoisaacs {

namespace {

void check_policy(const FeedbackPolicy& policy) {
  if (!policy.problem || !policy.grid || !policy.field)
    throw InvalidArgument("feedback policy is missing problem, grid or field");
}

double tensor_read(const ValueField& v, int w, int z, const InterpWeights& wx,
                   const InterpWeights& wy) {
  double acc = 0;
  for (std::size_t e = 0; e < wx.ids.size(); ++e) {
    double racc = 0;
    for (std::size_t q = 0; q < wy.ids.size(); ++q)
      racc += wy.co[q] * v.at(w, z, wx.ids[e], wy.ids[q]);
    acc += wx.co[e] * racc;
  }
  return acc;
}

double discount_factor(const GameProblem& p, const SectorGrid& g,
                       const SolverConfig& cfg) {
  if (cfg.discount_form == DiscountForm::OneMinusLambdaH) {
    if (p.lambda * g.h() >= 1.0)
      throw InvalidArgument("lambda * h must stay below 1 for the 1 - lambda*h discount");
    return 1.0 - p.lambda * g.h();
  }
  return std::exp(-p.lambda * g.h());
}

void check_state(const GameProblem& p, const HybridState& s) {
  if (int(s.x.size()) != p.n || int(s.y.size()) != p.m)
    throw InadmissibleInitialState("state dimensions do not match the problem");
  if ((s.w != -1 && s.w != 1) || (s.z != -1 && s.z != 1))
    throw InadmissibleInitialState("modes must be -1 or +1");
  if (!relay_pair_admissible(s.x[0], s.w, p.rho) ||
      !relay_pair_admissible(s.y[0], s.z, p.eta))
    throw InadmissibleInitialState("state is outside its sector");
  for (int i = 0; i < p.n; ++i)
    if (s.x[std::size_t(i)] < p.qx[std::size_t(i)][0] ||
        s.x[std::size_t(i)] > p.qx[std::size_t(i)][1])
      throw OutsideCube("x" + std::to_string(i + 1) + " = " +
                        format_double(s.x[std::size_t(i)]) + " left the cube");
  for (int j = 0; j < p.m; ++j)
    if (s.y[std::size_t(j)] < p.qy[std::size_t(j)][0] ||
        s.y[std::size_t(j)] > p.qy[std::size_t(j)][1])
      throw OutsideCube("y" + std::to_string(j + 1) + " = " +
                        format_double(s.y[std::size_t(j)]) + " left the cube");
}

}  // namespace

double field_value_at(const SectorGrid& g, const ValueField& v, int w, int z,
                      std::span<const double> x, std::span<const double> y) {
  const InterpWeights wx =
      multilinear_weights(g.axes_x(), g.x_axis0_begin(w), g.x_axis0_end(w), x);
  const InterpWeights wy =
      multilinear_weights(g.axes_y(), g.y_axis0_begin(z), g.y_axis0_end(z), y);
  return tensor_read(v, w, z, wx, wy);
}

double interpolated_value(const FeedbackPolicy& policy, const HybridState& s) {
  check_policy(policy);
  return field_value_at(*policy.grid, *policy.field, s.w, s.z, s.x, s.y);
}

ControlChoice feedback_controls(const FeedbackPolicy& policy,
                                const HybridState& s) {
  check_policy(policy);
  const GameProblem& p = *policy.problem;
  const SectorGrid& g = *policy.grid;
  const ValueField& v = *policy.field;
  check_state(p, s);

  const double h = g.h();
  const double d = discount_factor(p, g, policy.config);
  const int na = int(p.controls_a.size());
  const int nb = int(p.controls_b.size());

  // Foot points per control, each evaluated in the sector its first
  // coordinate lands in; a foot that bypasses the threshold switches sectors.
  struct Side {
    int mode;
    InterpWeights wts;
  };
  std::vector<Side> ax(static_cast<std::size_t>(na)), by(static_cast<std::size_t>(nb));
  std::vector<double> foot(static_cast<std::size_t>(std::max(p.n, p.m)));
  std::vector<double> vel(static_cast<std::size_t>(std::max(p.n, p.m)));
  for (int a = 0; a < na; ++a) {
    p.f(s.x, s.w, p.controls_a[std::size_t(a)], std::span<double>(vel.data(), std::size_t(p.n)));
    for (int i = 0; i < p.n; ++i)
      foot[std::size_t(i)] = s.x[std::size_t(i)] + h * vel[std::size_t(i)];
    const bool stays = s.w > 0 ? foot[0] >= p.rho.lo : foot[0] <= p.rho.hi;
    const int we = stays ? s.w : -s.w;
    ax[std::size_t(a)].mode = we;
    ax[std::size_t(a)].wts = multilinear_weights(
        g.axes_x(), g.x_axis0_begin(we), g.x_axis0_end(we),
        std::span<const double>(foot.data(), std::size_t(p.n)));
  }
  for (int b = 0; b < nb; ++b) {
    p.g(s.y, s.z, p.controls_b[std::size_t(b)], std::span<double>(vel.data(), std::size_t(p.m)));
    for (int j = 0; j < p.m; ++j)
      foot[std::size_t(j)] = s.y[std::size_t(j)] + h * vel[std::size_t(j)];
    const bool stays = s.z > 0 ? foot[0] >= p.eta.lo : foot[0] <= p.eta.hi;
    const int ze = stays ? s.z : -s.z;
    by[std::size_t(b)].mode = ze;
    by[std::size_t(b)].wts = multilinear_weights(
        g.axes_y(), g.y_axis0_begin(ze), g.y_axis0_end(ze),
        std::span<const double>(foot.data(), std::size_t(p.m)));
  }

  auto value = [&](int a, int b) {
    const Side& sa = ax[std::size_t(a)];
    const Side& sb = by[std::size_t(b)];
    return d * tensor_read(v, sa.mode, sb.mode, sa.wts, sb.wts) +
           h * p.ell_total(s.x, s.y, s.w, s.z, p.controls_a[std::size_t(a)],
                           p.controls_b[std::size_t(b)]);
  };

  ControlChoice choice;
  if (policy.config.value_kind == ValueKind::Lower) {
    double best_outer = -std::numeric_limits<double>::infinity();
    int best_b = 0, best_a = 0;
    for (int b = 0; b < nb; ++b) {
      double inner = std::numeric_limits<double>::infinity();
      int arg_a = 0;
      for (int a = 0; a < na; ++a) {
        const double val = value(a, b);
        if (val < inner) {
          inner = val;
          arg_a = a;
        }
      }
      if (inner > best_outer) {
        best_outer = inner;
        best_b = b;
        best_a = arg_a;
      }
    }
    choice.a_index = best_a;
    choice.b_index = best_b;
  } else {
    double best_outer = std::numeric_limits<double>::infinity();
    int best_a = 0, best_b = 0;
    for (int a = 0; a < na; ++a) {
      double inner = -std::numeric_limits<double>::infinity();
      int arg_b = 0;
      for (int b = 0; b < nb; ++b) {
        const double val = value(a, b);
        if (val > inner) {
          inner = val;
          arg_b = b;
        }
      }
      if (inner < best_outer) {
        best_outer = inner;
        best_a = a;
        best_b = arg_b;
      }
    }
    choice.a_index = best_a;
    choice.b_index = best_b;
  }
  return choice;
}

Trajectory closed_loop_rollout(const FeedbackPolicy& policy,
                               const HybridState& s0, double T, double dt) {
  check_policy(policy);
  const GameProblem& p = *policy.problem;
  const double dyn_M = sample_bounds(p).dyn_M();
  // Both providers see the same step; reuse one optimization per step.
  struct Cache {
    int step = -1;
    ControlChoice ch;
  };
  auto cache = std::make_shared<Cache>();
  auto get = [&policy, cache](int k, const HybridState& s) {
    if (cache->step != k) {
      cache->ch = feedback_controls(policy, s);
      cache->step = k;
    }
    return cache->ch;
  };
  return simulate_with(
      p, s0, [get](int k, const HybridState& s) { return get(k, s).a_index; },
      [get](int k, const HybridState& s) { return get(k, s).b_index; }, T, dt,
      dyn_M);
}

double closed_loop_value(const FeedbackPolicy& policy, const HybridState& s0,
                         double T, double dt) {
  check_policy(policy);
  const GameProblem& p = *policy.problem;
  if (!(p.lambda * T >= 35.0))
    throw InvalidArgument("horizon too short: lambda * T = " +
                          format_double(p.lambda * T) +
                          " leaves a visible truncation tail (need >= 35)");
  const Trajectory traj = closed_loop_rollout(policy, s0, T, dt);
  return discounted_cost(p, traj, T);
}

double default_gap_tol(const GameProblem& p) {
  return 0.05 * sample_bounds(p).cost / p.lambda;
}

AdversarialResult adversarial_check(const FeedbackPolicy& policy,
                                    const HybridState& s0,
                                    const AdversarialOptions& opt) {
  check_policy(policy);
  if (opt.trials < 1) throw InvalidArgument("adversarial check needs at least one trial");
  const GameProblem& p = *policy.problem;
  const SectorGrid& g = *policy.grid;
  const SampledBounds bounds = sample_bounds(p);
  const double dyn_M = bounds.dyn_M();
  const double T = opt.T > 0 ? opt.T : 40.0 / p.lambda;
  const double band = std::min(p.rho.hi - p.rho.lo, p.eta.hi - p.eta.lo);
  double dt = opt.dt > 0 ? opt.dt : g.h();
  if (opt.dt <= 0 && dyn_M > 0) dt = std::min(dt, 0.45 * band / dyn_M);
  const int dwell = std::max(1, opt.dwell);

  const double reference = interpolated_value(policy, s0);
  const int na = int(p.controls_a.size());
  const int nb = int(p.controls_b.size());

  // Held-value random control: refreshed every `dwell` steps, sequential in k.
  struct Held {
    Rng rng;
    int refreshed_at = -1;
    int value = 0;
    explicit Held(std::uint64_t seed) : rng(seed) {}
  };
  auto random_provider = [dwell](std::shared_ptr<Held> state, int nctrl) {
    return ControlProvider([state, nctrl, dwell](int k, const HybridState&) {
      const int slot = k / dwell;
      if (slot != state->refreshed_at) {
        state->refreshed_at = slot;
        state->value = int(state->rng.index(std::size_t(nctrl)));
      }
      return state->value;
    });
  };
  auto feedback_a = [&policy](int, const HybridState& s) {
    return feedback_controls(policy, s).a_index;
  };
  auto feedback_b = [&policy](int, const HybridState& s) {
    return feedback_controls(policy, s).b_index;
  };

  AdversarialResult result;
  result.gap_adverse_b = -std::numeric_limits<double>::infinity();
  result.gap_adverse_a = -std::numeric_limits<double>::infinity();
  Rng master(opt.seed);
  for (int trial = 0; trial < opt.trials; ++trial) {
    const std::uint64_t seed_b = master.next();
    const std::uint64_t seed_a = master.next();
    {
      auto held = std::make_shared<Held>(seed_b);
      const Trajectory traj =
          simulate_with(p, s0, feedback_a, random_provider(held, nb), T, dt, dyn_M);
      const double cost = discounted_cost(p, traj, T);
      result.gap_adverse_b = std::max(result.gap_adverse_b, cost - reference);
    }
    {
      auto held = std::make_shared<Held>(seed_a);
      const Trajectory traj =
          simulate_with(p, s0, random_provider(held, na), feedback_b, T, dt, dyn_M);
      const double cost = discounted_cost(p, traj, T);
      result.gap_adverse_a = std::max(result.gap_adverse_a, reference - cost);
    }
  }
  return result;
}

}  // namespace thermoisaacs
