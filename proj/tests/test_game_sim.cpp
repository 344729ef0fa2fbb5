#include "doctest.h"

#include <cmath>
#include <vector>

#include "thermoisaacs/errors.hpp"
#include "thermoisaacs/game_sim.hpp"
#include "thermoisaacs/problem.hpp"

using namespace thermoisaacs;

namespace {

// The mode-cost benchmark: ell = (w+1)/2, f = a, so the minimizer's only goal
// is reaching and holding the cheap mode. Closed form of the lower value:
// V(x, -1) = 0, V(x, +1) = 1 - exp(-(x + 0.5)).
struct Solved {
  GameProblem p;
  SectorGrid g;
  ValueField v;
  SolverConfig cfg;
};

const Solved& solved_p2() {
  static const Solved* s = [] {
    auto lp = load_problem_file("problems/p2.json");
    SolverConfig cfg;
    cfg.value_kind = ValueKind::Lower;
    cfg.tol = 1e-6;
    auto* out = new Solved{lp.problem, build_grid(lp.problem, lp.grid), {}, cfg};
    out->v = IsaacsSolver(out->p, out->g, cfg).solve().first;
    return out;
  }();
  return *s;
}

FeedbackPolicy policy_of(const Solved& s) {
  return FeedbackPolicy{&s.p, &s.g, &s.v, s.cfg};
}

HybridState start(double x, double y, int w, int z) {
  HybridState st;
  st.x = {x};
  st.y = {y};
  st.w = w;
  st.z = z;
  return st;
}

}  // namespace

TEST_CASE("feedback races toward the cheap mode") {
  auto pol = policy_of(solved_p2());
  // In the expensive mode the minimizer must drive x down to the low
  // threshold as fast as possible: a = -1 is the first-listed control.
  for (double x : {-0.3, 0.0, 0.2, 0.7}) {
    auto ch = feedback_controls(pol, start(x, 0.0, 1, -1));
    CHECK(ch.a_index == 0);
  }
}

TEST_CASE("interpolated field values") {
  const Solved& s = solved_p2();
  auto pol = policy_of(s);

  // Query on a node reads the node value exactly. x index 48 is local 28 of
  // the w=+1 block (which starts at the rho_lo index 20); y index 40 is local
  // 40 of z=-1.
  const double xn = s.g.axes_x()[0][48];
  const double yn = s.g.axes_y()[0][40];
  CHECK(field_value_at(s.g, s.v, 1, -1, std::vector<double>{xn},
                       std::vector<double>{yn}) == s.v.at(1, -1, 28, 40));

  // Between nodes the interpolation stays inside the bracketing node values.
  const double xm = 0.5 * (s.g.axes_x()[0][48] + s.g.axes_x()[0][49]);
  const double lo = s.v.at(1, -1, 28, 40), hi = s.v.at(1, -1, 29, 40);
  const double mid = field_value_at(s.g, s.v, 1, -1, std::vector<double>{xm},
                                    std::vector<double>{yn});
  CHECK(mid >= std::min(lo, hi) - 1e-15);
  CHECK(mid <= std::max(lo, hi) + 1e-15);

  CHECK(interpolated_value(pol, start(xn, yn, 1, -1)) ==
        doctest::Approx(s.v.at(1, -1, 28, 40)).epsilon(1e-15));

  // Solved field tracks the closed form.
  CHECK(interpolated_value(pol, start(0.0, 0.0, 1, -1)) ==
        doctest::Approx(1.0 - std::exp(-0.5)).epsilon(5e-3));
  CHECK(std::abs(interpolated_value(pol, start(0.0, 0.0, -1, -1))) < 1e-6);
}

TEST_CASE("closed-loop rollouts realize the value") {
  const Solved& s = solved_p2();
  auto pol = policy_of(s);

  // Expensive start: one switch, then the cost stops accruing.
  auto traj = closed_loop_rollout(pol, start(0.0, 0.0, 1, -1), 40.0, 0.005);
  REQUIRE(traj.events.size() == 1);
  CHECK(traj.events[0].new_w == -1);
  CHECK(std::abs(traj.events[0].time - 0.5) < 0.02);

  const double clv = closed_loop_value(pol, start(0.0, 0.0, 1, -1), 40.0, 0.005);
  CHECK(std::abs(clv - (1.0 - std::exp(-0.5))) < 0.02);
  CHECK(std::abs(clv - interpolated_value(pol, start(0.0, 0.0, 1, -1))) <
        default_gap_tol(s.p));

  // Cheap start: the feedback holds the mode and the cost is exactly zero.
  CHECK(closed_loop_value(pol, start(-0.2, 0.0, -1, -1), 40.0, 0.005) == 0.0);

  CHECK_THROWS_AS(closed_loop_value(pol, start(0.0, 0.0, 1, -1), 10.0, 0.005),
                  InvalidArgument);  // lambda * T < 35
}

TEST_CASE("ties resolve to the first-listed control") {
  GameProblem p;
  p.rho = {-0.5, 0.5};
  p.eta = {-0.5, 0.5};
  p.controls_a = {{-1}, {0}, {1}};
  p.controls_b = {{-1}, {0}, {1}};
  p.qx = {{-1, 1}};
  p.qy = {{-1, 1}};
  DynamicsSpec df;
  df.components = {"a"};
  p.f = df.compile(1, 1, 'x');
  DynamicsSpec dg;
  dg.components = {"b"};
  p.g = dg.compile(1, 1, 'y');
  p.ell1 = CostSpec{"1"}.compile(1, 1, 1, 'a');
  p.ell2 = CostSpec{"0"}.compile(1, 1, 1, 'b');

  auto g = build_grid(p, GridSpec{{21}, {21}, 0.05});
  ValueField flat(g, 0.7);
  for (ValueKind kind : {ValueKind::Lower, ValueKind::Upper}) {
    SolverConfig cfg;
    cfg.value_kind = kind;
    FeedbackPolicy pol{&p, &g, &flat, cfg};
    auto ch = feedback_controls(pol, start(0.0, 0.0, -1, -1));
    CHECK(ch.a_index == 0);
    CHECK(ch.b_index == 0);
  }
}

TEST_CASE("feedback state guards") {
  auto pol = policy_of(solved_p2());
  CHECK_THROWS_AS(feedback_controls(pol, start(1.5, 0.0, 1, -1)), OutsideCube);
  CHECK_THROWS_AS(feedback_controls(pol, start(0.7, 0.0, -1, -1)),
                  InadmissibleInitialState);
  CHECK_THROWS_AS(feedback_controls(pol, start(0.0, 0.0, 1, 0)),
                  InadmissibleInitialState);
  FeedbackPolicy empty;
  CHECK_THROWS_AS(feedback_controls(empty, start(0, 0, -1, -1)), InvalidArgument);
}

TEST_CASE("adversarial probes cannot beat the feedback by more than the tolerance") {
  const Solved& s = solved_p2();
  auto pol = policy_of(s);
  AdversarialOptions opt;
  opt.trials = 5;
  auto res = adversarial_check(pol, start(0.0, 0.0, 1, -1), opt);
  CHECK(res.max_gap() <= default_gap_tol(s.p));
  CHECK(res.max_gap() == std::max(res.gap_adverse_a, res.gap_adverse_b));

  // Deterministic: the same options reproduce the gaps bit for bit.
  opt.trials = 3;
  auto r1 = adversarial_check(pol, start(0.0, 0.0, 1, -1), opt);
  auto r2 = adversarial_check(pol, start(0.0, 0.0, 1, -1), opt);
  CHECK(r1.gap_adverse_a == r2.gap_adverse_a);
  CHECK(r1.gap_adverse_b == r2.gap_adverse_b);

  opt.trials = 0;
  CHECK_THROWS_AS(adversarial_check(pol, start(0.0, 0.0, 1, -1), opt),
                  InvalidArgument);
}
