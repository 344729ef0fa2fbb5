#include "doctest.h"

#include <cmath>
#include <vector>

#include "thermoisaacs/errors.hpp"
#include "thermoisaacs/hybrid_dynamics.hpp"
#include "thermoisaacs/problem.hpp"
#include "thermoisaacs/relay.hpp"
#include "thermoisaacs/util.hpp"

using namespace thermoisaacs;

namespace {

GameProblem toy(const std::string& fx = "a", const std::string& gy = "b",
                const std::string& l1 = "(w + 1) / 2", const std::string& l2 = "0") {
  GameProblem p;
  p.rho = {-0.5, 0.5};
  p.eta = {-0.5, 0.5};
  p.controls_a = {{-1}, {0}, {1}};
  p.controls_b = {{-1}, {0}, {1}};
  p.qx = {{-1, 1}};
  p.qy = {{-1, 1}};
  DynamicsSpec df;
  df.components = {fx};
  p.f = df.compile(1, 1, 'x');
  DynamicsSpec dg;
  dg.components = {gy};
  p.g = dg.compile(1, 1, 'y');
  p.ell1 = CostSpec{l1}.compile(1, 1, 1, 'a');
  p.ell2 = CostSpec{l2}.compile(1, 1, 1, 'b');
  return p;
}

HybridState start(double x, double y, int w, int z) {
  HybridState s;
  s.x = {x};
  s.y = {y};
  s.w = w;
  s.z = z;
  return s;
}

}  // namespace

TEST_CASE("single crossing at the expected time") {
  auto p = toy();
  const double dt = 0.01, T = 2.0;
  const int steps = 200;
  std::vector<int> alpha(steps, 2), beta(steps, 1);  // a = +1, b = 0
  auto traj = simulate(p, start(0, 0, -1, -1), alpha, beta, T, dt, 1.0);

  REQUIRE(traj.states.size() == std::size_t(steps) + 1);
  REQUIRE(traj.events.size() == 1);
  const auto& ev = traj.events[0];
  CHECK(ev.kind == SwitchingEvent::Kind::XOnly);
  CHECK(std::abs(ev.time - 0.5) <= dt + 1e-12);
  CHECK(ev.new_w == 1);
  CHECK(ev.new_z == -1);

  // Mode flips at the step after the crossing was detected, never before.
  CHECK(traj.states[45].w == -1);
  CHECK(traj.states[60].w == 1);
  CHECK(traj.states.back().z == -1);

  // x keeps rising and is clamped at the cube face.
  CHECK(traj.states.back().x[0] == 1.0);
  CHECK(traj.clamp_count > 0);
  CHECK(traj.alpha_used == alpha);
}

TEST_CASE("mode sequences agree with the relay on the sampled path") {
  auto p = toy();
  Rng rng(0x7e57u);
  const double dt = 0.05, T = 5.0;
  const int steps = 100;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> alpha, beta;
    for (int k = 0; k < steps; ++k) {
      alpha.push_back(int(rng.index(3)));
      beta.push_back(int(rng.index(3)));
    }
    auto traj = simulate(p, start(0, 0, -1, -1), alpha, beta, T, dt, 1.0);

    SampledSignal sx, sy;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      sx.times.push_back(dt * double(k));
      sx.values.push_back(traj.states[k].x[0]);
      sy.times.push_back(dt * double(k));
      sy.values.push_back(traj.states[k].y[0]);
    }
    auto tx = relay_evaluate(sx, p.rho, -1);
    auto ty = relay_evaluate(sy, p.eta, -1);

    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      CHECK(traj.states[k].w == relay_output_at(tx, dt * double(k)));
      CHECK(traj.states[k].z == relay_output_at(ty, dt * double(k)));
    }

    std::size_t x_events = 0, y_events = 0;
    double prev = -1;
    for (const auto& ev : traj.events) {
      CHECK(ev.time >= prev);
      prev = ev.time;
      if (ev.kind != SwitchingEvent::Kind::YOnly) ++x_events;
      if (ev.kind != SwitchingEvent::Kind::XOnly) ++y_events;
    }
    CHECK(x_events == tx.switch_times.size());
    CHECK(y_events == ty.switch_times.size());
  }
}

TEST_CASE("two crossings inside one step are ordered") {
  auto p = toy();
  std::vector<int> alpha{2, 1}, beta{2, 1};
  // x needs 0.15 of the 0.3 step, y needs 0.2: X first, then Y.
  auto traj = simulate(p, start(0.35, 0.3, -1, -1), alpha, beta, 0.6, 0.3, 1.0);
  REQUIRE(traj.events.size() == 2);
  CHECK(traj.events[0].kind == SwitchingEvent::Kind::XOnly);
  CHECK(std::abs(traj.events[0].time - 0.15) < 1e-12);
  CHECK(traj.events[0].new_w == 1);
  CHECK(traj.events[0].new_z == -1);
  CHECK(traj.events[1].kind == SwitchingEvent::Kind::YOnly);
  CHECK(std::abs(traj.events[1].time - 0.2) < 1e-12);
  CHECK(traj.events[1].new_w == 1);
  CHECK(traj.events[1].new_z == 1);

  // Identical fractions collapse into one simultaneous event.
  auto sim = simulate(p, start(0.35, 0.35, -1, -1), alpha, beta, 0.6, 0.3, 1.0);
  REQUIRE(sim.events.size() == 1);
  CHECK(sim.events[0].kind == SwitchingEvent::Kind::Simultaneous);
  CHECK(sim.events[0].new_w == 1);
  CHECK(sim.events[0].new_z == 1);
}

TEST_CASE("discounted cost matches closed forms") {
  // Frozen state, unit cost: integral of exp(-t) over [0, T].
  auto p = toy("0", "0", "1", "0");
  const double dt = 1e-3, T = 5.0;
  const int steps = 5000;
  std::vector<int> alpha(steps, 0), beta(steps, 0);
  auto traj = simulate(p, start(0, 0, -1, -1), alpha, beta, T, dt, 0.0);
  CHECK(std::abs(discounted_cost(p, traj, T) - (1.0 - std::exp(-T))) < 1e-3);
  // Truncating the quadrature horizon integrates less.
  CHECK(discounted_cost(p, traj, 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(2e-3));

  // Constant drift through a quadratic cost: integral of exp(-t)(t-1)^2.
  auto q = toy("1", "0", "x1^2", "0");
  const int steps1 = 1000;
  std::vector<int> a1(steps1, 1), b1(steps1, 1);
  auto tq = simulate(q, start(-1, 0, -1, -1), a1, b1, 1.0, dt, 1.0);
  CHECK(std::abs(discounted_cost(q, tq, 1.0) - (1.0 - 2.0 / std::exp(1.0))) < 2e-3);

  // Mode-dependent cost stops accruing at the switch.
  auto r = toy();  // ell = (w+1)/2
  const int steps2 = 2000;
  std::vector<int> a2(steps2, 0), b2(steps2, 1);  // a = -1 races to the low threshold
  auto tr = simulate(r, start(0, 0, 1, -1), a2, b2, 2.0, dt, 1.0);
  REQUIRE(tr.events.size() == 1);
  CHECK(std::abs(discounted_cost(r, tr, 2.0) - (1.0 - std::exp(-0.5))) < 5e-3);

  // Explicit-control overload reads the same sequences.
  CHECK(discounted_cost(r, tr, a2, b2, 2.0) == discounted_cost(r, tr, 2.0));
}

TEST_CASE("zeno bound formula and guards") {
  auto p = toy();  // both bands are 1.0
  CHECK(zeno_bound(p, 10.0, 2.0) == 2 * (20 + 1));
  CHECK(zeno_bound(p, 0.0, 5.0) == 2);
  CHECK(zeno_bound(p, 1.0, 0.0) == 2);
  // Sampled bound for f = a on {-1,0,1} is exactly 1.
  CHECK(zeno_bound(p, 3.0) == 2 * (3 + 1));
  CHECK_THROWS_AS(zeno_bound(p, -1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(zeno_bound(p, 1.0, -2.0), InvalidArgument);

  // Chattering feedback stays within the bound: roughly one switch per band
  // crossing.
  auto push = [](int w) { return w == -1 ? 2 : 0; };
  auto traj = simulate_with(
      p, start(0, 0, -1, -1),
      [&](int, const HybridState& s) { return push(s.w); },
      [](int, const HybridState&) { return 1; }, 10.0, 0.01, 1.0);
  CHECK(int(traj.events.size()) <= zeno_bound(p, 10.0, 1.0));
  CHECK(traj.events.size() >= 9);
}

TEST_CASE("simulation input guards") {
  auto p = toy();
  std::vector<int> alpha(100, 0), beta(100, 0);

  CHECK_THROWS_AS(simulate(p, start(0, 0, -1, -1), alpha, beta, 1.0, 0.6, 1.0),
                  StepTooLarge);
  CHECK_THROWS_AS(simulate(p, start(0.7, 0, -1, -1), alpha, beta, 1.0, 0.01, 1.0),
                  InadmissibleInitialState);
  CHECK_THROWS_AS(simulate(p, start(0, -0.7, -1, 1), alpha, beta, 1.0, 0.01, 1.0),
                  InadmissibleInitialState);
  CHECK_THROWS_AS(simulate(p, start(0, 0, 0, -1), alpha, beta, 1.0, 0.01, 1.0),
                  InadmissibleInitialState);
  HybridState wrong;
  wrong.x = {0.0, 0.0};
  wrong.y = {0.0};
  CHECK_THROWS_AS(simulate(p, wrong, alpha, beta, 1.0, 0.01, 1.0),
                  InadmissibleInitialState);

  // Sequences must cover ceil(T/dt) steps.
  CHECK_THROWS_AS(simulate(p, start(0, 0, -1, -1), alpha, beta, 2.0, 0.01, 1.0),
                  InvalidArgument);
  CHECK_THROWS_AS(simulate(p, start(0, 0, -1, -1), alpha, beta, -1.0, 0.01, 1.0),
                  InvalidArgument);

  std::vector<int> bad(100, 7);
  CHECK_THROWS_AS(simulate(p, start(0, 0, -1, -1), bad, beta, 1.0, 0.01, 1.0),
                  InadmissibleControl);
}
