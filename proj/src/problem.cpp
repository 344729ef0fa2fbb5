#include "thermoisaacs/problem.hpp"

#include <cmath>
#include <map>

#include "json.hpp"
#include "thermoisaacs/errors.hpp"
#include "thermoisaacs/expression.hpp"
#include "thermoisaacs/util.hpp"

namespace thermoisaacs {

using nlohmann::json;

namespace {

constexpr int kMaxSlots = 64;

// Variable slot map for one player's dynamics: [state..., mode, ctrl...].
std::map<std::string, int> dynamics_vars(int state_dim, int ctrl_dim, char who) {
  const char sv = (who == 'x') ? 'x' : 'y';
  const char mv = (who == 'x') ? 'w' : 'z';
  const char cv = (who == 'x') ? 'a' : 'b';
  std::map<std::string, int> vars;
  for (int i = 0; i < state_dim; ++i) vars[sv + std::to_string(i + 1)] = i;
  vars[std::string(1, mv)] = state_dim;
  for (int i = 0; i < ctrl_dim; ++i)
    vars[cv + std::to_string(i + 1)] = state_dim + 1 + i;
  vars[std::string(1, cv)] = state_dim + 1;  // alias for the first component
  return vars;
}

// Cost slots: [x..., y..., w, z, ctrl...].
std::map<std::string, int> cost_vars(int n, int m, int ctrl_dim, char who) {
  std::map<std::string, int> vars;
  for (int i = 0; i < n; ++i) vars["x" + std::to_string(i + 1)] = i;
  for (int i = 0; i < m; ++i) vars["y" + std::to_string(i + 1)] = n + i;
  vars["w"] = n + m;
  vars["z"] = n + m + 1;
  const char cv = (who == 'a') ? 'a' : 'b';
  for (int i = 0; i < ctrl_dim; ++i)
    vars[cv + std::to_string(i + 1)] = n + m + 2 + i;
  vars[std::string(1, cv)] = n + m + 2;
  return vars;
}

}  // namespace

DynFn DynamicsSpec::compile(int state_dim, int ctrl_dim, char who) const {
  if (state_dim + 1 + ctrl_dim > kMaxSlots)
    throw ParseError("too many variables");
  if (kind == Kind::Affine) {
    auto check = [&](const AffineMode& mo, const char* label) {
      if (int(mo.c.size()) != state_dim || int(mo.D.size()) != state_dim ||
          int(mo.E.size()) != state_dim)
        throw ParseError(std::string("affine block '") + label + "' has wrong row count");
      for (const auto& row : mo.D)
        if (int(row.size()) != state_dim) throw ParseError("affine D is not square");
      for (const auto& row : mo.E)
        if (int(row.size()) != ctrl_dim) throw ParseError("affine E has wrong width");
    };
    check(affine_minus, "-1");
    check(affine_plus, "+1");
    AffineMode lo = affine_minus, hi = affine_plus;
    return [lo, hi, state_dim, ctrl_dim](std::span<const double> s, int mode,
                                         std::span<const double> c,
                                         std::span<double> out) {
      const AffineMode& mo = (mode > 0) ? hi : lo;
      for (int i = 0; i < state_dim; ++i) {
        double acc = mo.c[std::size_t(i)];
        for (int j = 0; j < state_dim; ++j) acc += mo.D[std::size_t(i)][std::size_t(j)] * s[std::size_t(j)];
        for (int j = 0; j < ctrl_dim; ++j) acc += mo.E[std::size_t(i)][std::size_t(j)] * c[std::size_t(j)];
        out[std::size_t(i)] = acc;
      }
    };
  }
  if (int(components.size()) != state_dim)
    throw ParseError("dynamics needs one expression per state component");
  auto vars = dynamics_vars(state_dim, ctrl_dim, who);
  std::vector<Expression> exprs;
  exprs.reserve(components.size());
  for (const auto& text : components) exprs.push_back(Expression::parse(text, vars));
  return [exprs, state_dim, ctrl_dim](std::span<const double> s, int mode,
                                      std::span<const double> c,
                                      std::span<double> out) {
    double slots[kMaxSlots];
    for (int i = 0; i < state_dim; ++i) slots[i] = s[std::size_t(i)];
    slots[state_dim] = double(mode);
    for (int i = 0; i < ctrl_dim; ++i) slots[state_dim + 1 + i] = c[std::size_t(i)];
    for (int i = 0; i < state_dim; ++i)
      out[std::size_t(i)] = exprs[std::size_t(i)].eval(std::span<const double>(slots, std::size_t(state_dim + 1 + ctrl_dim)));
  };
}

CostFn CostSpec::compile(int n, int m, int ctrl_dim, char who) const {
  if (n + m + 2 + ctrl_dim > kMaxSlots) throw ParseError("too many variables");
  Expression e = Expression::parse(expr, cost_vars(n, m, ctrl_dim, who));
  return [e, n, m, ctrl_dim](std::span<const double> x, std::span<const double> y,
                             int w, int z, std::span<const double> c) {
    double slots[kMaxSlots];
    for (int i = 0; i < n; ++i) slots[i] = x[std::size_t(i)];
    for (int i = 0; i < m; ++i) slots[n + i] = y[std::size_t(i)];
    slots[n + m] = double(w);
    slots[n + m + 1] = double(z);
    for (int i = 0; i < ctrl_dim; ++i) slots[n + m + 2 + i] = c[std::size_t(i)];
    return e.eval(std::span<const double>(slots, std::size_t(n + m + 2 + ctrl_dim)));
  };
}

double GameProblem::ell_total(std::span<const double> x, std::span<const double> y,
                              int w, int z, std::span<const double> a,
                              std::span<const double> b) const {
  if (ell_override) return ell_override(x, y, w, z, a, b);
  return ell1(x, y, w, z, a) + ell2(x, y, w, z, b);
}

void GameProblem::validate_basic() const {
  if (n < 1 || m < 1) throw InvalidArgument("state dimensions must be >= 1");
  if (!(lambda > 0)) throw InvalidArgument("lambda must be positive");
  if (!(rho.lo < rho.hi) || !(eta.lo < eta.hi))
    throw InvalidArgument("thresholds must satisfy lo < hi");
  if (int(qx.size()) != n || int(qy.size()) != m)
    throw InvalidArgument("cube bounds must match state dimensions");
  for (const auto& b : qx)
    if (!(b[0] < b[1])) throw InvalidArgument("empty cube axis");
  for (const auto& b : qy)
    if (!(b[0] < b[1])) throw InvalidArgument("empty cube axis");
  if (!(qx[0][0] < rho.lo && rho.hi < qx[0][1]))
    throw InvalidArgument("rho thresholds must lie strictly inside the cube");
  if (!(qy[0][0] < eta.lo && eta.hi < qy[0][1]))
    throw InvalidArgument("eta thresholds must lie strictly inside the cube");
  if (controls_a.empty() || controls_b.empty())
    throw InvalidArgument("control sets must be nonempty");
  for (const auto& c : controls_a)
    if (int(c.size()) != ctrl_dim_a()) throw InvalidArgument("ragged control set A");
  for (const auto& c : controls_b)
    if (int(c.size()) != ctrl_dim_b()) throw InvalidArgument("ragged control set B");
  if (!f || !g || !ell1 || !ell2) throw InvalidArgument("dynamics/cost not set");
}

namespace {

DynamicsSpec parse_dynamics_spec(const json& j) {
  DynamicsSpec spec;
  if (j.is_string()) {
    spec.kind = DynamicsSpec::Kind::Expression;
    spec.components = {j.get<std::string>()};
    return spec;
  }
  std::string kind = j.value("kind", "expression");
  if (kind == "expression") {
    spec.kind = DynamicsSpec::Kind::Expression;
    if (j.contains("components"))
      spec.components = j.at("components").get<std::vector<std::string>>();
    else
      spec.components = {j.at("expr").get<std::string>()};
    return spec;
  }
  if (kind != "affine") throw ParseError("dynamics kind must be expression or affine");
  spec.kind = DynamicsSpec::Kind::Affine;
  const json& modes = j.at("modes");
  auto read_mode = [](const json& mj) {
    DynamicsSpec::AffineMode mo;
    mo.c = mj.at("c").get<std::vector<double>>();
    mo.D = mj.at("D").get<std::vector<std::vector<double>>>();
    mo.E = mj.at("E").get<std::vector<std::vector<double>>>();
    return mo;
  };
  spec.affine_minus = read_mode(modes.at("-1"));
  spec.affine_plus = read_mode(modes.at("1"));
  return spec;
}

CostSpec parse_cost_spec(const json& j) {
  CostSpec spec;
  if (j.is_string()) {
    spec.expr = j.get<std::string>();
  } else {
    if (j.value("kind", "expression") != "expression")
      throw ParseError("cost terms must be expressions");
    spec.expr = j.at("expr").get<std::string>();
  }
  return spec;
}

std::vector<std::vector<double>> parse_controls(const json& j) {
  std::vector<std::vector<double>> out;
  for (const auto& e : j) {
    if (e.is_number())
      out.push_back({e.get<double>()});
    else
      out.push_back(e.get<std::vector<double>>());
  }
  return out;
}

// Spot-checks that both costs are finite and nonnegative and the dynamics are
// finite over sampled (state, mode, control) tuples.
void sample_sanity(const GameProblem& p) {
  Rng rng(0xfeedf00d);
  std::vector<double> x(std::size_t(p.n)), y(std::size_t(p.m)), fx(std::size_t(p.n)), gy(std::size_t(p.m));
  for (int k = 0; k < 128; ++k) {
    for (int i = 0; i < p.n; ++i) x[std::size_t(i)] = rng.uniform(p.qx[std::size_t(i)][0], p.qx[std::size_t(i)][1]);
    for (int i = 0; i < p.m; ++i) y[std::size_t(i)] = rng.uniform(p.qy[std::size_t(i)][0], p.qy[std::size_t(i)][1]);
    for (int w : {-1, 1})
      for (int z : {-1, 1}) {
        for (const auto& a : p.controls_a) {
          p.f(x, w, a, fx);
          for (double v : fx)
            if (!std::isfinite(v)) throw ParseError("f is not finite on a sampled point");
          double c1 = p.ell1(x, y, w, z, a);
          if (!std::isfinite(c1) || c1 < -1e-12)
            throw ParseError("ell1 must be finite and nonnegative (sampled violation)");
        }
        for (const auto& b : p.controls_b) {
          p.g(y, z, b, gy);
          for (double v : gy)
            if (!std::isfinite(v)) throw ParseError("g is not finite on a sampled point");
          double c2 = p.ell2(x, y, w, z, b);
          if (!std::isfinite(c2) || c2 < -1e-12)
            throw ParseError("ell2 must be finite and nonnegative (sampled violation)");
        }
      }
  }
}

}  // namespace

LoadedProblem parse_problem(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("problem file is not valid JSON: ") + e.what());
  }
  try {
    LoadedProblem lp;
    lp.source_text = json_text;
    GameProblem& p = lp.problem;
    p.n = j.at("dims").at("n").get<int>();
    p.m = j.at("dims").at("m").get<int>();
    auto rho = j.at("thresholds").at("rho").get<std::vector<double>>();
    auto eta = j.at("thresholds").at("eta").get<std::vector<double>>();
    if (rho.size() != 2 || eta.size() != 2)
      throw ParseError("thresholds need exactly two entries");
    p.rho = {rho[0], rho[1]};
    p.eta = {eta[0], eta[1]};
    p.lambda = j.at("lambda").get<double>();
    p.controls_a = parse_controls(j.at("controls").at("A"));
    p.controls_b = parse_controls(j.at("controls").at("B"));
    for (const auto& b : j.at("cube").at("Qx"))
      p.qx.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    for (const auto& b : j.at("cube").at("Qy"))
      p.qy.push_back({b.at(0).get<double>(), b.at(1).get<double>()});

    p.f = parse_dynamics_spec(j.at("dynamics").at("f")).compile(p.n, p.ctrl_dim_a(), 'x');
    p.g = parse_dynamics_spec(j.at("dynamics").at("g")).compile(p.m, p.ctrl_dim_b(), 'y');
    p.ell1 = parse_cost_spec(j.at("cost").at("ell1")).compile(p.n, p.m, p.ctrl_dim_a(), 'a');
    p.ell2 = parse_cost_spec(j.at("cost").at("ell2")).compile(p.n, p.m, p.ctrl_dim_b(), 'b');

    const json& gj = j.at("grid");
    lp.grid.nx = gj.at("nx").get<std::vector<int>>();
    lp.grid.ny = gj.at("ny").get<std::vector<int>>();
    lp.grid.h = gj.at("h").get<double>();
    if (int(lp.grid.nx.size()) != p.n || int(lp.grid.ny.size()) != p.m)
      throw ParseError("grid counts must match state dimensions");
    for (int c : lp.grid.nx)
      if (c < 2) throw ParseError("grid axes need at least two nodes");
    for (int c : lp.grid.ny)
      if (c < 2) throw ParseError("grid axes need at least two nodes");
    if (!(lp.grid.h > 0)) throw ParseError("grid h must be positive");

    p.validate_basic();
    sample_sanity(p);
    return lp;
  } catch (const json::exception& e) {
    throw ParseError(std::string("problem file is missing or mistypes a field: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("inconsistent problem: ") + e.what());
  }
}

LoadedProblem load_problem_file(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw Error("problem file not found: " + path);
  }
  return parse_problem(text);
}

}  // namespace thermoisaacs
