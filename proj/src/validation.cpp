#include "thermoisaacs/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermoisaacs/util.hpp"

namespace thermoisaacs {

namespace {

constexpr double kTangentTol = 1e-12;

double norm2(std::span<const double> v) {
  double s = 0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

void random_point(Rng& rng, const std::vector<std::array<double, 2>>& box,
                  std::vector<double>& out) {
  out.resize(box.size());
  for (std::size_t i = 0; i < box.size(); ++i)
    out[i] = rng.uniform(box[i][0], box[i][1]);
}

}  // namespace

double SampledBounds::bound_M() const { return std::max({dyn_f, dyn_g, cost}); }
double SampledBounds::dyn_M() const { return std::max(dyn_f, dyn_g); }

SampledBounds sample_bounds(const GameProblem& p, int samples, std::uint64_t seed) {
  SampledBounds out;
  out.cost_min = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  std::vector<double> x, y, x2, y2;
  std::vector<double> fx(std::size_t(p.n)), fx2(std::size_t(p.n));
  std::vector<double> gy(std::size_t(p.m)), gy2(std::size_t(p.m));
  const double dx_probe = 1e-4;
  for (int k = 0; k < samples; ++k) {
    random_point(rng, p.qx, x);
    random_point(rng, p.qy, y);
    // Paired probe point: axis-aligned for even k (axis cycling), fully random
    // for odd k. Axis-aligned probes make the estimate sharp for diagonal
    // affine dynamics.
    x2 = x;
    y2 = y;
    if (k % 2 == 0) {
      int ax = (k / 2) % p.n;
      double span = p.qx[std::size_t(ax)][1] - p.qx[std::size_t(ax)][0];
      x2[std::size_t(ax)] = std::min(x2[std::size_t(ax)] + dx_probe * span, p.qx[std::size_t(ax)][1]);
      int ay = (k / 2) % p.m;
      double span_y = p.qy[std::size_t(ay)][1] - p.qy[std::size_t(ay)][0];
      y2[std::size_t(ay)] = std::min(y2[std::size_t(ay)] + dx_probe * span_y, p.qy[std::size_t(ay)][1]);
    } else {
      random_point(rng, p.qx, x2);
      random_point(rng, p.qy, y2);
    }
    double ddx = 0, ddy = 0;
    for (int i = 0; i < p.n; ++i) ddx += (x[std::size_t(i)] - x2[std::size_t(i)]) * (x[std::size_t(i)] - x2[std::size_t(i)]);
    for (int i = 0; i < p.m; ++i) ddy += (y[std::size_t(i)] - y2[std::size_t(i)]) * (y[std::size_t(i)] - y2[std::size_t(i)]);
    ddx = std::sqrt(ddx);
    ddy = std::sqrt(ddy);

    for (int w : {-1, 1}) {
      for (const auto& a : p.controls_a) {
        p.f(x, w, a, fx);
        out.dyn_f = std::max(out.dyn_f, norm2(fx));
        out.dyn_f1 = std::max(out.dyn_f1, std::fabs(fx[0]));
        if (ddx > 0) {
          p.f(x2, w, a, fx2);
          double dn = 0;
          for (int i = 0; i < p.n; ++i) dn += (fx[std::size_t(i)] - fx2[std::size_t(i)]) * (fx[std::size_t(i)] - fx2[std::size_t(i)]);
          out.lipschitz = std::max(out.lipschitz, std::sqrt(dn) / ddx);
        }
      }
    }
    for (int z : {-1, 1}) {
      for (const auto& b : p.controls_b) {
        p.g(y, z, b, gy);
        out.dyn_g = std::max(out.dyn_g, norm2(gy));
        out.dyn_g1 = std::max(out.dyn_g1, std::fabs(gy[0]));
        if (ddy > 0) {
          p.g(y2, z, b, gy2);
          double dn = 0;
          for (int i = 0; i < p.m; ++i) dn += (gy[std::size_t(i)] - gy2[std::size_t(i)]) * (gy[std::size_t(i)] - gy2[std::size_t(i)]);
          out.lipschitz = std::max(out.lipschitz, std::sqrt(dn) / ddy);
        }
      }
    }
    for (int w : {-1, 1})
      for (int z : {-1, 1})
        for (const auto& a : p.controls_a)
          for (const auto& b : p.controls_b) {
            double c = p.ell_total(x, y, w, z, a, b);
            out.cost = std::max(out.cost, c);
            out.cost_min = std::min(out.cost_min, c);
          }
  }
  return out;
}

ControllabilityResult validate_controllability(const GameProblem& p,
                                               int samples_per_face,
                                               std::uint64_t seed) {
  ControllabilityResult res;
  Rng rng(seed);
  std::vector<double> pt, out_dyn;

  auto check_side = [&](bool x_side, int mode) {
    const auto& box = x_side ? p.qx : p.qy;
    const auto& ctrls = x_side ? p.controls_a : p.controls_b;
    const RelayConfig& thr = x_side ? p.rho : p.eta;
    const double boundary = (mode > 0) ? thr.lo : thr.hi;
    out_dyn.resize(box.size());
    for (int k = 0; k < samples_per_face; ++k) {
      random_point(rng, box, pt);
      pt[0] = boundary;
      bool has_neg = false, has_pos = false;
      for (const auto& c : ctrls) {
        if (x_side)
          p.f(pt, mode, c, out_dyn);
        else
          p.g(pt, mode, c, out_dyn);
        if (out_dyn[0] < 0) has_neg = true;
        if (out_dyn[0] > 0) has_pos = true;
      }
      if (!(has_neg && has_pos)) {
        res.failures.push_back(std::string(x_side ? "X" : "Y") + " mode " +
                               std::to_string(mode) + ": first component of " +
                               (x_side ? "f" : "g") +
                               " does not take both signs on the switching boundary");
        return false;
      }
    }
    return true;
  };

  res.x_mode_minus = check_side(true, -1);
  res.x_mode_plus = check_side(true, 1);
  res.y_mode_minus = check_side(false, -1);
  res.y_mode_plus = check_side(false, 1);
  return res;
}

InvarianceResult validate_invariance(const GameProblem& p, int samples_per_face,
                                     std::uint64_t seed) {
  InvarianceResult res;
  res.ok = true;
  Rng rng(seed);
  std::vector<double> pt, out_dyn;

  auto check_cube = [&](bool x_side) {
    const auto& box = x_side ? p.qx : p.qy;
    const auto& ctrls = x_side ? p.controls_a : p.controls_b;
    const RelayConfig& thr = x_side ? p.rho : p.eta;
    const int dim = int(box.size());
    out_dyn.resize(box.size());
    for (int axis = 0; axis < dim; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const double face = box[std::size_t(axis)][std::size_t(side)];
        for (int k = 0; k < samples_per_face; ++k) {
          random_point(rng, box, pt);
          pt[std::size_t(axis)] = face;
          for (int mode : {-1, 1}) {
            // Only modes admissible at this point can ever occur there.
            if (!relay_pair_admissible(pt[0], mode, thr)) continue;
            for (const auto& c : ctrls) {
              if (x_side)
                p.f(pt, mode, c, out_dyn);
              else
                p.g(pt, mode, c, out_dyn);
              const double outward =
                  (side == 1) ? out_dyn[std::size_t(axis)] : -out_dyn[std::size_t(axis)];
              if (outward > kTangentTol) {
                res.ok = false;
                res.violations.push_back(
                    std::string(x_side ? "Qx" : "Qy") + " axis " +
                    std::to_string(axis + 1) + (side == 1 ? " upper" : " lower") +
                    " face: outward velocity " + format_double(outward) +
                    " in mode " + std::to_string(mode));
                if (res.violations.size() >= 16) return;
              }
            }
          }
        }
      }
    }
  };

  check_cube(true);
  if (res.violations.size() < 16) check_cube(false);
  return res;
}

double check_isaacs_condition(const GameProblem& p, int samples,
                              std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t na = p.controls_a.size(), nb = p.controls_b.size();
  std::vector<double> x, y, pv(std::size_t(p.n)), qv(std::size_t(p.m));
  std::vector<double> fx(std::size_t(p.n)), gy(std::size_t(p.m));
  std::vector<double> u(na), v(nb), hmat(na * nb);
  double gap = 0;
  for (int k = 0; k < samples; ++k) {
    random_point(rng, p.qx, x);
    random_point(rng, p.qy, y);
    for (int i = 0; i < p.n; ++i) pv[std::size_t(i)] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < p.m; ++i) qv[std::size_t(i)] = rng.uniform(-1.0, 1.0);
    const int w = (k & 1) ? 1 : -1;
    const int z = (k & 2) ? 1 : -1;

    if (!p.ell_override) {
      // Decoupled cost: assemble per-control terms first. The Hamiltonian
      // matrix is then exactly fl(u_a + v_b), and because rounding is
      // monotone, minmax and maxmin coincide exactly.
      for (std::size_t ai = 0; ai < na; ++ai) {
        p.f(x, w, p.controls_a[ai], fx);
        double dot = 0;
        for (int i = 0; i < p.n; ++i) dot += fx[std::size_t(i)] * pv[std::size_t(i)];
        u[ai] = -dot - p.ell1(x, y, w, z, p.controls_a[ai]);
      }
      for (std::size_t bi = 0; bi < nb; ++bi) {
        p.g(y, z, p.controls_b[bi], gy);
        double dot = 0;
        for (int i = 0; i < p.m; ++i) dot += gy[std::size_t(i)] * qv[std::size_t(i)];
        v[bi] = -dot - p.ell2(x, y, w, z, p.controls_b[bi]);
      }
      for (std::size_t ai = 0; ai < na; ++ai)
        for (std::size_t bi = 0; bi < nb; ++bi) hmat[ai * nb + bi] = u[ai] + v[bi];
    } else {
      for (std::size_t ai = 0; ai < na; ++ai) {
        p.f(x, w, p.controls_a[ai], fx);
        double dfp = 0;
        for (int i = 0; i < p.n; ++i) dfp += fx[std::size_t(i)] * pv[std::size_t(i)];
        for (std::size_t bi = 0; bi < nb; ++bi) {
          p.g(y, z, p.controls_b[bi], gy);
          double dgq = 0;
          for (int i = 0; i < p.m; ++i) dgq += gy[std::size_t(i)] * qv[std::size_t(i)];
          hmat[ai * nb + bi] = -dfp - dgq -
              p.ell_override(x, y, w, z, p.controls_a[ai], p.controls_b[bi]);
        }
      }
    }

    // min over b of max over a.
    double minmax = std::numeric_limits<double>::infinity();
    for (std::size_t bi = 0; bi < nb; ++bi) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t ai = 0; ai < na; ++ai) best = std::max(best, hmat[ai * nb + bi]);
      minmax = std::min(minmax, best);
    }
    double maxmin = -std::numeric_limits<double>::infinity();
    for (std::size_t ai = 0; ai < na; ++ai) {
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t bi = 0; bi < nb; ++bi) worst = std::min(worst, hmat[ai * nb + bi]);
      maxmin = std::max(maxmin, worst);
    }
    gap = std::max(gap, std::fabs(minmax - maxmin));
  }
  return gap;
}

ValidationReport validate_problem(const GameProblem& p, int samples_per_face,
                                  int isaacs_samples, std::uint64_t seed) {
  ValidationReport rep;
  rep.bounds = sample_bounds(p, 2048, seed);
  rep.controllability = validate_controllability(p, samples_per_face, seed);
  rep.invariance = validate_invariance(p, samples_per_face, seed);
  rep.isaacs_gap = check_isaacs_condition(p, isaacs_samples, seed);
  if (rep.isaacs_gap > 1e-9)
    rep.warnings.push_back(
        "Isaacs condition fails on samples (gap " + format_double(rep.isaacs_gap) +
        "); lower and upper values may differ");
  return rep;
}

}  // namespace thermoisaacs
