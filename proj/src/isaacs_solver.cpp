#include "thermoisaacs/isaacs_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "thermoisaacs/util.hpp"

namespace thermoisaacs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

const int kModes[2] = {-1, 1};

}  // namespace

ValueField::ValueField(const SectorGrid& g, double init) {
  for (int side = 0; side < 2; ++side) {
    nx_[side] = g.x_local_count(kModes[side]);
    ny_[side] = g.y_local_count(kModes[side]);
  }
  for (int w : kModes)
    for (int z : kModes)
      data[sector_index(w, z)].assign(
          std::size_t(nx_[w > 0]) * std::size_t(ny_[z > 0]), init);
}

double field_sup_diff(const ValueField& a, const ValueField& b) {
  double sup = 0;
  for (int s = 0; s < 4; ++s) {
    if (a.data[s].size() != b.data[s].size())
      throw InvalidArgument("fields live on different grids");
    for (std::size_t k = 0; k < a.data[s].size(); ++k)
      sup = std::max(sup, std::fabs(a.data[s][k] - b.data[s][k]));
  }
  return sup;
}

IsaacsSolver::IsaacsSolver(const GameProblem& p, const SectorGrid& g,
                           SolverConfig cfg)
    : problem_(&p), grid_(&g), cfg_(cfg) {
  h_ = g.h();
  na_ = int(p.controls_a.size());
  nb_ = int(p.controls_b.size());
  cfg_.threads = resolve_threads(cfg_.threads);
  if (cfg_.discount_form == DiscountForm::OneMinusLambdaH) {
    if (p.lambda * h_ >= 1.0)
      throw InvalidArgument("lambda * h = " + format_double(p.lambda * h_) +
                            " must stay below 1 for the 1 - lambda*h discount");
    d_ = 1.0 - p.lambda * h_;
  } else {
    d_ = std::exp(-p.lambda * h_);
  }
  if (!(cfg_.tol > 0)) throw InvalidArgument("tolerance must be positive");
  if (cfg_.max_iter < 1) throw InvalidArgument("max_iter must be at least 1");

  // Every node needs at least one admissible control; fail construction, not
  // the sweep, when the problem starves a node.
  for (int w : kModes)
    for (int xl = 0; xl < g.x_local_count(w); ++xl) (void)g.admissible_a(w, xl);
  for (int z : kModes)
    for (int yl = 0; yl < g.y_local_count(z); ++yl) (void)g.admissible_b(z, yl);

  cost_min_ = kInf;
  cost_max_ = -kInf;
  std::vector<double> xc(static_cast<std::size_t>(p.n)), yc(static_cast<std::size_t>(p.m));
  for (int w : kModes) {
    for (int z : kModes) {
      const int s = sector_index(w, z);
      const int nxl = g.x_local_count(w);
      const int nyl = g.y_local_count(z);
      cost_[s].resize(std::size_t(nxl) * std::size_t(nyl) * std::size_t(na_) *
                      std::size_t(nb_));
      corner_lookup_[s].assign(std::size_t(nxl) * std::size_t(nyl), -1);
      for (int xl = 0; xl < nxl; ++xl) {
        g.x_node_coords(w, xl, xc);
        const bool xs = g.x_is_switch(w, xl);
        for (int yl = 0; yl < nyl; ++yl) {
          g.y_node_coords(z, yl, yc);
          const std::size_t cell = std::size_t(xl) * std::size_t(nyl) + std::size_t(yl);
          double* slot = &cost_[s][cell * std::size_t(na_) * std::size_t(nb_)];
          for (int a = 0; a < na_; ++a)
            for (int b = 0; b < nb_; ++b) {
              const double c = p.ell_total(xc, yc, w, z, p.controls_a[std::size_t(a)],
                                           p.controls_b[std::size_t(b)]);
              slot[std::size_t(a) * std::size_t(nb_) + std::size_t(b)] = c;
              cost_min_ = std::min(cost_min_, c);
              cost_max_ = std::max(cost_max_, c);
            }
          if (xs && g.y_is_switch(z, yl)) {
            corner_lookup_[s][cell] = int(corners_[s].size());
            corners_[s].push_back({xl, yl, 0.0});
          }
        }
      }
    }
  }

  // Exit-value compatibility chains, one per double-switch node. The band
  // guard run at grid build time puts every switch node inside the opposite
  // sector, so all cross-sector addresses below are in range.
  for (int w : kModes) {
    for (int z : kModes) {
      const int s = sector_index(w, z);
      const int xshift = g.x_cross_shift(w);
      const int yshift = g.y_cross_shift(z);
      const int ny_same = g.y_local_count(z);
      const int ny_flip = g.y_local_count(-z);
      for (const CornerCell& c : corners_[s]) {
        ChainRef ref;
        ref.s1 = sector_index(w, -z);
        ref.o1 = std::size_t(c.x_local) * std::size_t(ny_flip) +
                 std::size_t(c.y_local + yshift);
        ref.s2 = sector_index(-w, -z);
        ref.o2 = std::size_t(c.x_local + xshift) * std::size_t(ny_flip) +
                 std::size_t(c.y_local + yshift);
        ref.s3 = sector_index(-w, z);
        ref.o3 = std::size_t(c.x_local + xshift) * std::size_t(ny_same) +
                 std::size_t(c.y_local);
        chains_[s].push_back(ref);
      }
    }
  }
}

double IsaacsSolver::local_isaacs(const ValueField& v, int w, int z,
                                  int x_local, int y_local) const {
  const SectorGrid& g = *grid_;
  const int s = sector_index(w, z);
  const int nyl = v.ny_local(z);
  const double* V = v.data[s].data();
  const double* cost =
      &cost_[s][(std::size_t(x_local) * std::size_t(nyl) + std::size_t(y_local)) *
                std::size_t(na_) * std::size_t(nb_)];

  auto interp = [&](int a, int b) {
    const int cx = g.x_corner_count(w, x_local, a);
    const std::int32_t* xi = g.x_corner_ids(w, x_local, a);
    const double* xco = g.x_corner_co(w, x_local, a);
    const int cy = g.y_corner_count(z, y_local, b);
    const std::int32_t* yi = g.y_corner_ids(z, y_local, b);
    const double* yco = g.y_corner_co(z, y_local, b);
    double acc = 0;
    for (int e = 0; e < cx; ++e) {
      const double* row = V + std::size_t(xi[e]) * std::size_t(nyl);
      double racc = 0;
      for (int q = 0; q < cy; ++q) racc += yco[q] * row[yi[q]];
      acc += xco[e] * racc;
    }
    return acc;
  };

  if (cfg_.value_kind == ValueKind::Lower) {
    double outer = -kInf;
    for (int b = 0; b < nb_; ++b) {
      if (!g.b_admissible(z, y_local, b)) continue;
      double inner = kInf;
      for (int a = 0; a < na_; ++a) {
        if (!g.a_admissible(w, x_local, a)) continue;
        const double val = d_ * interp(a, b) +
                           h_ * cost[std::size_t(a) * std::size_t(nb_) + std::size_t(b)];
        inner = std::min(inner, val);
      }
      outer = std::max(outer, inner);
    }
    return outer;
  }
  double outer = kInf;
  for (int a = 0; a < na_; ++a) {
    if (!g.a_admissible(w, x_local, a)) continue;
    double inner = -kInf;
    for (int b = 0; b < nb_; ++b) {
      if (!g.b_admissible(z, y_local, b)) continue;
      const double val = d_ * interp(a, b) +
                         h_ * cost[std::size_t(a) * std::size_t(nb_) + std::size_t(b)];
      inner = std::max(inner, val);
    }
    outer = std::min(outer, inner);
  }
  return outer;
}

void IsaacsSolver::sweep(const ValueField& in, ValueField& out,
                         std::array<std::vector<CornerCell>, 4>* corner_capture) const {
  const SectorGrid& g = *grid_;
  for (int w : kModes) {
    for (int z : kModes) {
      const int s = sector_index(w, z);
      const int nxl = g.x_local_count(w);
      const int nyl = g.y_local_count(z);
      const int xshift = g.x_cross_shift(w);
      const int yshift = g.y_cross_shift(z);
      if (corner_capture) (*corner_capture)[s] = corners_[s];
      parallel_chunks(std::size_t(nxl), cfg_.threads, [&](int, std::size_t rb, std::size_t re) {
        for (std::size_t xr = rb; xr < re; ++xr) {
          const int xl = int(xr);
          const bool xs = g.x_is_switch(w, xl);
          for (int yl = 0; yl < nyl; ++yl) {
            const bool ys = g.y_is_switch(z, yl);
            const double ival = local_isaacs(in, w, z, xl, yl);
            double res;
            if (xs && ys) {
              const double v1 = in.at(w, -z, xl, yl + yshift);
              const double v3 = in.at(-w, z, xl + xshift, yl);
              res = median3(v1, ival, v3);
              if (corner_capture) {
                const int ci = corner_lookup_[s][std::size_t(xl) * std::size_t(nyl) + std::size_t(yl)];
                (*corner_capture)[s][std::size_t(ci)].ival = ival;
              }
            } else if (xs) {
              res = std::min(in.at(-w, z, xl + xshift, yl), ival);
            } else if (ys) {
              res = std::max(in.at(w, -z, xl, yl + yshift), ival);
            } else {
              res = ival;
            }
            out.at(w, z, xl, yl) = res;
          }
        }
      });
    }
  }
}

ValueField IsaacsSolver::apply_S(const ValueField& v) const {
  ValueField out(*grid_, 0.0);
  sweep(v, out, nullptr);
  return out;
}

void IsaacsSolver::staged_corner_passes(
    const ValueField& in, ValueField& out,
    std::array<std::vector<CornerCell>, 4>& corners) const {
  (void)in;  // corner ivals were captured from it during the first stage
  const SectorGrid& g = *grid_;
  std::array<std::vector<double>, 4> fresh;
  for (int w : kModes) {
    for (int z : kModes) {
      const int s = sector_index(w, z);
      const int xshift = g.x_cross_shift(w);
      const int yshift = g.y_cross_shift(z);
      fresh[s].resize(corners[s].size());
      for (std::size_t k = 0; k < corners[s].size(); ++k) {
        const CornerCell& c = corners[s][k];
        const double v1 = out.at(w, -z, c.x_local, c.y_local + yshift);
        const double v3 = out.at(-w, z, c.x_local + xshift, c.y_local);
        fresh[s][k] = median3(v1, c.ival, v3);
      }
    }
  }
  for (int w : kModes)
    for (int z : kModes) {
      const int s = sector_index(w, z);
      for (std::size_t k = 0; k < corners[s].size(); ++k)
        out.at(w, z, corners[s][k].x_local, corners[s][k].y_local) = fresh[s][k];
    }
}

ValueField IsaacsSolver::apply_staged(const ValueField& v) const {
  ValueField out(*grid_, 0.0);
  std::array<std::vector<CornerCell>, 4> corners;
  sweep(v, out, &corners);
  staged_corner_passes(v, out, corners);
  staged_corner_passes(v, out, corners);
  return out;
}

long IsaacsSolver::project_in_place(ValueField& v, double slack) const {
  long violated = 0;
  for (int s = 0; s < 4; ++s) {
    for (const ChainRef& c : chains_[s]) {
      double& v1 = v.data[std::size_t(c.s1)][c.o1];
      double& v2 = v.data[std::size_t(c.s2)][c.o2];
      double& v3 = v.data[std::size_t(c.s3)][c.o3];
      if (v1 <= v2 + slack && v2 <= v3 + slack) continue;
      double lo = v1, mid = v2, hi = v3;
      if (lo > mid) std::swap(lo, mid);
      if (mid > hi) std::swap(mid, hi);
      if (lo > mid) std::swap(lo, mid);
      v1 = lo;
      v2 = mid;
      v3 = hi;
      ++violated;
    }
  }
  return violated;
}

ValueField IsaacsSolver::project_order(const ValueField& v, long* projections) const {
  ValueField out = v;
  const long violated = project_in_place(out, 0.0);
  if (projections) *projections += violated;
  return out;
}

bool IsaacsSolver::order_chain_holds(const ValueField& v, double tol) const {
  for (int s = 0; s < 4; ++s)
    for (const ChainRef& c : chains_[s]) {
      const double v1 = v.data[std::size_t(c.s1)][c.o1];
      const double v2 = v.data[std::size_t(c.s2)][c.o2];
      const double v3 = v.data[std::size_t(c.s3)][c.o3];
      if (v1 > v2 + tol || v2 > v3 + tol) return false;
    }
  return true;
}

void IsaacsSolver::check_bounds(const ValueField& v) const {
  const double lambda = problem_->lambda;
  const double hi_gain = std::max(1.0 / lambda, h_ / (1.0 - d_));
  const double lo = std::min(cost_min_ / lambda, cost_min_ * hi_gain);
  const double hi = std::max(cost_max_ / lambda, cost_max_ * hi_gain);
  const double eps = 1e-9 * std::max(1.0, std::max(std::fabs(lo), std::fabs(hi)));
  for (int s = 0; s < 4; ++s)
    for (double val : v.data[s])
      if (!(val >= lo - eps && val <= hi + eps))
        throw Error("internal: converged value " + format_double(val) +
                    " escapes [" + format_double(lo) + ", " + format_double(hi) + "]");
}

std::pair<ValueField, IterationStats> IsaacsSolver::solve() const {
  ValueField v(*grid_, initial_value());
  IterationStats st;
  double prev_res = kInf;
  for (int iter = 1; iter <= cfg_.max_iter; ++iter) {
    ValueField next =
        cfg_.staging == Staging::Staged ? apply_staged(v) : apply_S(v);
    // Switch and corner rows copy cross-sector values read from the previous
    // iterate, so they lag their source by exactly one sweep. A chain triple
    // whose fresh interior member moved past a lagged copy is therefore
    // "violated" by at most the sweep residual; sorting those transient
    // triples would cancel the sweep's own progress and can lock the
    // iteration onto a spurious stationary point. Only a violation larger
    // than the sweep residual is a genuine escape from the ordered domain.
    const double sweep_res = field_sup_diff(next, v);
    const long violated = project_in_place(next, sweep_res);
    if (violated > 0) {
      st.projection_count += violated;
      st.last_projection_iteration = iter;
    }
    const double res = field_sup_diff(next, v);
    if (iter >= 2 && prev_res > 0 && prev_res < kInf)
      st.contraction_factors.push_back(res / prev_res);
    prev_res = res;
    v = std::move(next);
    st.iterations = iter;
    st.final_residual = res;
    if (res <= cfg_.tol) {
      st.converged = true;
      break;
    }
  }
  if (!st.converged)
    throw MaxIterExceeded("no fixed point after " + std::to_string(cfg_.max_iter) +
                              " iterations (residual " +
                              format_double(st.final_residual) + ")",
                          st);
  check_bounds(v);
  return {std::move(v), st};
}

}  // namespace thermoisaacs
