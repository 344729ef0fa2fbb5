#include "thermoisaacs/grid.hpp"

#include <algorithm>
#include <cmath>

#include "thermoisaacs/errors.hpp"
#include "thermoisaacs/util.hpp"

namespace thermoisaacs {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    v[std::size_t(k)] = lo + (hi - lo) * double(k) / double(count - 1);
  v.front() = lo;
  v.back() = hi;
  return v;
}

InterpWeights multilinear_weights(const std::vector<std::vector<double>>& axes,
                                  int axis0_begin, int axis0_end,
                                  std::span<const double> p, long* clamp_counter) {
  const int dims = int(axes.size());
  InterpWeights out;
  bool clamped = false;

  // Per-axis (index, weight) pairs, zero-weight corners pruned.
  struct AxisPart {
    int idx[2];
    double wgt[2];
    int count;
  };
  std::vector<AxisPart> parts(static_cast<std::size_t>(dims));

  for (int k = 0; k < dims; ++k) {
    const auto& ax = axes[std::size_t(k)];
    const int rb = (k == 0) ? axis0_begin : 0;
    const int re = (k == 0) ? axis0_end : int(ax.size());
    double v = p[std::size_t(k)];
    if (v < ax[std::size_t(rb)]) {
      v = ax[std::size_t(rb)];
      clamped = true;
    }
    if (v > ax[std::size_t(re - 1)]) {
      v = ax[std::size_t(re - 1)];
      clamped = true;
    }
    AxisPart& part = parts[std::size_t(k)];
    if (re - rb == 1) {
      part.idx[0] = rb;
      part.wgt[0] = 1.0;
      part.count = 1;
    } else {
      auto it = std::upper_bound(ax.begin() + rb, ax.begin() + re, v);
      int cell = int(it - ax.begin()) - 1;
      cell = std::clamp(cell, rb, re - 2);
      const double lo = ax[std::size_t(cell)], hi = ax[std::size_t(cell) + 1];
      const double t = (v - lo) / (hi - lo);
      if (t <= 0.0) {
        part.idx[0] = cell;
        part.wgt[0] = 1.0;
        part.count = 1;
      } else if (t >= 1.0) {
        part.idx[0] = cell + 1;
        part.wgt[0] = 1.0;
        part.count = 1;
      } else {
        part.idx[0] = cell;
        part.wgt[0] = 1.0 - t;
        part.idx[1] = cell + 1;
        part.wgt[1] = t;
        part.count = 2;
      }
    }
  }

  // Strides of the flat local layout (axis 0 local to [axis0_begin, .)).
  std::vector<std::size_t> stride(static_cast<std::size_t>(dims));
  std::size_t s = 1;
  for (int k = dims - 1; k >= 0; --k) {
    stride[std::size_t(k)] = s;
    s *= std::size_t((k == 0) ? (axis0_end - axis0_begin) : int(axes[std::size_t(k)].size()));
  }

  // Tensor product of the axis parts.
  std::vector<int> pick(static_cast<std::size_t>(dims), 0);
  double total = 0;
  while (true) {
    std::size_t id = 0;
    double w = 1;
    for (int k = 0; k < dims; ++k) {
      const AxisPart& part = parts[std::size_t(k)];
      int gi = part.idx[pick[std::size_t(k)]];
      int li = (k == 0) ? gi - axis0_begin : gi;
      id += std::size_t(li) * stride[std::size_t(k)];
      w *= part.wgt[pick[std::size_t(k)]];
    }
    out.ids.push_back(std::int32_t(id));
    out.co.push_back(w);
    total += w;
    int k = dims - 1;
    while (k >= 0) {
      if (++pick[std::size_t(k)] < parts[std::size_t(k)].count) break;
      pick[std::size_t(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }

  for (double& w : out.co) w /= total;
  out.clamped = clamped;
  if (clamped && clamp_counter) ++*clamp_counter;
  return out;
}

namespace {

int exact_index_of(const std::vector<double>& axis, double v, const char* what) {
  auto it = std::find(axis.begin(), axis.end(), v);
  if (it == axis.end())
    throw InvalidArgument(std::string(what) + " " + format_double(v) +
                          " must be an exact grid node on axis 1");
  return int(it - axis.begin());
}

void check_axes(const std::vector<std::vector<double>>& axes, const char* side) {
  if (axes.empty()) throw InvalidArgument(std::string(side) + " axes missing");
  for (const auto& ax : axes) {
    if (ax.size() < 2)
      throw InvalidArgument(std::string(side) + " axes need at least two nodes");
    for (std::size_t k = 1; k < ax.size(); ++k)
      if (!(ax[k] > ax[k - 1]))
        throw InvalidArgument(std::string(side) + " axis nodes must increase strictly");
  }
}

}  // namespace

SectorGrid SectorGrid::build(const GameProblem& p,
                             std::vector<std::vector<double>> axes_x,
                             std::vector<std::vector<double>> axes_y, double h) {
  if (!(h > 0)) throw InvalidArgument("h must be positive");
  if (int(axes_x.size()) != p.n || int(axes_y.size()) != p.m)
    throw InvalidArgument("axis count must match state dimensions");
  check_axes(axes_x, "x");
  check_axes(axes_y, "y");

  SectorGrid g;
  g.h_ = h;
  g.axes_x_ = std::move(axes_x);
  g.axes_y_ = std::move(axes_y);
  g.x_lo_idx_ = exact_index_of(g.axes_x_[0], p.rho.lo, "threshold rho_lo");
  g.x_hi_idx_ = exact_index_of(g.axes_x_[0], p.rho.hi, "threshold rho_hi");
  g.y_lo_idx_ = exact_index_of(g.axes_y_[0], p.eta.lo, "threshold eta_lo");
  g.y_hi_idx_ = exact_index_of(g.axes_y_[0], p.eta.hi, "threshold eta_hi");
  if (g.x_lo_idx_ >= g.x_hi_idx_ || g.y_lo_idx_ >= g.y_hi_idx_)
    throw InvalidArgument("threshold order broken on the grid");

  g.x_rest_ = 1;
  for (std::size_t k = 1; k < g.axes_x_.size(); ++k) g.x_rest_ *= int(g.axes_x_[k].size());
  g.y_rest_ = 1;
  for (std::size_t k = 1; k < g.axes_y_.size(); ++k) g.y_rest_ *= int(g.axes_y_[k].size());

  g.na_ = int(p.controls_a.size());
  g.nb_ = int(p.controls_b.size());
  g.x_stride_ = 1 << p.n;
  g.y_stride_ = 1 << p.m;

  // One side at a time; identical logic for x/w/f/a and y/z/g/b.
  auto build_side = [&g](const std::vector<std::vector<double>>& axes, int rest,
                         int lo_idx, int hi_idx, const DynFn& dyn,
                         const std::vector<std::vector<double>>& ctrls, int stride,
                         std::vector<std::uint8_t>* switch_flags,
                         std::vector<int>* switch_lists, FootTable* tables,
                         double* max_first) {
    const int dim = int(axes.size());
    const int nctrl = int(ctrls.size());
    std::vector<double> node(static_cast<std::size_t>(dim)), foot(static_cast<std::size_t>(dim)), vel(static_cast<std::size_t>(dim));
    for (int side = 0; side < 2; ++side) {
      const int mode = side == 0 ? -1 : 1;
      const int begin = mode > 0 ? lo_idx : 0;
      const int end = mode > 0 ? int(axes[0].size()) : hi_idx + 1;
      const double thr_lo = axes[0][std::size_t(lo_idx)];
      const double thr_hi = axes[0][std::size_t(hi_idx)];
      const int locals = (end - begin) * rest;
      switch_flags[side].assign(std::size_t(locals), 0);
      tables[side].count.assign(std::size_t(locals) * std::size_t(nctrl), 0);
      tables[side].ids.assign(std::size_t(locals) * std::size_t(nctrl) * std::size_t(stride), 0);
      tables[side].co.assign(std::size_t(locals) * std::size_t(nctrl) * std::size_t(stride), 0.0);
      for (int local = 0; local < locals; ++local) {
        // Decode the multi-index (axis 0 slowest, last axis fastest).
        const int a0 = begin + local / rest;
        node[0] = axes[0][std::size_t(a0)];
        int rem = local % rest;
        for (int k = dim - 1; k >= 1; --k) {
          int sz = int(axes[std::size_t(k)].size());
          node[std::size_t(k)] = axes[std::size_t(k)][std::size_t(rem % sz)];
          rem /= sz;
        }
        bool any_exit = false;
        for (int c = 0; c < nctrl; ++c) {
          dyn(node, mode, ctrls[std::size_t(c)], vel);
          *max_first = std::max(*max_first, std::fabs(vel[0]));
          for (int k = 0; k < dim; ++k) foot[std::size_t(k)] = node[std::size_t(k)] + g.h_ * vel[std::size_t(k)];
          const bool stays = mode > 0 ? foot[0] >= thr_lo : foot[0] <= thr_hi;
          if (!stays) {
            any_exit = true;
            continue;  // count stays 0 = inadmissible
          }
          InterpWeights iw = multilinear_weights(axes, begin, end, foot, &g.clamp_count_);
          const std::size_t base = (std::size_t(local) * std::size_t(nctrl) + std::size_t(c)) * std::size_t(stride);
          tables[side].count[std::size_t(local) * std::size_t(nctrl) + std::size_t(c)] =
              std::uint8_t(iw.ids.size());
          for (std::size_t e = 0; e < iw.ids.size(); ++e) {
            tables[side].ids[base + e] = iw.ids[e];
            tables[side].co[base + e] = iw.co[e];
          }
        }
        if (any_exit) {
          switch_flags[side][std::size_t(local)] = 1;
          switch_lists[side].push_back(local);
        }
      }
    }
  };

  build_side(g.axes_x_, g.x_rest_, g.x_lo_idx_, g.x_hi_idx_, p.f, p.controls_a,
             g.x_stride_, g.x_switch_, g.x_switch_list_, g.x_foot_, &g.max_f1_);
  build_side(g.axes_y_, g.y_rest_, g.y_lo_idx_, g.y_hi_idx_, p.g, p.controls_b,
             g.y_stride_, g.y_switch_, g.y_switch_list_, g.y_foot_, &g.max_g1_);

  // No-discrete-Zeno band guard: one step may never span a whole hysteresis
  // band, otherwise switch nodes are not contained in the opposite sector and
  // the exit values of the coupled scheme stop being well-defined.
  const double band_x = p.rho.hi - p.rho.lo;
  const double band_y = p.eta.hi - p.eta.lo;
  if (h * g.max_f1_ >= band_x)
    throw DiscreteZenoViolation("h * max|f1| = " + format_double(h * g.max_f1_) +
                                " >= band width " + format_double(band_x));
  if (h * g.max_g1_ >= band_y)
    throw DiscreteZenoViolation("h * max|g1| = " + format_double(h * g.max_g1_) +
                                " >= band width " + format_double(band_y));
  return g;
}

void SectorGrid::x_node_coords(int w, int local, std::span<double> out) const {
  int a0 = x_axis0_begin(w) + local / x_rest_;
  out[0] = axes_x_[0][std::size_t(a0)];
  int rem = local % x_rest_;
  for (int k = int(axes_x_.size()) - 1; k >= 1; --k) {
    int sz = int(axes_x_[std::size_t(k)].size());
    out[std::size_t(k)] = axes_x_[std::size_t(k)][std::size_t(rem % sz)];
    rem /= sz;
  }
}

void SectorGrid::y_node_coords(int z, int local, std::span<double> out) const {
  int a0 = y_axis0_begin(z) + local / y_rest_;
  out[0] = axes_y_[0][std::size_t(a0)];
  int rem = local % y_rest_;
  for (int k = int(axes_y_.size()) - 1; k >= 1; --k) {
    int sz = int(axes_y_[std::size_t(k)].size());
    out[std::size_t(k)] = axes_y_[std::size_t(k)][std::size_t(rem % sz)];
    rem /= sz;
  }
}

std::vector<int> SectorGrid::admissible_a(int w, int local) const {
  std::vector<int> out;
  for (int a = 0; a < na_; ++a)
    if (x_corner_count(w, local, a) > 0) out.push_back(a);
  if (out.empty())
    throw EmptyAdmissibleSet("no admissible control for player X at a node of sector w=" +
                             std::to_string(w));
  return out;
}

std::vector<int> SectorGrid::admissible_b(int z, int local) const {
  std::vector<int> out;
  for (int b = 0; b < nb_; ++b)
    if (y_corner_count(z, local, b) > 0) out.push_back(b);
  if (out.empty())
    throw EmptyAdmissibleSet("no admissible control for player Y at a node of sector z=" +
                             std::to_string(z));
  return out;
}

InterpWeights SectorGrid::x_foot_weights(int w, int local, int a) const {
  const int cnt = x_corner_count(w, local, a);
  if (cnt == 0)
    throw InadmissibleControl("control " + std::to_string(a) +
                              " leaves sector w=" + std::to_string(w));
  InterpWeights out;
  const auto* ids = x_corner_ids(w, local, a);
  const auto* co = x_corner_co(w, local, a);
  out.ids.assign(ids, ids + cnt);
  out.co.assign(co, co + cnt);
  return out;
}

InterpWeights SectorGrid::y_foot_weights(int z, int local, int b) const {
  const int cnt = y_corner_count(z, local, b);
  if (cnt == 0)
    throw InadmissibleControl("control " + std::to_string(b) +
                              " leaves sector z=" + std::to_string(z));
  InterpWeights out;
  const auto* ids = y_corner_ids(z, local, b);
  const auto* co = y_corner_co(z, local, b);
  out.ids.assign(ids, ids + cnt);
  out.co.assign(co, co + cnt);
  return out;
}

std::pair<InterpWeights, InterpWeights> SectorGrid::foot_weights(
    int w, int z, int i_local, int j_local, int a, int b) const {
  return {x_foot_weights(w, i_local, a), y_foot_weights(z, j_local, b)};
}

SectorGrid classify_nodes(const GameProblem& p,
                          std::vector<std::vector<double>> axes_x,
                          std::vector<std::vector<double>> axes_y, double h) {
  return SectorGrid::build(p, std::move(axes_x), std::move(axes_y), h);
}

SectorGrid build_grid(const GameProblem& p, const GridSpec& spec) {
  if (int(spec.nx.size()) != p.n || int(spec.ny.size()) != p.m)
    throw InvalidArgument("grid spec does not match problem dimensions");
  bool adjusted = false;
  auto make_axes = [&adjusted](const std::vector<std::array<double, 2>>& box,
                               const std::vector<int>& counts, double lo_thr,
                               double hi_thr) {
    std::vector<std::vector<double>> axes;
    for (std::size_t k = 0; k < box.size(); ++k)
      axes.push_back(linspace(box[k][0], box[k][1], counts[k]));
    for (double thr : {lo_thr, hi_thr}) {
      auto& ax = axes[0];
      auto it = std::lower_bound(ax.begin(), ax.end(), thr);
      double nearest = (it != ax.end()) ? *it : ax.back();
      if (it != ax.begin() && thr - *(it - 1) < nearest - thr) {
        nearest = *(it - 1);
        --it;
      }
      const double scale = std::max(1.0, std::fabs(thr));
      if (std::fabs(nearest - thr) <= 1e-12 * scale) {
        *it = thr;  // snap
      } else {
        ax.insert(std::upper_bound(ax.begin(), ax.end(), thr), thr);
        adjusted = true;
      }
    }
    return axes;
  };
  auto axes_x = make_axes(p.qx, spec.nx, p.rho.lo, p.rho.hi);
  auto axes_y = make_axes(p.qy, spec.ny, p.eta.lo, p.eta.hi);
  SectorGrid g = SectorGrid::build(p, std::move(axes_x), std::move(axes_y), spec.h);
  g.spacing_adjusted_ = adjusted;
  return g;
}

}  // namespace thermoisaacs
