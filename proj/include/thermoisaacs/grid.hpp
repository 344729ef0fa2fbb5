#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "thermoisaacs/problem.hpp"

namespace thermoisaacs {

/// Sector order used everywhere a field stores one array per (w, z).
inline int sector_index(int w, int z) {
  return (w > 0 ? 2 : 0) + (z > 0 ? 1 : 0);
}

/// Convex interpolation weights of one point. `ids` are flat node ids local to
/// the sector block the weights were computed in; coefficients are >= 0 and
/// renormalized to sum to 1. Zero-weight corners are pruned, so a point on a
/// node yields a single entry.
struct InterpWeights {
  std::vector<std::int32_t> ids;
  std::vector<double> co;
  bool clamped = false;
};

/// Multilinear cell weights of point p over a tensor grid whose axis 0 is
/// restricted to [axis0_begin, axis0_end). p is clamped into the restricted
/// box; clamp_counter (optional) is incremented once per clamped query.
InterpWeights multilinear_weights(const std::vector<std::vector<double>>& axes,
                                  int axis0_begin, int axis0_end,
                                  std::span<const double> p,
                                  long* clamp_counter = nullptr);

/// Node-set view of one player's sector family plus the per-node control
/// admissibility and foot-point interpolation caches of the semi-Lagrangian
/// scheme. Immutable after build().
class SectorGrid {
 public:
  /// Classifies every sector node as switch (some control's foot point leaves
  /// the sector) or interior, precomputes admissible sets and foot weights,
  /// and runs the no-discrete-Zeno band guard h*max|f1| < rho_hi - rho_lo
  /// (likewise for g1 / eta). Axis 0 of each side must contain both thresholds
  /// as exact nodes. Throws DiscreteZenoViolation / InvalidArgument.
  static SectorGrid build(const GameProblem& p,
                          std::vector<std::vector<double>> axes_x,
                          std::vector<std::vector<double>> axes_y, double h);

  // -- shape ----------------------------------------------------------------
  double h() const { return h_; }
  const std::vector<std::vector<double>>& axes_x() const { return axes_x_; }
  const std::vector<std::vector<double>>& axes_y() const { return axes_y_; }
  int x_rest() const { return x_rest_; }  // product of x axis sizes beyond axis 0
  int y_rest() const { return y_rest_; }
  int x_axis0_begin(int w) const { return w > 0 ? x_lo_idx_ : 0; }
  int x_axis0_end(int w) const { return w > 0 ? int(axes_x_[0].size()) : x_hi_idx_ + 1; }
  int y_axis0_begin(int z) const { return z > 0 ? y_lo_idx_ : 0; }
  int y_axis0_end(int z) const { return z > 0 ? int(axes_y_[0].size()) : y_hi_idx_ + 1; }
  int x_local_count(int w) const { return (x_axis0_end(w) - x_axis0_begin(w)) * x_rest_; }
  int y_local_count(int z) const { return (y_axis0_end(z) - y_axis0_begin(z)) * y_rest_; }

  // Shift converting a flat local x id in sector w to the same node's flat
  // local id in sector -w. Valid only for nodes lying in both sectors.
  int x_cross_shift(int w) const { return (x_axis0_begin(w) - x_axis0_begin(-w)) * x_rest_; }
  int y_cross_shift(int z) const { return (y_axis0_begin(z) - y_axis0_begin(-z)) * y_rest_; }

  void x_node_coords(int w, int local, std::span<double> out) const;
  void y_node_coords(int z, int local, std::span<double> out) const;

  // -- classification ---------------------------------------------------------
  bool x_is_switch(int w, int local) const { return x_switch_[w > 0][local] != 0; }
  bool y_is_switch(int z, int local) const { return y_switch_[z > 0][local] != 0; }
  const std::vector<int>& x_switch_locals(int w) const { return x_switch_list_[w > 0]; }
  const std::vector<int>& y_switch_locals(int z) const { return y_switch_list_[z > 0]; }

  // -- admissible controls and foot weights ----------------------------------
  /// Indices into controls_a keeping the foot point's first coordinate inside
  /// the sector. Equals the full set at interior nodes. Throws
  /// EmptyAdmissibleSet when no control qualifies.
  std::vector<int> admissible_a(int w, int local) const;
  std::vector<int> admissible_b(int z, int local) const;

  bool a_admissible(int w, int local, int a) const {
    return x_corner_count(w, local, a) > 0;
  }
  bool b_admissible(int z, int local, int b) const {
    return y_corner_count(z, local, b) > 0;
  }

  /// Cached interpolation weights of the foot point x^i + h f(x^i, w, a),
  /// supported inside sector w. Throws InadmissibleControl.
  InterpWeights x_foot_weights(int w, int local, int a) const;
  InterpWeights y_foot_weights(int z, int local, int b) const;

  /// Both players' blocks at once, matching the scheme's tensor-product read.
  std::pair<InterpWeights, InterpWeights> foot_weights(int w, int z, int i_local,
                                                       int j_local, int a,
                                                       int b) const;

  // Raw cache access used by the solver's sweeps.
  int x_corner_count(int w, int local, int a) const {
    return x_foot_[w > 0].count[std::size_t(local) * na_ + a];
  }
  int y_corner_count(int z, int local, int b) const {
    return y_foot_[z > 0].count[std::size_t(local) * nb_ + b];
  }
  const std::int32_t* x_corner_ids(int w, int local, int a) const {
    return &x_foot_[w > 0].ids[(std::size_t(local) * na_ + a) * x_stride_];
  }
  const double* x_corner_co(int w, int local, int a) const {
    return &x_foot_[w > 0].co[(std::size_t(local) * na_ + a) * x_stride_];
  }
  const std::int32_t* y_corner_ids(int z, int local, int b) const {
    return &y_foot_[z > 0].ids[(std::size_t(local) * nb_ + b) * y_stride_];
  }
  const double* y_corner_co(int z, int local, int b) const {
    return &y_foot_[z > 0].co[(std::size_t(local) * nb_ + b) * y_stride_];
  }

  long clamp_count() const { return clamp_count_; }
  double max_f1() const { return max_f1_; }
  double max_g1() const { return max_g1_; }
  bool spacing_adjusted() const { return spacing_adjusted_; }

 private:
  struct FootTable {
    std::vector<std::uint8_t> count;  // [local * nctrl + ctrl]; 0 = inadmissible
    std::vector<std::int32_t> ids;    // fixed stride per (local, ctrl)
    std::vector<double> co;
  };

  double h_ = 0;
  std::vector<std::vector<double>> axes_x_, axes_y_;
  int x_rest_ = 1, y_rest_ = 1;
  int x_lo_idx_ = 0, x_hi_idx_ = 0, y_lo_idx_ = 0, y_hi_idx_ = 0;
  int na_ = 0, nb_ = 0;
  int x_stride_ = 1, y_stride_ = 1;  // 2^n, 2^m
  std::vector<std::uint8_t> x_switch_[2], y_switch_[2];
  std::vector<int> x_switch_list_[2], y_switch_list_[2];
  FootTable x_foot_[2], y_foot_[2];
  long clamp_count_ = 0;
  double max_f1_ = 0, max_g1_ = 0;
  bool spacing_adjusted_ = false;

  friend SectorGrid classify_nodes(const GameProblem&,
                                   std::vector<std::vector<double>>,
                                   std::vector<std::vector<double>>, double);
  friend SectorGrid build_grid(const GameProblem&, const GridSpec&);
};

/// Spec-shaped alias for SectorGrid::build.
SectorGrid classify_nodes(const GameProblem& p,
                          std::vector<std::vector<double>> axes_x,
                          std::vector<std::vector<double>> axes_y, double h);

/// Builds uniform axes from a GridSpec, forcing both thresholds onto axis 0 of
/// each side (existing nodes within 1e-12 are snapped, otherwise nodes are
/// inserted and the spacing_adjusted flag is set).
SectorGrid build_grid(const GameProblem& p, const GridSpec& spec);

/// Uniform axis helper, endpoints included.
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace thermoisaacs
