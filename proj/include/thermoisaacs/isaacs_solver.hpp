#pragma once

#include <array>
#include <limits>
#include <utility>
#include <vector>

#include "thermoisaacs/errors.hpp"
#include "thermoisaacs/grid.hpp"
#include "thermoisaacs/problem.hpp"

namespace thermoisaacs {

enum class ValueKind { Lower, Upper };
enum class Staging { Plain, Staged };
enum class DiscountForm { OneMinusLambdaH, ExpMinusLambdaH };

struct SolverConfig {
  ValueKind value_kind = ValueKind::Lower;
  Staging staging = Staging::Staged;
  double tol = 1e-8;
  int max_iter = 100000;
  DiscountForm discount_form = DiscountForm::OneMinusLambdaH;
  int threads = 1;
};

struct IterationStats {
  int iterations = 0;
  double final_residual = std::numeric_limits<double>::infinity();
  std::vector<double> contraction_factors;  // residual ratios, one per iteration from the second on
  long projection_count = 0;                // order-constraint chains re-sorted
  int last_projection_iteration = 0;        // 1-based; 0 when no projection ever fired
  bool converged = false;
};

struct MaxIterExceeded : Error {
  IterationStats stats;
  MaxIterExceeded(const std::string& msg, IterationStats s)
      : Error(msg), stats(std::move(s)) {}
};

/// One value array per sector (w, z), flat layout x_local * ny_local + y_local.
class ValueField {
 public:
  ValueField() = default;
  ValueField(const SectorGrid& g, double init);

  double at(int w, int z, int x_local, int y_local) const {
    return data[sector_index(w, z)][std::size_t(x_local) * ny_[z > 0] + y_local];
  }
  double& at(int w, int z, int x_local, int y_local) {
    return data[sector_index(w, z)][std::size_t(x_local) * ny_[z > 0] + y_local];
  }
  int ny_local(int z) const { return ny_[z > 0]; }
  int nx_local(int w) const { return nx_[w > 0]; }

  std::array<std::vector<double>, 4> data;

 private:
  int nx_[2] = {0, 0};
  int ny_[2] = {0, 0};
};

/// Max absolute entry difference across all sectors.
double field_sup_diff(const ValueField& a, const ValueField& b);

/// Fixed-point machinery for the staged semi-Lagrangian discretization of the
/// four boundary-coupled Isaacs problems.
class IsaacsSolver {
 public:
  /// Precomputes cost tables and corner bookkeeping. Throws EmptyAdmissibleSet
  /// when some node has no admissible control, InvalidArgument when
  /// lambda*h >= 1 under the 1 - lambda*h discount.
  IsaacsSolver(const GameProblem& p, const SectorGrid& g, SolverConfig cfg);

  double discount() const { return d_; }
  double cost_min() const { return cost_min_; }
  double cost_max() const { return cost_max_; }
  double initial_value() const { return cost_min_ / problem_->lambda; }
  const SolverConfig& config() const { return cfg_; }
  const SectorGrid& grid() const { return *grid_; }

  /// Discrete one-step value at a single cell: outer/inner optimization of
  /// d * (tensor interpolation at the foot points) + h * ell over the
  /// admissible control sets. Lower kind: max over b of min over a; upper
  /// kind: min over a of max over b. No boundary row rules applied.
  double local_isaacs(const ValueField& v, int w, int z, int x_local,
                      int y_local) const;

  /// One Jacobi sweep of the coupled map: interior cells take the local value,
  /// x-switch rows min against the (-w, z) exit value, y-switch rows max
  /// against (w, -z), double-switch corners take the median of
  /// {(w,-z) value, local value, (-w,z) value}.
  ValueField apply_S(const ValueField& v) const;

  /// Three-stage variant: stages 2 and 3 recompute only the corner cells,
  /// replacing the exit-value candidates with the previous stage's images
  /// while the local candidate keeps reading the original field.
  ValueField apply_staged(const ValueField& v) const;

  /// Enforces the exit-value compatibility chain
  /// v^(w,-z) <= v^(-w,-z) <= v^(-w,z) at double-switch nodes by sorting each
  /// violated triple. Returns the projected field; adds the number of
  /// violated chains to *projections when given. Idempotent.
  ValueField project_order(const ValueField& v, long* projections = nullptr) const;

  /// Checks the chain without modifying anything.
  bool order_chain_holds(const ValueField& v, double tol = 0.0) const;

  /// Iterates project_order(map(.)) from the constant field min ell / lambda
  /// until the sup-norm residual drops to cfg.tol. The projection only sorts
  /// triples violated by more than the current sweep residual; smaller
  /// violations are one-iteration lag in the cross-sector copies, not
  /// genuine escapes from the ordered domain. Throws MaxIterExceeded
  /// (stats attached) when cfg.max_iter is reached first.
  std::pair<ValueField, IterationStats> solve() const;

 private:
  struct CornerCell {
    int x_local;  // in the cell's own sector
    int y_local;
    double ival;  // scratch: local value captured during the sweep
  };
  struct ChainRef {
    // value addresses of (w,-z), (-w,-z), (-w,z) at one double-switch node
    int s1, s2, s3;
    std::size_t o1, o2, o3;
  };

  const GameProblem* problem_;
  const SectorGrid* grid_;
  SolverConfig cfg_;
  double d_ = 0;
  double h_ = 0;
  int na_ = 0, nb_ = 0;
  double cost_min_ = 0, cost_max_ = 0;
  std::array<std::vector<double>, 4> cost_;  // [cell * na * nb + a * nb + b]
  std::array<std::vector<CornerCell>, 4> corners_;
  std::array<std::vector<int>, 4> corner_lookup_;  // cell -> corner list index, -1 otherwise
  std::array<std::vector<ChainRef>, 4> chains_;    // keyed by the (w,z) of the constraint

  void sweep(const ValueField& in, ValueField& out,
             std::array<std::vector<CornerCell>, 4>* corner_capture) const;
  void staged_corner_passes(const ValueField& in, ValueField& out,
                            std::array<std::vector<CornerCell>, 4>& corners) const;
  // Sorts chain triples violated by more than slack. solve() passes the
  // current sweep residual: cross-sector copies lag their source by one
  // iteration, so transient violations up to the residual are not escapes
  // from the ordered domain and sorting them would fight the sweep.
  long project_in_place(ValueField& v, double slack) const;
  void check_bounds(const ValueField& v) const;
};

}  // namespace thermoisaacs
