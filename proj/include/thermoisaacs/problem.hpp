#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "thermoisaacs/relay.hpp"

namespace thermoisaacs {

using DynFn = std::function<void(std::span<const double> state, int mode,
                                 std::span<const double> ctrl,
                                 std::span<double> out)>;
using CostFn = std::function<double(std::span<const double> x,
                                    std::span<const double> y, int w, int z,
                                    std::span<const double> ctrl)>;
using CoupledCostFn = std::function<double(std::span<const double> x,
                                           std::span<const double> y, int w,
                                           int z, std::span<const double> a,
                                           std::span<const double> b)>;

/// One player's dynamics, either per-mode affine data
/// f(x, w, a) = c_w + D_w x + E_w a, or one expression per component.
struct DynamicsSpec {
  enum class Kind { Affine, Expression } kind = Kind::Expression;

  struct AffineMode {
    std::vector<double> c;               // length n
    std::vector<std::vector<double>> D;  // n x n
    std::vector<std::vector<double>> E;  // n x ctrl_dim
  };
  AffineMode affine_minus, affine_plus;  // keyed by mode -1 / +1

  std::vector<std::string> components;  // Kind::Expression

  // Compiles to a callable. `state_dim`/`ctrl_dim` fix the slot layout; `who`
  // selects variable names (x1.., w, a1.. for the first player, y1.., z, b1..
  // for the second).
  DynFn compile(int state_dim, int ctrl_dim, char who) const;
};

/// Scalar running-cost term given as an expression over x1..xn, y1..ym, w, z
/// and one player's control.
struct CostSpec {
  std::string expr;
  CostFn compile(int n, int m, int ctrl_dim, char who) const;
};

/// Requested grid: node counts per axis plus the scheme's time step.
struct GridSpec {
  std::vector<int> nx;
  std::vector<int> ny;
  double h = 0.1;
};

/// Zero-sum differential game with delayed thermostatic switching.
/// The first player (control a, state x, mode w) minimizes; the second
/// (b, y, z) maximizes. Running cost ell1(x,y,w,z,a) + ell2(x,y,w,z,b).
struct GameProblem {
  int n = 1;
  int m = 1;
  RelayConfig rho;  // thresholds driving w from x1
  RelayConfig eta;  // thresholds driving z from y1
  double lambda = 1.0;

  DynFn f;
  DynFn g;
  CostFn ell1;
  CostFn ell2;

  // Optional coupled running cost replacing ell1 + ell2. Never set by problem
  // files; extension point for experiments and for exercising the Isaacs-gap
  // machinery with genuinely coupled costs.
  CoupledCostFn ell_override;

  std::vector<std::vector<double>> controls_a;
  std::vector<std::vector<double>> controls_b;

  std::vector<std::array<double, 2>> qx;  // per-axis bounds of Q_X
  std::vector<std::array<double, 2>> qy;

  double ell_total(std::span<const double> x, std::span<const double> y, int w,
                   int z, std::span<const double> a,
                   std::span<const double> b) const;

  int ctrl_dim_a() const { return controls_a.empty() ? 0 : int(controls_a[0].size()); }
  int ctrl_dim_b() const { return controls_b.empty() ? 0 : int(controls_b[0].size()); }

  // Structural checks: dimensions consistent, lo < hi, thresholds strictly
  // inside the cube, lambda > 0, nonempty control sets. Throws InvalidArgument.
  void validate_basic() const;
};

struct LoadedProblem {
  GameProblem problem;
  GridSpec grid;
  std::string source_text;  // raw file bytes, hashed into manifests
};

/// Parses the JSON problem format (see README). Throws ParseError.
LoadedProblem parse_problem(const std::string& json_text);
LoadedProblem load_problem_file(const std::string& path);

}  // namespace thermoisaacs
