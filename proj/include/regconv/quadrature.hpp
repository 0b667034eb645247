#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regconv/errors.hpp"
#include "regconv/lattice.hpp"
#include "regconv/prefix_table.hpp"

namespace regconv {

/// Nodes and weights on [-1, 1], computed once per order by Newton iteration
/// on the Legendre recurrence (deterministic to the last bit) and cached.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre(int q);

enum class Smoothness { smooth, oscillatory, piecewise };
const char* to_string(Smoothness s);

/// Deterministic integrand oracle on the closed positive octant. eval must be
/// pure and finite at every evaluated point.
struct IntegrandSource {
  int dim = 0;
  std::string label;
  std::function<Complex(std::span<const double>)> eval;
  std::optional<Complex> ground_truth;
  Smoothness smoothness = Smoothness::smooth;
  /// Dominant period; required for oscillatory-tagged integrands, where the
  /// cell width must satisfy delta <= period/4 (longer cells alias).
  std::optional<double> period;
  /// Inner integrals exist absolutely for any axis split; enables the
  /// pointwise inner-integral evaluation path.
  bool abs_integrable = false;
};

/// Panel discretization: uniform cell width and per-axis quadrature order.
struct QuadParams {
  double delta = 0.5;
  int q = 8;

  void validate(const IntegrandSource& src) const;
};

/// Axis-aligned real box [lo, hi] with 0 <= lo <= hi componentwise.
struct RealBox {
  std::vector<double> lo, hi;

  RealBox(std::vector<double> lo_in, std::vector<double> hi_in);
  int dim() const { return static_cast<int>(lo.size()); }
  std::string to_string() const;
};

/// Tensor-product Gauss-Legendre estimate over the cell
/// [c_1 d, (c_1+1) d] x ... Throws EvalError (carrying the point) on a
/// non-finite integrand value.
Complex cell_integral(const IntegrandSource& src, const MultiIndex& cell,
                      const QuadParams& params);

/// Same rule mapped affinely onto a sub-box of the cell.
Complex partial_cell_integral(const IntegrandSource& src, const MultiIndex& cell,
                              const RealBox& sub, const QuadParams& params);

/// Dense cache of per-cell integrals over cells [0, n_p) per axis. Cells are
/// independent, so the parallel build is bitwise identical to the serial one.
class PanelGrid {
 public:
  PanelGrid(IntegrandSource src, QuadParams params, const MultiIndex& cell_counts,
            Exec exec = Exec::parallel);

  int dim() const { return src_.dim; }
  const IntegrandSource& source() const { return src_; }
  const QuadParams& params() const { return params_; }
  const MultiIndex& cell_counts() const { return counts_; }
  double extent(int axis) const { return static_cast<double>(counts_[axis]) * params_.delta; }

  /// Cached value; recomputation via cell_integral reproduces it exactly.
  Complex cell_value(const MultiIndex& cell) const;

 private:
  IntegrandSource src_;
  QuadParams params_;
  MultiIndex counts_;
  detail::DenseGrid cache_;
};

}  // namespace regconv
