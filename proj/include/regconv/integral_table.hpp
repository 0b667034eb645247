#pragma once

#include "regconv/diagnostics.hpp"
#include "regconv/quadrature.hpp"

namespace regconv {

/// Rectangular and subrectangular partial integrals over the gridded part of
/// the positive octant: a panel cache plus a cumulative prefix table of cell
/// integrals. Bounds on the cell lattice are pure corner queries; off-grid
/// bounds add composite fringe sweeps over the partial cell layer (exact to
/// quadrature order, O(cells/axis^(m-1)) cell rules worst case).
class IntegralTable {
 public:
  IntegralTable(IntegrandSource src, QuadParams params, const MultiIndex& cell_counts,
                Exec exec = Exec::parallel);

  int dim() const { return grid_.dim(); }
  const PanelGrid& grid() const { return grid_; }
  const QuadParams& params() const { return grid_.params(); }
  const IntegrandSource& source() const { return grid_.source(); }
  const PartialSumTable& cell_prefix() const { return prefix_; }
  double extent(int axis) const { return grid_.extent(axis); }

  /// I(v_1, ..., v_m) over [0, v]. Any v_k = 0 gives exactly zero.
  Complex rect_integral(std::span<const double> v) const;

  /// I(u_1, v_1; ...; u_m, v_m) by inclusion-exclusion over rect_integral;
  /// lo = 0 reduces to rect_integral bit-for-bit (same code path).
  Complex subrect_integral(const RealBox& box) const;

  /// |I(box) - I(left) - I(right)| for a split strictly inside the box.
  double additivity_check(const RealBox& box, int axis, double split) const;

  /// Pringsheim diagnosis on the cell prefix table; real_witness carries the
  /// rho_1 threshold in real units.
  Verdict pringsheim_diagnose(double eps) const;

  /// Regular diagnosis over boxes snapped to the probe lattice (cell corners
  /// plus midpoints while the box count fits the budget, corners only
  /// otherwise). Violated verdicts carry the violating real box.
  Verdict regular_diagnose(double eps, std::int64_t box_budget = kDefaultBoxBudget) const;

  Complex pringsheim_estimate() const { return prefix_.cell(prefix_.horizon()); }

 private:
  PanelGrid grid_;
  PartialSumTable prefix_;
};

/// |f| of an integrand, for the absolutely-integrable side checks.
IntegrandSource abs_integrand(const IntegrandSource& src);

/// Symmetric adapter for integrands on all of R^m: the folded integrand sums
/// f over the 2^m sign choices per axis, so partial integrals of the folded
/// table over [0, v] equal symmetric partial integrals over [-v, v].
struct SymmetricIntegralAdapter {
  IntegralTable folded;

  /// Annular block integral over {u_k < |t_k| < v_k} via the folded table.
  Complex annular_integral(const RealBox& box) const { return folded.subrect_integral(box); }

  /// Independent path for cross-checks: composite quadrature over the
  /// two-sided box [-v, v]^m evaluating the original integrand directly.
  /// v must lie on the cell lattice.
  Complex direct_symmetric_integral(std::span<const double> v) const;

  IntegrandSource two_sided;
};

SymmetricIntegralAdapter make_symmetric_adapter(IntegrandSource two_sided, QuadParams params,
                                                const MultiIndex& cell_counts,
                                                Exec exec = Exec::parallel);

}  // namespace regconv
