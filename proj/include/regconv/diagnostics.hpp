#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "regconv/prefix_table.hpp"

namespace regconv {

enum class Mode { pringsheim, regular, absolute, complete };
enum class Status { satisfied_at_horizon, violated, inconclusive };

const char* to_string(Mode m);
const char* to_string(Status s);

/// Which pinned subseries broke a recursive or complete diagnosis.
struct PinnedFailure {
  int axis = -1;                   // the axis kept free (complete) or pinned (recursive)
  std::vector<std::int64_t> pins;  // pinned index values, in axis order
};

/// Finite-horizon convergence diagnosis. Never a proof: satisfied-at-horizon
/// means the epsilon-threshold condition held on everything scanned up to the
/// horizon, with the threshold kept a margin below the horizon so the claim
/// is validated on real data.
struct Verdict {
  Mode mode = Mode::pringsheim;
  Status status = Status::inconclusive;
  std::optional<Complex> estimate;       // limit/sum estimate; absent when violated
  std::optional<std::int64_t> witness;   // lambda_1 / lambda_2 / kappa analogue
  std::optional<double> real_witness;    // rho analogue for integral diagnostics
  double residual = 0.0;                 // largest magnitude beyond the chosen threshold
  double eps = 0.0;
  MultiIndex horizon;
  std::optional<LatticeBox> witness_box;       // a violating box, when one exists
  std::optional<std::vector<double>> real_box_lo, real_box_hi;  // violating real box
  std::optional<PinnedFailure> pinned_failure;
  std::string detail;
};

/// Thresholds are only searched up to horizon - margin so that a satisfied
/// verdict is backed by at least this fraction of the data beyond it.
inline std::int64_t validation_margin(std::int64_t range) {
  const std::int64_t m = (range + 3) / 4;
  return m < 1 ? 1 : m;
}

inline constexpr std::int64_t kDefaultBoxBudget = 20'000'000;

/// Pringsheim diagnosis on a table of rectangular partial sums: estimate is
/// the deepest cell; the witness is the smallest lambda_1 (at most
/// min(horizon) minus the validation margin) with every cell of min index
/// beyond it within eps of the estimate. Requires horizon >= 3 per axis.
Verdict pringsheim_diagnose(const PartialSumTable& table, double eps);

/// Regular-convergence diagnosis by box search: smallest lambda_2 with
/// |subrect_sum| < eps for every scanned box whose max{k} exceeds it.
/// Exhaustive when the box count fits the budget; otherwise a deterministic
/// sample (axis-aligned slabs, plus boxes with geometric-ladder extents on a
/// strided anchor lattice). Violated verdicts carry a violating box,
/// preferring a single cell when one violates.
Verdict regular_diagnose_direct(const PartialSumTable& table, double eps,
                                std::int64_t box_budget = kDefaultBoxBudget);

/// The recursive characterization: Pringsheim diagnosis of the full series
/// plus recursive regular diagnosis of every (m-1)-dimensional subseries with
/// one axis pinned to {0..pin_depth}, where pin_depth defaults to the
/// top-level lambda_1. Dimension 1 reduces to the ordinary Cauchy-tail check.
Verdict regular_diagnose_recursive(const TermSource& src, double eps, const MultiIndex& horizon,
                                   std::optional<std::int64_t> pin_depth_override = std::nullopt);

/// Builds the table of |c| and runs the direct regular diagnosis on it; for a
/// non-negative source, tail smallness of boxes is the finite proxy for
/// bounded monotone growth. The estimate is the full-horizon sum of |c|.
Verdict absolute_diagnose(const TermSource& src, double eps, const MultiIndex& horizon,
                          std::int64_t box_budget = kDefaultBoxBudget);

/// Pringsheim diagnosis plus ordinary-convergence checks of every
/// single-index subseries with the other m-1 indices pinned over
/// {0..pin_depth}^(m-1). Requires dim >= 2.
Verdict complete_diagnose(const TermSource& src, double eps, const MultiIndex& horizon,
                          std::optional<std::int64_t> pin_depth_override = std::nullopt);

/// Max |cell - estimate| over cells with min coordinate strictly beyond the
/// threshold. Test hook for the "regular implies Pringsheim within m*eps"
/// deviation bound.
double max_deviation_beyond(const PartialSumTable& table, Complex estimate,
                            std::int64_t threshold);

namespace detail {

/// Shared stratified box scan. Positions are abstract per-axis integers
/// 0..max_pos[p]; the magnitude callback maps a box of positions to |value|.
/// Strata group boxes by max{lo}. Used by the series diagnostics directly and
/// by the integral engine with positions mapped onto its probe lattice.
struct BoxScanResult {
  std::vector<double> strata_max;
  std::vector<std::optional<LatticeBox>> strata_arg;
  std::vector<double> single_max;                    // boxes with lo == hi
  std::vector<std::optional<LatticeBox>> single_arg;
  std::int64_t scanned = 0;
  bool exhaustive = true;
};

BoxScanResult scan_boxes(const MultiIndex& max_pos,
                         const std::function<double(const LatticeBox&)>& magnitude,
                         std::int64_t box_budget);

/// Turn a scan into a regular-style verdict. top = max possible stratum.
Verdict assemble_regular_verdict(const BoxScanResult& scan, Mode mode, double eps,
                                 const MultiIndex& horizon, std::int64_t top,
                                 const std::function<Complex()>& estimate_when_satisfied);

}  // namespace detail

}  // namespace regconv
