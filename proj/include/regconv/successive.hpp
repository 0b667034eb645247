#pragma once

#include <vector>

#include "regconv/series.hpp"

namespace regconv {

/// One-axis-at-a-time evaluation order and per-axis truncation control.
/// perm[0] is the outermost axis, perm[m-1] the innermost; tolerances and
/// caps are indexed by original axis id.
struct SummationPlan {
  std::vector<int> perm;
  std::vector<double> tol;
  std::vector<std::int64_t> cap;

  static SummationPlan uniform(int m, std::vector<int> perm, double tol,
                               std::int64_t cap = 1'000'000);
  void validate(int m) const;
};

struct AxisTrace {
  double achieved_tail = 0.0;   // worst tail bound met on this axis
  std::int64_t max_depth = 0;   // deepest truncation used on this axis
};

struct SuccessiveResult {
  Complex value{0.0, 0.0};
  std::vector<AxisTrace> axes;  // indexed by original axis
  SummationPlan plan;
  bool inconclusive = false;    // some axis failed its tolerance within its cap
  int failed_axis = -1;
  bool heuristic = false;       // consecutive-difference rule only (untagged source)
};

/// Truncation rule for a single series, shared by every level: after adding
/// term t_n (n >= 2), peek t_{n+1}; stop when |t_n| < tol and |t_{n+1}| < tol.
/// For alternating-tagged sources the returned value is the midpoint
/// refinement A_n + t_{n+1}/2, whose error is bounded by the first omitted
/// term; otherwise A_n is returned and the rule is heuristic.
struct TailSumOutcome {
  Complex value{0.0, 0.0};
  double achieved_tail = 0.0;
  std::int64_t depth = 0;
  bool converged = false;
};
TailSumOutcome tail_controlled_sum(const std::function<Complex(std::int64_t)>& term, double tol,
                                   std::int64_t cap, bool alternating);

/// Sum the innermost axis as an ordinary series to its tail tolerance, treat
/// the results as an (m-1)-dimensional source, and recurse. Intermediate
/// values are produced exactly once per pinned prefix (streamed in axis
/// order), so no prefix is ever recomputed.
SuccessiveResult successive_sum(const TermSource& src, const SummationPlan& plan);

struct SweepResult {
  std::vector<SuccessiveResult> results;  // lexicographic permutation order
  double max_discrepancy = 0.0;           // max pairwise |value difference|
};

/// successive_sum under every permutation of the axes with identical
/// tolerances. Requires m <= 5 (m! results).
SweepResult permutation_sweep(const TermSource& src, const SummationPlan& base_plan);

}  // namespace regconv
