#pragma once

#include <span>

#include "regconv/integral_table.hpp"

namespace regconv {

/// Partition of the ambient axes into p outer and q inner axes, m = p + q.
/// The assignment is free (any axes may serve as the outer block), which is
/// also how axis permutations enter.
struct SplitSpec {
  int m = 0, p = 0, q = 0;
  std::vector<int> outer_axes, inner_axes;

  static SplitSpec leading(int m, int p);
  void validate() const;
  std::string to_string() const;
};

/// Outer box (u_1, v_1; ...; u_p, v_p) on the outer axes, in split order.
struct OuterBox {
  std::vector<double> u, v;
  std::string to_string() const;
};

struct LadderResult {
  Complex value{0.0, 0.0};
  double inner_horizon = 0.0;   // ladder rung at stabilization (capped at the grid)
  double residual = 0.0;        // |last - previous| rung difference
  bool stabilized = false;
  std::vector<Complex> rungs;   // value at every evaluated rung
};

/// Mixed partial integral with the inner axes swept over the geometric
/// ladder w_0, 2w_0, 4w_0, ... (w_0 = 4*delta, capped at the grid), returning
/// the first value whose rung-to-rung difference drops below eps. Exhausting
/// the grid without stabilizing leaves the result flagged, carrying the last
/// two rungs.
LadderResult iterated_limit(const IntegralTable& table, const SplitSpec& split,
                            const OuterBox& box, double eps);

struct IteratedEntry {
  OuterBox box;
  LadderResult result;
};

/// J materialized on a probe set, with the uniformity statistic: the largest
/// inner horizon any probe box needed. Uniformity over a continuum is
/// untestable; this records exactly what was checked.
struct IteratedLimitTable {
  SplitSpec split;
  double eps = 0.0;
  MultiIndex cell_horizon;
  std::vector<IteratedEntry> entries;
  double uniformity_statistic = 0.0;
  bool all_stabilized = true;
};

IteratedLimitTable uniformity_probe(const IntegralTable& table, const SplitSpec& split,
                                    std::span<const OuterBox> probes, double eps);

/// Regular diagnosis of J over the probed boxes: the smallest probed level
/// rho_3 with |J| <= eps whenever max{u} exceeds it.
Verdict j_regular_diagnose(const IteratedLimitTable& jt, double eps);

/// Pringsheim limit of J along the chain of probed boxes (0, v*1): the last
/// chain value, stabilized when the final step is below eps.
LadderResult final_limit(const IteratedLimitTable& jt, double eps);

/// Pointwise inner-integral variant: outer composite quadrature of the inner
/// full-octant integral evaluated at every outer node by its own ladder,
/// stabilized on the absolute integral. Requires the integrand to be tagged
/// inner-absolutely-integrable. Throws EvalError (carrying the node) when an
/// inner ladder fails to stabilize.
Complex inner_lebesgue_variant(const IntegralTable& table, const SplitSpec& split,
                               const OuterBox& box, double eps);

/// Stage-wise repeated splitting: each stage consumes the previous stage's J
/// as an additive box function (cached per outer box) and peels off its inner
/// axes by the same ladder; the final stage takes the (0, v*1) limit.
/// chain[i+1].m must equal chain[i].p; stage axes refer to the previous
/// stage's outer axes in order.
LadderResult repeated_split(const IntegralTable& table, std::span<const SplitSpec> chain,
                            double eps);

/// The q = 1 chain with identity order: (m-1)+1, (m-2)+1, ..., 1+1.
std::vector<SplitSpec> unit_split_chain(int m);

/// Deterministic probe set: a 5x5 grid of moderate outer boxes over the
/// first two outer axes (uniformity), deep-tail boxes (regularity of J), and
/// the (0, v*1) chain (the final limit).
std::vector<OuterBox> default_probe_set(const IntegralTable& table, const SplitSpec& split);

}  // namespace regconv
