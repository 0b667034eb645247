#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "regconv/errors.hpp"
#include "regconv/lattice.hpp"
#include "regconv/series.hpp"

namespace regconv {

/// Kernel selector. Parallel kernels use OpenMP with static schedules and
/// per-line serial accumulation, so serial and parallel runs are bitwise
/// identical; the serial reference is kept for tests and benchmarks.
enum class Exec { serial, parallel };

/// Cells allowed per dense table. Default 2^28; override with the
/// REGCONV_CELL_BUDGET environment variable. Exceeding it throws
/// ResourceError, never truncates.
std::int64_t cell_budget();

namespace detail {

/// Dense row-major complex array over [0, horizon], last axis fastest.
class DenseGrid {
 public:
  DenseGrid() = default;
  DenseGrid(const MultiIndex& horizon);

  int dim() const { return horizon_.dim(); }
  const MultiIndex& horizon() const { return horizon_; }
  std::int64_t size() const { return static_cast<std::int64_t>(cells_.size()); }

  std::int64_t rank(const MultiIndex& idx) const {
    std::int64_t r = 0;
    for (int p = 0; p < dim(); ++p) r = r * (horizon_[p] + 1) + idx[p];
    return r;
  }

  MultiIndex unrank(std::int64_t r) const {
    MultiIndex idx = MultiIndex::zeros(dim());
    for (int p = dim() - 1; p >= 0; --p) {
      const std::int64_t len = horizon_[p] + 1;
      idx[p] = r % len;
      r /= len;
    }
    return idx;
  }

  bool in_range(const MultiIndex& idx) const {
    for (int p = 0; p < dim(); ++p)
      if (idx[p] < 0 || idx[p] > horizon_[p]) return false;
    return true;
  }

  Complex* data() { return cells_.data(); }
  const Complex* data() const { return cells_.data(); }

 private:
  MultiIndex horizon_;
  std::vector<Complex> cells_;
};

}  // namespace detail

/// Cumulative corner sums S(l) = sum of the source over [0, l], materialized
/// densely up to a horizon. Subrectangular sums come out of the 2^m
/// alternating corner query; any corner index at kBelowZero contributes zero.
class PartialSumTable {
 public:
  /// Single pass over the cells: raw terms first, then one Kahan-compensated
  /// running sum per axis line (m sweeps, O(m) work per cell). The parallel
  /// kernel distributes lines across threads.
  static PartialSumTable build(const TermSource& src, const MultiIndex& horizon,
                               Exec exec = Exec::parallel);

  /// Serial reference: each cell from its 2^m - 1 lower corners plus the raw
  /// term, in row-major order. Exact for integer sources, kept for tests and
  /// the benchmark.
  static PartialSumTable build_reference(const TermSource& src, const MultiIndex& horizon);

  int dim() const { return grid_.dim(); }
  const MultiIndex& horizon() const { return grid_.horizon(); }
  std::int64_t size() const { return grid_.size(); }

  /// S(l). Index coordinates at kBelowZero yield 0; anything beyond the
  /// horizon throws std::out_of_range.
  Complex cell(const MultiIndex& idx) const;

  /// s(k_1, l_1; ...; k_m, l_m) via the alternating corner expansion.
  Complex subrect_sum(const LatticeBox& box) const;

  /// Rebuild over a larger horizon. Accumulation order per line is
  /// unchanged, so all previously stored cells keep their exact values.
  PartialSumTable extended(const TermSource& src, const MultiIndex& new_horizon,
                           Exec exec = Exec::parallel) const;

  /// Binary fixture format, little-endian: magic "RCTB", u32 version, u32
  /// dim, u64 horizon per axis, then cells as f64 (re, im) pairs row-major.
  void dump(std::ostream& os) const;
  static PartialSumTable load(std::istream& is);

 private:
  detail::DenseGrid grid_;
};

/// Dense raw multiple sequence s_{l_1,...,l_m} up to a horizon (values, not
/// cumulative sums).
class SequenceTable {
 public:
  static SequenceTable build(const std::function<Complex(const MultiIndex&)>& f,
                             const MultiIndex& horizon, Exec exec = Exec::parallel);

  int dim() const { return grid_.dim(); }
  const MultiIndex& horizon() const { return grid_.horizon(); }

  /// Sequence value; indices holding kBelowZero give 0 by the same agreement
  /// as the corner expansion.
  Complex at(const MultiIndex& idx) const;

  /// The 2^m alternating combination of sequence values at the corners of
  /// [k, l]: sum over delta of (-1)^|delta| s(delta(k-1) + (1-delta)l).
  Complex corner_combination(const LatticeBox& box) const;

 private:
  detail::DenseGrid grid_;
};

/// Regular-convergence check for a raw multiple sequence: the smallest
/// kappa_2 such that every box [k, l] within the horizon with
/// max{k} > kappa_2 has |corner_combination| < eps. The vacuous candidate
/// kappa_2 = max(horizon) does not count (it would leave nothing checked);
/// absent means even the top stratum violates.
std::optional<std::int64_t> sequence_regular_check(const SequenceTable& table, double eps);

}  // namespace regconv
