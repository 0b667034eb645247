#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regconv/lattice.hpp"

namespace regconv {

using Complex = std::complex<double>;

/// Deterministic oracle for the terms of an m-multiple series over N^m.
/// eval must be pure: equal indices always give equal values.
struct TermSource {
  int dim = 0;
  std::string label;
  std::function<Complex(const MultiIndex&)> eval;
  /// Closed-form sum when known; lets reports state absolute error without a
  /// separate registry.
  std::optional<Complex> ground_truth;
  /// Every axis-aligned line is eventually alternating with non-increasing
  /// magnitudes. Enables the first-omitted-term tail bound in successive
  /// summation; leave false when unsure.
  bool alternating = false;
};

/// Term oracle over Z^m (two-sided series).
struct SignedTermSource {
  int dim = 0;
  std::string label;
  std::function<Complex(std::span<const std::int64_t>)> eval;
};

/// Pin the given (axis, value) pairs and return the lower-dimensional series
/// of the remaining axes, order preserved. Pinning all axes is an error: a
/// term is not a series.
TermSource subseries(const TermSource& src,
                     std::span<const std::pair<int, std::int64_t>> pins);

inline TermSource subseries(const TermSource& src,
                            std::initializer_list<std::pair<int, std::int64_t>> pins) {
  std::vector<std::pair<int, std::int64_t>> v(pins);
  return subseries(src, std::span<const std::pair<int, std::int64_t>>(v));
}

/// Fold a two-sided source onto N^m so that rectangular partial sums of the
/// result equal the symmetric partial sums of the original: per axis, index
/// j >= 1 collects the pair {+j, -j} and index 0 maps to itself.
TermSource symmetric_fold(const SignedTermSource& src);

/// Sum of the two-sided source over the annular block
/// {k_p <= |j_p| <= l_p for every p}, by direct enumeration. A block with
/// k_p = 0 includes the j_p = 0 term once (the annulus degenerates to the
/// full segment on that axis).
Complex symmetric_block_sum(const SignedTermSource& src, const LatticeBox& box);

}  // namespace regconv
