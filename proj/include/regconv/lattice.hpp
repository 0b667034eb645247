#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace regconv {

/// Hard cap on the ambient dimension. Corner enumeration is 2^m, so keeping
/// m small is what makes every query below O(1)-ish.
inline constexpr int kMaxDim = 8;

/// Sentinel coordinate for "one below zero". A cumulative table evaluated at
/// an index containing this coordinate is zero by convention; it is how a
/// corner expansion expresses the k_p = 0 boundary without unsigned underflow.
inline constexpr std::int64_t kBelowZero = -1;

/// An m-tuple of lattice coordinates, m in [1, kMaxDim]. Ordinary indices are
/// non-negative; kBelowZero is admitted so corner lists can carry the
/// below-zero marker as a value, not a special case.
class MultiIndex {
 public:
  MultiIndex() = default;

  MultiIndex(std::initializer_list<std::int64_t> coords) {
    assign(std::span<const std::int64_t>(coords.begin(), coords.size()));
  }

  explicit MultiIndex(std::span<const std::int64_t> coords) { assign(coords); }

  static MultiIndex filled(int dim, std::int64_t value) {
    check_dim(dim);
    MultiIndex idx;
    idx.dim_ = dim;
    for (int p = 0; p < dim; ++p) idx.c_[p] = check_coord(value);
    return idx;
  }

  static MultiIndex zeros(int dim) { return filled(dim, 0); }

  int dim() const { return dim_; }

  std::int64_t operator[](int axis) const { return c_[static_cast<std::size_t>(axis)]; }
  std::int64_t& operator[](int axis) { return c_[static_cast<std::size_t>(axis)]; }

  std::span<const std::int64_t> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  std::int64_t min_coord() const {
    std::int64_t v = c_[0];
    for (int p = 1; p < dim_; ++p) v = c_[p] < v ? c_[p] : v;
    return v;
  }

  std::int64_t max_coord() const {
    std::int64_t v = c_[0];
    for (int p = 1; p < dim_; ++p) v = c_[p] > v ? c_[p] : v;
    return v;
  }

  bool has_sentinel() const {
    for (int p = 0; p < dim_; ++p)
      if (c_[p] == kBelowZero) return true;
    return false;
  }

  MultiIndex with_axis_removed(int axis) const {
    if (dim_ < 2 || axis < 0 || axis >= dim_)
      throw std::invalid_argument("MultiIndex: bad axis removal");
    MultiIndex out;
    out.dim_ = dim_ - 1;
    int k = 0;
    for (int p = 0; p < dim_; ++p)
      if (p != axis) out.c_[k++] = c_[p];
    return out;
  }

  MultiIndex with_axis_inserted(int axis, std::int64_t value) const {
    if (dim_ >= kMaxDim || axis < 0 || axis > dim_)
      throw std::invalid_argument("MultiIndex: bad axis insertion");
    MultiIndex out;
    out.dim_ = dim_ + 1;
    int k = 0;
    for (int p = 0; p < out.dim_; ++p)
      out.c_[p] = (p == axis) ? check_coord(value) : c_[k++];
    return out;
  }

  bool operator==(const MultiIndex& other) const {
    if (dim_ != other.dim_) return false;
    for (int p = 0; p < dim_; ++p)
      if (c_[p] != other.c_[p]) return false;
    return true;
  }

  /// Lexicographic order; only meaningful for equal dimensions.
  bool lex_less(const MultiIndex& other) const {
    for (int p = 0; p < dim_; ++p) {
      if (c_[p] != other.c_[p]) return c_[p] < other.c_[p];
    }
    return false;
  }

  std::string to_string() const {
    std::string s = "(";
    for (int p = 0; p < dim_; ++p) {
      if (p) s += ",";
      s += std::to_string(c_[p]);
    }
    return s + ")";
  }

 private:
  static void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim)
      throw std::invalid_argument("MultiIndex: dimension must be in [1, " +
                                  std::to_string(kMaxDim) + "]");
  }

  static std::int64_t check_coord(std::int64_t v) {
    if (v < kBelowZero)
      throw std::invalid_argument("MultiIndex: coordinate below the sentinel value");
    return v;
  }

  void assign(std::span<const std::int64_t> coords) {
    check_dim(static_cast<int>(coords.size()));
    dim_ = static_cast<int>(coords.size());
    for (int p = 0; p < dim_; ++p) c_[p] = check_coord(coords[static_cast<std::size_t>(p)]);
  }

  std::array<std::int64_t, kMaxDim> c_{};
  int dim_ = 0;
};

inline bool componentwise_leq(const MultiIndex& a, const MultiIndex& b) {
  for (int p = 0; p < a.dim(); ++p)
    if (a[p] > b[p]) return false;
  return true;
}

/// Axis-aligned index rectangle [lo, hi], inclusive on both ends, with
/// 0 <= lo <= hi componentwise.
struct LatticeBox {
  MultiIndex lo;
  MultiIndex hi;

  LatticeBox(MultiIndex lo_in, MultiIndex hi_in) : lo(lo_in), hi(hi_in) {
    if (lo.dim() != hi.dim()) throw std::invalid_argument("LatticeBox: dimension mismatch");
    for (int p = 0; p < lo.dim(); ++p) {
      if (lo[p] < 0 || lo[p] > hi[p])
        throw std::invalid_argument("LatticeBox: requires 0 <= lo <= hi per axis");
    }
  }

  int dim() const { return lo.dim(); }

  std::int64_t volume() const {
    std::int64_t v = 1;
    for (int p = 0; p < dim(); ++p) v *= hi[p] - lo[p] + 1;
    return v;
  }

  bool operator==(const LatticeBox& other) const { return lo == other.lo && hi == other.hi; }

  std::string to_string() const { return "[" + lo.to_string() + ".." + hi.to_string() + "]"; }
};

/// One corner of the alternating expansion: the delta bit-vector (bit p set
/// means axis p takes lo_p - 1) plus its parity sign.
struct CornerSign {
  std::uint32_t deltas = 0;
  int sign = +1;
};

struct Corner {
  CornerSign sign;
  MultiIndex index;
};

/// All 2^m corners of a box, in ascending delta-mask order. For delta_p = 1
/// the index coordinate is lo_p - 1, which becomes kBelowZero when lo_p = 0;
/// for delta_p = 0 it is hi_p. Signs alternate with the parity of the mask.
inline std::vector<Corner> corners(const LatticeBox& box) {
  const int m = box.dim();
  std::vector<Corner> out;
  out.reserve(std::size_t{1} << m);
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    Corner c;
    c.sign.deltas = mask;
    c.sign.sign = (__builtin_popcount(mask) % 2 == 0) ? +1 : -1;
    MultiIndex idx = box.hi;
    for (int p = 0; p < m; ++p)
      if (mask & (1u << p)) idx[p] = box.lo[p] - 1;
    c.index = idx;
    out.push_back(std::move(c));
  }
  return out;
}

/// Row-major enumeration of the box, last axis fastest.
template <typename F>
void for_each_index(const LatticeBox& box, F&& fn) {
  const int m = box.dim();
  MultiIndex idx = box.lo;
  while (true) {
    fn(const_cast<const MultiIndex&>(idx));
    int p = m - 1;
    while (p >= 0) {
      if (idx[p] < box.hi[p]) {
        ++idx[p];
        break;
      }
      idx[p] = box.lo[p];
      --p;
    }
    if (p < 0) return;
  }
}

/// Linear rank of idx within the box under the same row-major order.
inline std::int64_t box_rank(const LatticeBox& box, const MultiIndex& idx) {
  std::int64_t r = 0;
  for (int p = 0; p < box.dim(); ++p) {
    r = r * (box.hi[p] - box.lo[p] + 1) + (idx[p] - box.lo[p]);
  }
  return r;
}

inline MultiIndex box_unrank(const LatticeBox& box, std::int64_t rank) {
  MultiIndex idx = box.lo;
  for (int p = box.dim() - 1; p >= 0; --p) {
    const std::int64_t len = box.hi[p] - box.lo[p] + 1;
    idx[p] = box.lo[p] + rank % len;
    rank /= len;
  }
  return idx;
}

}  // namespace regconv
