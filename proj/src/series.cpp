#include "regconv/series.hpp"

#include <algorithm>
#include <array>

#include "regconv/kahan.hpp"

namespace regconv {

TermSource subseries(const TermSource& src,
                     std::span<const std::pair<int, std::int64_t>> pins) {
  const int m = src.dim;
  if (pins.empty()) throw std::invalid_argument("subseries: no axes pinned");
  if (static_cast<int>(pins.size()) >= m)
    throw std::invalid_argument("subseries: pinning all axes yields a term, not a series");

  std::array<bool, kMaxDim> pinned{};
  std::array<std::int64_t, kMaxDim> pin_value{};
  for (const auto& [axis, value] : pins) {
    if (axis < 0 || axis >= m) throw std::invalid_argument("subseries: axis out of range");
    if (pinned[static_cast<std::size_t>(axis)])
      throw std::invalid_argument("subseries: duplicate pinned axis");
    if (value < 0) throw std::invalid_argument("subseries: pin value must be non-negative");
    pinned[static_cast<std::size_t>(axis)] = true;
    pin_value[static_cast<std::size_t>(axis)] = value;
  }

  // Free axes keep their original relative order.
  std::vector<int> free_axes;
  for (int p = 0; p < m; ++p)
    if (!pinned[static_cast<std::size_t>(p)]) free_axes.push_back(p);

  TermSource out;
  out.dim = static_cast<int>(free_axes.size());
  out.label = src.label + "|pinned";
  out.ground_truth = std::nullopt;
  out.alternating = src.alternating;
  out.eval = [src_eval = src.eval, m, pinned, pin_value, free_axes](const MultiIndex& idx) {
    MultiIndex full = MultiIndex::zeros(m);
    for (int p = 0; p < m; ++p)
      if (pinned[static_cast<std::size_t>(p)]) full[p] = pin_value[static_cast<std::size_t>(p)];
    for (std::size_t k = 0; k < free_axes.size(); ++k)
      full[free_axes[k]] = idx[static_cast<int>(k)];
    return src_eval(full);
  };
  return out;
}

TermSource symmetric_fold(const SignedTermSource& src) {
  const int m = src.dim;
  TermSource out;
  out.dim = m;
  out.label = src.label + "|folded";
  out.eval = [eval = src.eval, m](const MultiIndex& idx) {
    // Sum over all per-axis sign choices; axes at index 0 have one preimage.
    std::array<std::int64_t, kMaxDim> point{};
    int flip_axes[kMaxDim];
    int n_flip = 0;
    for (int p = 0; p < m; ++p) {
      point[static_cast<std::size_t>(p)] = idx[p];
      if (idx[p] > 0) flip_axes[n_flip++] = p;
    }
    KahanComplexSum acc;
    for (std::uint32_t mask = 0; mask < (1u << n_flip); ++mask) {
      for (int b = 0; b < n_flip; ++b) {
        const int p = flip_axes[b];
        point[static_cast<std::size_t>(p)] = (mask & (1u << b)) ? -idx[p] : idx[p];
      }
      acc.add(eval(std::span<const std::int64_t>(point.data(), static_cast<std::size_t>(m))));
    }
    return acc.value();
  };
  return out;
}

Complex symmetric_block_sum(const SignedTermSource& src, const LatticeBox& box) {
  const int m = src.dim;
  if (box.dim() != m) throw std::invalid_argument("symmetric_block_sum: dimension mismatch");

  // Per-axis index sets: {-l..-k} u {k..l}, collapsing to {-l..l} when k = 0.
  std::vector<std::vector<std::int64_t>> axis_values(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) {
    const std::int64_t k = box.lo[p], l = box.hi[p];
    auto& vals = axis_values[static_cast<std::size_t>(p)];
    for (std::int64_t j = -l; j <= l; ++j)
      if (std::abs(j) >= k) vals.push_back(j);
  }

  std::array<std::int64_t, kMaxDim> point{};
  std::array<std::size_t, kMaxDim> cursor{};
  KahanComplexSum acc;
  while (true) {
    for (int p = 0; p < m; ++p)
      point[static_cast<std::size_t>(p)] =
          axis_values[static_cast<std::size_t>(p)][cursor[static_cast<std::size_t>(p)]];
    acc.add(src.eval(std::span<const std::int64_t>(point.data(), static_cast<std::size_t>(m))));
    int p = m - 1;
    while (p >= 0) {
      auto& cur = cursor[static_cast<std::size_t>(p)];
      if (++cur < axis_values[static_cast<std::size_t>(p)].size()) break;
      cur = 0;
      --p;
    }
    if (p < 0) break;
  }
  return acc.value();
}

}  // namespace regconv
