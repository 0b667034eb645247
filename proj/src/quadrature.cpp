#include "regconv/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "regconv/kahan.hpp"

namespace regconv {

namespace {

GaussLegendreRule compute_rule(int q) {
  GaussLegendreRule rule;
  rule.nodes.assign(static_cast<std::size_t>(q), 0.0);
  rule.weights.assign(static_cast<std::size_t>(q), 0.0);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    // Chebyshev-based initial guess, then Newton on the three-term recurrence.
    double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(q) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_q(x), p0 = P_{q-1}(x); standard derivative identity.
      dp = static_cast<double>(q) * (p0 - x * p1) / (1.0 - x * x);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(q - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(q - 1 - i)] = w;
  }
  if (q % 2 == 1) rule.nodes[static_cast<std::size_t>(q / 2)] = 0.0;
  return rule;
}

Complex checked_eval(const IntegrandSource& src, std::span<const double> point) {
  const Complex v = src.eval(point);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::string where = "(";
    for (std::size_t i = 0; i < point.size(); ++i) {
      if (i) where += ",";
      where += std::to_string(point[i]);
    }
    throw EvalError("non-finite integrand value of '" + src.label + "' at " + where + ")");
  }
  return v;
}

// Tensor rule over an arbitrary box (used for both whole cells and sub-boxes).
Complex tensor_rule(const IntegrandSource& src, const RealBox& box, int q) {
  const auto& rule = gauss_legendre(q);
  const int m = box.dim();
  double center[kMaxDim], half[kMaxDim];
  double scale = 1.0;
  for (int p = 0; p < m; ++p) {
    center[p] = 0.5 * (box.lo[static_cast<std::size_t>(p)] + box.hi[static_cast<std::size_t>(p)]);
    half[p] = 0.5 * (box.hi[static_cast<std::size_t>(p)] - box.lo[static_cast<std::size_t>(p)]);
    scale *= half[p];
  }
  if (scale == 0.0) return {0.0, 0.0};

  double point[kMaxDim];
  int cursor[kMaxDim] = {0};
  KahanComplexSum acc;
  while (true) {
    double w = scale;
    for (int p = 0; p < m; ++p) {
      point[p] = center[p] + half[p] * rule.nodes[static_cast<std::size_t>(cursor[p])];
      w *= rule.weights[static_cast<std::size_t>(cursor[p])];
    }
    acc.add(w * checked_eval(src, std::span<const double>(point, static_cast<std::size_t>(m))));
    int p = m - 1;
    while (p >= 0) {
      if (++cursor[p] < q) break;
      cursor[p] = 0;
      --p;
    }
    if (p < 0) break;
  }
  return acc.value();
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int q) {
  if (q < 1 || q > 64) throw std::invalid_argument("gauss_legendre: order must be in [1, 64]");
  static std::map<int, GaussLegendreRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, compute_rule(q)).first;
  return it->second;
}

const char* to_string(Smoothness s) {
  switch (s) {
    case Smoothness::smooth: return "smooth";
    case Smoothness::oscillatory: return "oscillatory";
    case Smoothness::piecewise: return "piecewise";
  }
  return "?";
}

void QuadParams::validate(const IntegrandSource& src) const {
  if (delta <= 0) throw std::invalid_argument("QuadParams: delta must be positive");
  if (q < 1) throw std::invalid_argument("QuadParams: q must be >= 1");
  if (src.smoothness == Smoothness::oscillatory) {
    if (!src.period)
      throw std::invalid_argument("oscillatory integrand '" + src.label +
                                  "' must declare its period");
    if (delta > *src.period / 4.0)
      throw std::invalid_argument("oscillatory integrand '" + src.label +
                                  "': delta must be <= period/4 = " +
                                  std::to_string(*src.period / 4.0));
  }
}

RealBox::RealBox(std::vector<double> lo_in, std::vector<double> hi_in)
    : lo(std::move(lo_in)), hi(std::move(hi_in)) {
  if (lo.size() != hi.size() || lo.empty() || lo.size() > kMaxDim)
    throw std::invalid_argument("RealBox: bad dimension");
  for (std::size_t p = 0; p < lo.size(); ++p)
    if (!(lo[p] >= 0.0) || !(lo[p] <= hi[p]))
      throw std::invalid_argument("RealBox: requires 0 <= lo <= hi per axis");
}

std::string RealBox::to_string() const {
  std::string s = "[";
  for (std::size_t p = 0; p < lo.size(); ++p) {
    if (p) s += " x ";
    s += "(" + std::to_string(lo[p]) + "," + std::to_string(hi[p]) + ")";
  }
  return s + "]";
}

Complex cell_integral(const IntegrandSource& src, const MultiIndex& cell,
                      const QuadParams& params) {
  params.validate(src);
  const int m = src.dim;
  if (cell.dim() != m) throw std::invalid_argument("cell_integral: dimension mismatch");
  std::vector<double> lo(static_cast<std::size_t>(m)), hi(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) {
    if (cell[p] < 0) throw std::invalid_argument("cell_integral: negative cell index");
    lo[static_cast<std::size_t>(p)] = static_cast<double>(cell[p]) * params.delta;
    hi[static_cast<std::size_t>(p)] = static_cast<double>(cell[p] + 1) * params.delta;
  }
  return tensor_rule(src, RealBox(std::move(lo), std::move(hi)), params.q);
}

Complex partial_cell_integral(const IntegrandSource& src, const MultiIndex& cell,
                              const RealBox& sub, const QuadParams& params) {
  params.validate(src);
  const int m = src.dim;
  if (cell.dim() != m || sub.dim() != m)
    throw std::invalid_argument("partial_cell_integral: dimension mismatch");
  const double slack = 1e-9 * params.delta;
  for (int p = 0; p < m; ++p) {
    const double cell_lo = static_cast<double>(cell[p]) * params.delta;
    const double cell_hi = static_cast<double>(cell[p] + 1) * params.delta;
    if (sub.lo[static_cast<std::size_t>(p)] < cell_lo - slack ||
        sub.hi[static_cast<std::size_t>(p)] > cell_hi + slack)
      throw std::invalid_argument("partial_cell_integral: sub-box leaves the cell");
  }
  return tensor_rule(src, sub, params.q);
}

PanelGrid::PanelGrid(IntegrandSource src, QuadParams params, const MultiIndex& cell_counts,
                     Exec exec)
    : src_(std::move(src)), params_(params), counts_(cell_counts) {
  params_.validate(src_);
  if (counts_.dim() != src_.dim) throw std::invalid_argument("PanelGrid: dimension mismatch");
  MultiIndex horizon = counts_;
  for (int p = 0; p < counts_.dim(); ++p) {
    if (counts_[p] < 1) throw std::invalid_argument("PanelGrid: needs at least one cell per axis");
    horizon[p] = counts_[p] - 1;
  }
  cache_ = detail::DenseGrid(horizon);
  const std::int64_t n = cache_.size();
  Complex* cells = cache_.data();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
      cells[i] = cell_integral(src_, cache_.unrank(i), params_);
  } else {
    for (std::int64_t i = 0; i < n; ++i)
      cells[i] = cell_integral(src_, cache_.unrank(i), params_);
  }
}

Complex PanelGrid::cell_value(const MultiIndex& cell) const {
  if (!cache_.in_range(cell))
    throw std::out_of_range("PanelGrid::cell_value: cell " + cell.to_string() +
                            " outside the gridded horizon");
  return cache_.data()[cache_.rank(cell)];
}

}  // namespace regconv
