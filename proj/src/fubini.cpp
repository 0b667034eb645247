#include "regconv/fubini.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>

#include "regconv/kahan.hpp"

namespace regconv {

SplitSpec SplitSpec::leading(int m, int p) {
  SplitSpec s;
  s.m = m;
  s.p = p;
  s.q = m - p;
  for (int a = 0; a < p; ++a) s.outer_axes.push_back(a);
  for (int a = p; a < m; ++a) s.inner_axes.push_back(a);
  s.validate();
  return s;
}

void SplitSpec::validate() const {
  if (m < 2 || p < 1 || q < 1 || p + q != m)
    throw std::invalid_argument("SplitSpec: needs m = p + q with p, q >= 1");
  if (static_cast<int>(outer_axes.size()) != p || static_cast<int>(inner_axes.size()) != q)
    throw std::invalid_argument("SplitSpec: axis lists do not match p and q");
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (int a : outer_axes) {
    if (a < 0 || a >= m || seen[static_cast<std::size_t>(a)])
      throw std::invalid_argument("SplitSpec: bad outer axis assignment");
    seen[static_cast<std::size_t>(a)] = true;
  }
  for (int a : inner_axes) {
    if (a < 0 || a >= m || seen[static_cast<std::size_t>(a)])
      throw std::invalid_argument("SplitSpec: bad inner axis assignment");
    seen[static_cast<std::size_t>(a)] = true;
  }
}

std::string SplitSpec::to_string() const {
  std::string s = std::to_string(p) + "+" + std::to_string(q) + " outer(";
  for (std::size_t i = 0; i < outer_axes.size(); ++i)
    s += (i ? "," : "") + std::to_string(outer_axes[i]);
  return s + ")";
}

std::string OuterBox::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) s += " x ";
    s += "(" + std::to_string(u[i]) + "," + std::to_string(v[i]) + ")";
  }
  return s + "]";
}

namespace {

// Ladder of inner horizons: 4*delta, 8*delta, ... capped at `cap`, with the
// cap itself always the last rung.
std::vector<double> inner_ladder(double delta, double cap) {
  std::vector<double> ws;
  for (double w = 4.0 * delta; w < cap; w *= 2.0) ws.push_back(w);
  if (ws.empty() || ws.back() < cap) ws.push_back(cap);
  return ws;
}

// Generic ladder evaluation: A(w) supplied by a callback.
LadderResult run_ladder(const std::function<Complex(double)>& value_at, double delta, double cap,
                        double eps) {
  const auto ws = inner_ladder(delta, cap);
  LadderResult out;
  Complex prev{0.0, 0.0};
  for (std::size_t r = 0; r < ws.size(); ++r) {
    const Complex cur = value_at(ws[r]);
    out.rungs.push_back(cur);
    if (r > 0) {
      out.residual = std::abs(cur - prev);
      out.value = cur;
      out.inner_horizon = ws[r];
      if (out.residual < eps) {
        out.stabilized = true;
        return out;
      }
    } else {
      out.value = cur;
      out.inner_horizon = ws[r];
    }
    prev = cur;
  }
  out.stabilized = false;
  return out;
}

}  // namespace

LadderResult iterated_limit(const IntegralTable& table, const SplitSpec& split,
                            const OuterBox& box, double eps) {
  split.validate();
  if (split.m != table.dim()) throw std::invalid_argument("iterated_limit: dimension mismatch");
  if (static_cast<int>(box.u.size()) != split.p || static_cast<int>(box.v.size()) != split.p)
    throw std::invalid_argument("iterated_limit: outer box arity mismatch");
  if (eps <= 0) throw std::invalid_argument("iterated_limit: eps must be positive");

  double inner_cap = table.extent(split.inner_axes[0]);
  for (int a : split.inner_axes) inner_cap = std::min(inner_cap, table.extent(a));

  const int m = split.m;
  auto value_at = [&](double w) {
    std::vector<double> lo(static_cast<std::size_t>(m), 0.0);
    std::vector<double> hi(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < split.p; ++i) {
      lo[static_cast<std::size_t>(split.outer_axes[static_cast<std::size_t>(i)])] =
          box.u[static_cast<std::size_t>(i)];
      hi[static_cast<std::size_t>(split.outer_axes[static_cast<std::size_t>(i)])] =
          box.v[static_cast<std::size_t>(i)];
    }
    for (int a : split.inner_axes)
      hi[static_cast<std::size_t>(a)] = std::min(w, table.extent(a));
    return table.subrect_integral(RealBox(std::move(lo), std::move(hi)));
  };

  return run_ladder(value_at, table.params().delta, inner_cap, eps);
}

IteratedLimitTable uniformity_probe(const IntegralTable& table, const SplitSpec& split,
                                    std::span<const OuterBox> probes, double eps) {
  if (probes.empty()) throw std::invalid_argument("uniformity_probe: empty probe set");
  IteratedLimitTable jt;
  jt.split = split;
  jt.eps = eps;
  jt.cell_horizon = table.cell_prefix().horizon();
  jt.entries.resize(probes.size());

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(probes.size()); ++i) {
    jt.entries[static_cast<std::size_t>(i)] =
        IteratedEntry{probes[static_cast<std::size_t>(i)],
                      iterated_limit(table, split, probes[static_cast<std::size_t>(i)], eps)};
  }

  for (const auto& e : jt.entries) {
    if (!e.result.stabilized) jt.all_stabilized = false;
    jt.uniformity_statistic = std::max(jt.uniformity_statistic, e.result.inner_horizon);
  }
  return jt;
}

Verdict j_regular_diagnose(const IteratedLimitTable& jt, double eps) {
  Verdict v;
  v.mode = Mode::regular;
  v.eps = eps;
  v.horizon = jt.cell_horizon;

  std::set<double> level_set;
  for (const auto& e : jt.entries)
    level_set.insert(*std::max_element(e.box.u.begin(), e.box.u.end()));
  std::vector<double> levels(level_set.begin(), level_set.end());

  if (levels.size() < 2) {
    v.status = Status::inconclusive;
    v.detail = "probe set spans a single max{u} level; no threshold can be validated";
    return v;
  }

  auto level_max = [&](double lo_level) {
    double worst = 0.0;
    const IteratedEntry* arg = nullptr;
    for (const auto& e : jt.entries) {
      const double mu = *std::max_element(e.box.u.begin(), e.box.u.end());
      if (mu > lo_level) {
        const double mag = std::abs(e.result.value);
        if (mag > worst || arg == nullptr) {
          worst = mag;
          arg = &e;
        }
      }
    }
    return std::pair<double, const IteratedEntry*>(worst, arg);
  };

  // Candidates: every level except the top (a vacuous threshold checks nothing).
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const auto [worst, arg] = level_max(levels[i]);
    if (worst <= eps) {
      v.status = Status::satisfied_at_horizon;
      v.real_witness = levels[i];
      v.residual = worst;
      v.detail = "rho_3 validated over " + std::to_string(levels.size() - 1 - i) +
                 " deeper probe levels";
      return v;
    }
  }

  const auto [worst, arg] = level_max(levels[levels.size() - 2]);
  v.status = Status::violated;
  v.residual = worst;
  if (arg) {
    v.real_box_lo = arg->box.u;
    v.real_box_hi = arg->box.v;
    v.detail = "deepest probe level still exceeds eps at box " + arg->box.to_string();
  }
  return v;
}

LadderResult final_limit(const IteratedLimitTable& jt, double eps) {
  // Chain entries: u = 0 on every outer axis, equal v on every outer axis.
  std::vector<std::pair<double, const IteratedEntry*>> chain;
  for (const auto& e : jt.entries) {
    bool zero_u = true;
    for (double u : e.box.u) zero_u = zero_u && u == 0.0;
    bool diag_v = true;
    for (double vv : e.box.v) diag_v = diag_v && vv == e.box.v[0];
    if (zero_u && diag_v) chain.emplace_back(e.box.v[0], &e);
  }
  std::sort(chain.begin(), chain.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  LadderResult out;
  if (chain.size() < 2) {
    out.stabilized = false;
    return out;
  }
  for (const auto& [vv, e] : chain) out.rungs.push_back(e->result.value);
  const auto& last = *chain.back().second;
  const auto& prev = *chain[chain.size() - 2].second;
  out.value = last.result.value;
  out.inner_horizon = chain.back().first;
  out.residual = std::abs(last.result.value - prev.result.value);
  out.stabilized = last.result.stabilized && prev.result.stabilized && out.residual < eps;
  return out;
}

Complex inner_lebesgue_variant(const IntegralTable& table, const SplitSpec& split,
                               const OuterBox& box, double eps) {
  split.validate();
  if (split.m != table.dim())
    throw std::invalid_argument("inner_lebesgue_variant: dimension mismatch");
  if (!table.source().abs_integrable)
    throw std::invalid_argument("inner_lebesgue_variant: integrand '" + table.source().label +
                                "' is not tagged inner-absolutely-integrable");

  const IntegrandSource& f = table.source();
  const QuadParams& qp = table.params();
  const auto& rule = gauss_legendre(qp.q);
  const int p = split.p, q = split.q;

  double inner_cap = table.extent(split.inner_axes[0]);
  for (int a : split.inner_axes) inner_cap = std::min(inner_cap, table.extent(a));
  const auto ladder = inner_ladder(qp.delta, inner_cap);

  // Inner full-octant integral at a fixed outer point, grown rung by rung and
  // stabilized on the absolute integral.
  auto inner_at = [&](const double* outer_point) {
    double point[kMaxDim];
    for (int i = 0; i < p; ++i)
      point[split.outer_axes[static_cast<std::size_t>(i)]] = outer_point[i];

    KahanComplexSum signed_sum;
    KahanSum abs_sum;
    double prev_abs = 0.0;
    std::int64_t covered_cells = 0;  // cells with max inner index < covered_cells are done
    for (std::size_t r = 0; r < ladder.size(); ++r) {
      const auto cells_now = static_cast<std::int64_t>(std::round(ladder[r] / qp.delta));
      // Sweep the newly exposed inner cells (those with max cell index in
      // [covered_cells, cells_now)).
      std::int64_t combo_count = 1;
      for (int i = 0; i < q; ++i) combo_count *= cells_now;
      for (std::int64_t c = 0; c < combo_count; ++c) {
        std::int64_t rest = c;
        std::int64_t cell[kMaxDim];
        std::int64_t max_cell = 0;
        for (int i = q - 1; i >= 0; --i) {
          cell[i] = rest % cells_now;
          rest /= cells_now;
          max_cell = std::max(max_cell, cell[i]);
        }
        if (max_cell < covered_cells) continue;  // already accumulated
        // Tensor rule over this inner cell at the fixed outer point.
        double center[kMaxDim], half[kMaxDim];
        double scale = 1.0;
        for (int i = 0; i < q; ++i) {
          const double lo = static_cast<double>(cell[i]) * qp.delta;
          center[i] = lo + 0.5 * qp.delta;
          half[i] = 0.5 * qp.delta;
          scale *= half[i];
        }
        int cursor[kMaxDim] = {0};
        while (true) {
          double w = scale;
          for (int i = 0; i < q; ++i) {
            point[split.inner_axes[static_cast<std::size_t>(i)]] =
                center[i] + half[i] * rule.nodes[static_cast<std::size_t>(cursor[i])];
            w *= rule.weights[static_cast<std::size_t>(cursor[i])];
          }
          const Complex fv = f.eval(std::span<const double>(point, static_cast<std::size_t>(split.m)));
          signed_sum.add(w * fv);
          abs_sum.add(w * std::abs(fv));
          int i = q - 1;
          while (i >= 0) {
            if (++cursor[i] < qp.q) break;
            cursor[i] = 0;
            --i;
          }
          if (i < 0) break;
        }
      }
      covered_cells = cells_now;
      if (r > 0 && std::abs(abs_sum.value() - prev_abs) < eps) return signed_sum.value();
      prev_abs = abs_sum.value();
    }
    std::string where = "(";
    for (int i = 0; i < p; ++i) where += (i ? "," : "") + std::to_string(outer_point[i]);
    throw EvalError("inner integral did not stabilize absolutely at outer node " + where + ")");
  };

  // Outer composite quadrature over the box, cells clipped to it.
  KahanComplexSum outer_sum;
  std::int64_t outer_cells[kMaxDim];
  std::int64_t outer_count = 1;
  double lo_clip[kMaxDim], hi_clip[kMaxDim];
  for (int i = 0; i < p; ++i) {
    const int axis = split.outer_axes[static_cast<std::size_t>(i)];
    if (box.u[static_cast<std::size_t>(i)] < 0 ||
        box.v[static_cast<std::size_t>(i)] > table.extent(axis))
      throw std::out_of_range("inner_lebesgue_variant: outer box leaves the grid");
    outer_cells[i] = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(
               std::ceil((box.v[static_cast<std::size_t>(i)] - box.u[static_cast<std::size_t>(i)]) /
                         qp.delta)));
    outer_count *= outer_cells[i];
  }
  for (std::int64_t c = 0; c < outer_count; ++c) {
    std::int64_t rest = c;
    for (int i = p - 1; i >= 0; --i) {
      const std::int64_t ci = rest % outer_cells[i];
      rest /= outer_cells[i];
      const double u = box.u[static_cast<std::size_t>(i)];
      const double v = box.v[static_cast<std::size_t>(i)];
      lo_clip[i] = std::min(v, u + static_cast<double>(ci) * qp.delta);
      hi_clip[i] = std::min(v, u + static_cast<double>(ci + 1) * qp.delta);
    }
    double center[kMaxDim], half[kMaxDim];
    double scale = 1.0;
    for (int i = 0; i < p; ++i) {
      center[i] = 0.5 * (lo_clip[i] + hi_clip[i]);
      half[i] = 0.5 * (hi_clip[i] - lo_clip[i]);
      scale *= half[i];
    }
    if (scale == 0.0) continue;
    double outer_point[kMaxDim];
    int cursor[kMaxDim] = {0};
    while (true) {
      double w = scale;
      for (int i = 0; i < p; ++i) {
        outer_point[i] = center[i] + half[i] * rule.nodes[static_cast<std::size_t>(cursor[i])];
        w *= rule.weights[static_cast<std::size_t>(cursor[i])];
      }
      outer_sum.add(w * inner_at(outer_point));
      int i = p - 1;
      while (i >= 0) {
        if (++cursor[i] < qp.q) break;
        cursor[i] = 0;
        --i;
      }
      if (i < 0) break;
    }
  }
  return outer_sum.value();
}

LadderResult repeated_split(const IntegralTable& table, std::span<const SplitSpec> chain,
                            double eps) {
  if (chain.empty()) throw std::invalid_argument("repeated_split: empty chain");
  if (chain[0].m != table.dim())
    throw std::invalid_argument("repeated_split: chain does not start at the table dimension");
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (chain[i + 1].m != chain[i].p)
      throw std::invalid_argument("repeated_split: stage " + std::to_string(i + 1) +
                                  " must act on the previous stage's outer axes");
  }
  for (const auto& s : chain) s.validate();

  // Box evaluator over the current stage's axes; stage 0 is the table itself.
  using Evaluator = std::function<Complex(const std::vector<double>&, const std::vector<double>&)>;
  const double delta = table.params().delta;

  Evaluator eval = [&table](const std::vector<double>& lo, const std::vector<double>& hi) {
    return table.subrect_integral(RealBox(lo, hi));
  };
  // Original axis behind each current-stage axis, for per-axis extents.
  std::vector<int> axis_map(static_cast<std::size_t>(table.dim()));
  for (int a = 0; a < table.dim(); ++a) axis_map[static_cast<std::size_t>(a)] = a;

  bool all_stabilized = true;

  for (const auto& split : chain) {
    auto cache = std::make_shared<std::map<std::vector<double>, Complex>>();
    double inner_cap = table.extent(axis_map[static_cast<std::size_t>(split.inner_axes[0])]);
    for (int a : split.inner_axes)
      inner_cap = std::min(inner_cap, table.extent(axis_map[static_cast<std::size_t>(a)]));

    Evaluator next = [prev = eval, split, cache, delta, inner_cap, eps, &all_stabilized](
                         const std::vector<double>& lo, const std::vector<double>& hi) {
      std::vector<double> key;
      key.reserve(lo.size() * 2);
      key.insert(key.end(), lo.begin(), lo.end());
      key.insert(key.end(), hi.begin(), hi.end());
      if (auto it = cache->find(key); it != cache->end()) return it->second;

      auto value_at = [&](double w) {
        std::vector<double> full_lo(static_cast<std::size_t>(split.m), 0.0);
        std::vector<double> full_hi(static_cast<std::size_t>(split.m), 0.0);
        for (int i = 0; i < split.p; ++i) {
          full_lo[static_cast<std::size_t>(split.outer_axes[static_cast<std::size_t>(i)])] =
              lo[static_cast<std::size_t>(i)];
          full_hi[static_cast<std::size_t>(split.outer_axes[static_cast<std::size_t>(i)])] =
              hi[static_cast<std::size_t>(i)];
        }
        for (int a : split.inner_axes)
          full_hi[static_cast<std::size_t>(a)] = std::min(w, inner_cap);
        return prev(full_lo, full_hi);
      };
      const LadderResult lr = run_ladder(value_at, delta, inner_cap, eps);
      if (!lr.stabilized) all_stabilized = false;
      cache->emplace(std::move(key), lr.value);
      return lr.value;
    };
    eval = next;

    std::vector<int> next_map;
    for (int a : split.outer_axes) next_map.push_back(axis_map[static_cast<std::size_t>(a)]);
    axis_map = next_map;
  }

  // Final Pringsheim ladder on the last stage's J(0, v*1).
  double cap = table.extent(axis_map[0]);
  for (int a : axis_map) cap = std::min(cap, table.extent(a));
  auto value_at = [&](double v) {
    std::vector<double> lo(axis_map.size(), 0.0);
    std::vector<double> hi(axis_map.size(), v);
    return eval(lo, hi);
  };
  LadderResult out = run_ladder(value_at, delta, cap, eps);
  out.stabilized = out.stabilized && all_stabilized;
  return out;
}

std::vector<SplitSpec> unit_split_chain(int m) {
  std::vector<SplitSpec> chain;
  for (int d = m; d >= 2; --d) chain.push_back(SplitSpec::leading(d, d - 1));
  return chain;
}

std::vector<OuterBox> default_probe_set(const IntegralTable& table, const SplitSpec& split) {
  const double delta = table.params().delta;
  double extent = table.extent(split.outer_axes[0]);
  for (int a : split.outer_axes) extent = std::min(extent, table.extent(a));
  auto snap = [&](double x) { return std::max(0.0, std::round(x / delta) * delta); };

  const int p = split.p;
  std::vector<OuterBox> probes;

  // 5x5 moderate-u grid over the first two outer axes; width extent/4.
  const double step = snap(extent / 16.0);
  const double width = std::max(delta * 2.0, snap(extent / 4.0));
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (p == 1 && j > 0) continue;
      OuterBox b;
      b.u.assign(static_cast<std::size_t>(p), static_cast<double>(i) * step);
      if (p >= 2) b.u[1] = static_cast<double>(j) * step;
      b.v = b.u;
      for (auto& x : b.v) x += width;
      probes.push_back(std::move(b));
    }
  }

  // Deep-tail boxes for the rho_3 search.
  for (double frac : {0.25, 0.375, 0.5, 0.625, 0.75}) {
    OuterBox b;
    b.u.assign(static_cast<std::size_t>(p), snap(extent * frac));
    b.v = b.u;
    for (auto& x : b.v) x += std::max(delta * 2.0, snap(extent / 8.0));
    probes.push_back(std::move(b));
  }

  // The (0, v*1) chain.
  for (double v = 4.0 * delta; v < extent; v *= 2.0) {
    OuterBox b;
    b.u.assign(static_cast<std::size_t>(p), 0.0);
    b.v.assign(static_cast<std::size_t>(p), v);
    probes.push_back(std::move(b));
  }
  OuterBox full;
  full.u.assign(static_cast<std::size_t>(p), 0.0);
  full.v.assign(static_cast<std::size_t>(p), extent);
  probes.push_back(std::move(full));

  return probes;
}

}  // namespace regconv
