#include "regconv/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace regconv {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::pringsheim: return "pringsheim";
    case Mode::regular: return "regular";
    case Mode::absolute: return "absolute";
    case Mode::complete: return "complete";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::satisfied_at_horizon: return "satisfied-at-horizon";
    case Status::violated: return "violated";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace detail {

namespace {

struct StratumCell {
  double value = -1.0;
  std::optional<LatticeBox> box;

  // Total order: larger magnitude wins, ties broken toward the
  // lexicographically smallest box, so merges are partition-independent.
  void offer(double v, const LatticeBox& b) {
    if (v > value) {
      value = v;
      box = b;
    } else if (v == value && box &&
               (b.lo.lex_less(box->lo) ||
                (b.lo == box->lo && b.hi.lex_less(box->hi)))) {
      box = b;
    }
  }

  void merge(const StratumCell& other) {
    if (!other.box) return;
    offer(other.value, *other.box);
  }
};

struct ScanAccum {
  std::vector<StratumCell> all;
  std::vector<StratumCell> single;

  explicit ScanAccum(std::size_t n) : all(n), single(n) {}

  void offer(const LatticeBox& box, double mag) {
    const auto t = static_cast<std::size_t>(box.lo.max_coord());
    all[t].offer(mag, box);
    if (box.lo == box.hi) single[t].offer(mag, box);
  }

  void merge(const ScanAccum& other) {
    for (std::size_t i = 0; i < all.size(); ++i) {
      all[i].merge(other.all[i]);
      single[i].merge(other.single[i]);
    }
  }
};

// Extent ladder {0, 1, 2, 4, ...} capped at len-1 and always including it.
std::vector<std::int64_t> extent_ladder(std::int64_t len) {
  std::vector<std::int64_t> e{0};
  for (std::int64_t v = 1; v < len; v *= 2) e.push_back(v);
  if (e.back() != len - 1) e.push_back(len - 1);
  return e;
}

}  // namespace

BoxScanResult scan_boxes(const MultiIndex& max_pos,
                         const std::function<double(const LatticeBox&)>& magnitude,
                         std::int64_t box_budget) {
  const int m = max_pos.dim();
  const std::int64_t top = max_pos.max_coord();
  const std::size_t n_strata = static_cast<std::size_t>(top + 1);

  double total_boxes = 1.0;
  for (int p = 0; p < m; ++p) {
    const double len = static_cast<double>(max_pos[p] + 1);
    total_boxes *= len * (len + 1.0) / 2.0;
  }
  const bool exhaustive = total_boxes <= static_cast<double>(box_budget);

  BoxScanResult result;
  result.exhaustive = exhaustive;

  const LatticeBox domain(MultiIndex::zeros(m), max_pos);
  const std::int64_t k_count = domain.volume();

  int n_threads = 1;
#ifdef _OPENMP
  n_threads = omp_get_max_threads();
#endif
  std::vector<ScanAccum> accums(static_cast<std::size_t>(n_threads), ScanAccum(n_strata));
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_threads), 0);

  if (exhaustive) {
#pragma omp parallel for schedule(static)
    for (std::int64_t kr = 0; kr < k_count; ++kr) {
      int tid = 0;
#ifdef _OPENMP
      tid = omp_get_thread_num();
#endif
      auto& acc = accums[static_cast<std::size_t>(tid)];
      const MultiIndex k = box_unrank(domain, kr);
      for_each_index(LatticeBox(k, max_pos), [&](const MultiIndex& l) {
        const LatticeBox box(k, l);
        acc.offer(box, magnitude(box));
        ++counts[static_cast<std::size_t>(tid)];
      });
    }
  } else {
    // (a) Axis-aligned slabs: one axis takes every (k_p, l_p) pair, the rest
    // span their whole range. Cheap and catches non-decaying strips.
    for (int p = 0; p < m; ++p) {
      const std::int64_t len = max_pos[p] + 1;
      for (std::int64_t k = 0; k < len; ++k) {
        for (std::int64_t l = k; l < len; ++l) {
          MultiIndex lo = MultiIndex::zeros(m);
          MultiIndex hi = max_pos;
          lo[p] = k;
          hi[p] = l;
          const LatticeBox box(lo, hi);
          accums[0].offer(box, magnitude(box));
          ++counts[0];
        }
      }
    }

    // (b) Boxes with geometric-ladder extents anchored on a strided lattice.
    // Strides double until the sample fits the budget; fully deterministic.
    std::vector<std::vector<std::int64_t>> extents(static_cast<std::size_t>(m));
    for (int p = 0; p < m; ++p) extents[static_cast<std::size_t>(p)] = extent_ladder(max_pos[p] + 1);

    std::vector<std::int64_t> stride(static_cast<std::size_t>(m), 1);
    auto sample_size = [&] {
      double n = 1.0;
      for (int p = 0; p < m; ++p) {
        const double anchors =
            std::floor(static_cast<double>(max_pos[p]) / static_cast<double>(stride[static_cast<std::size_t>(p)])) + 1.0;
        n *= anchors * static_cast<double>(extents[static_cast<std::size_t>(p)].size());
      }
      return n;
    };
    while (sample_size() > static_cast<double>(box_budget)) {
      bool grew = false;
      for (int p = 0; p < m; ++p) {
        if (stride[static_cast<std::size_t>(p)] <= max_pos[p]) {
          stride[static_cast<std::size_t>(p)] *= 2;
          grew = true;
        }
      }
      if (!grew) break;
    }

    std::vector<std::int64_t> anchors_per_axis(static_cast<std::size_t>(m));
    std::vector<std::int64_t> combos_per_axis(static_cast<std::size_t>(m));
    std::int64_t combos = 1;
    for (int p = 0; p < m; ++p) {
      anchors_per_axis[static_cast<std::size_t>(p)] =
          max_pos[p] / stride[static_cast<std::size_t>(p)] + 1;
      combos_per_axis[static_cast<std::size_t>(p)] =
          anchors_per_axis[static_cast<std::size_t>(p)] *
          static_cast<std::int64_t>(extents[static_cast<std::size_t>(p)].size());
      combos *= combos_per_axis[static_cast<std::size_t>(p)];
    }

#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < combos; ++r) {
      int tid = 0;
#ifdef _OPENMP
      tid = omp_get_thread_num();
#endif
      auto& acc = accums[static_cast<std::size_t>(tid)];
      MultiIndex lo = MultiIndex::zeros(m);
      MultiIndex hi = MultiIndex::zeros(m);
      std::int64_t rest = r;
      bool valid = true;
      for (int p = m - 1; p >= 0; --p) {
        const std::int64_t cp = combos_per_axis[static_cast<std::size_t>(p)];
        const std::int64_t local = rest % cp;
        rest /= cp;
        const std::int64_t n_ext =
            static_cast<std::int64_t>(extents[static_cast<std::size_t>(p)].size());
        const std::int64_t anchor = (local / n_ext) * stride[static_cast<std::size_t>(p)];
        const std::int64_t ext = extents[static_cast<std::size_t>(p)][static_cast<std::size_t>(local % n_ext)];
        if (anchor + ext > max_pos[p]) {
          valid = false;
          break;
        }
        lo[p] = anchor;
        hi[p] = anchor + ext;
      }
      if (!valid) continue;
      const LatticeBox box(lo, hi);
      acc.offer(box, magnitude(box));
      ++counts[static_cast<std::size_t>(tid)];
    }
  }

  ScanAccum merged(n_strata);
  for (const auto& acc : accums) merged.merge(acc);

  result.strata_max.assign(n_strata, 0.0);
  result.strata_arg.assign(n_strata, std::nullopt);
  result.single_max.assign(n_strata, 0.0);
  result.single_arg.assign(n_strata, std::nullopt);
  for (std::size_t i = 0; i < n_strata; ++i) {
    if (merged.all[i].box) {
      result.strata_max[i] = merged.all[i].value;
      result.strata_arg[i] = merged.all[i].box;
    }
    if (merged.single[i].box) {
      result.single_max[i] = merged.single[i].value;
      result.single_arg[i] = merged.single[i].box;
    }
  }
  for (auto c : counts) result.scanned += c;
  return result;
}

Verdict assemble_regular_verdict(const BoxScanResult& scan, Mode mode, double eps,
                                 const MultiIndex& horizon, std::int64_t top,
                                 const std::function<Complex()>& estimate_when_satisfied) {
  Verdict v;
  v.mode = mode;
  v.eps = eps;
  v.horizon = horizon;

  std::int64_t lambda_max = top - validation_margin(top);
  if (lambda_max < 0) lambda_max = 0;

  // suffix[t] = max magnitude over strata t..top
  std::vector<double> suffix(static_cast<std::size_t>(top + 2), 0.0);
  for (std::int64_t t = top; t >= 0; --t)
    suffix[static_cast<std::size_t>(t)] =
        std::max(scan.strata_max[static_cast<std::size_t>(t)], suffix[static_cast<std::size_t>(t + 1)]);

  std::optional<std::int64_t> lambda;
  for (std::int64_t t = 0; t <= lambda_max; ++t) {
    if (suffix[static_cast<std::size_t>(t + 1)] < eps) {
      lambda = t;
      break;
    }
  }

  v.detail = std::string(scan.exhaustive ? "exhaustive" : "sampled") + " scan of " +
             std::to_string(scan.scanned) + " boxes, threshold search up to " +
             std::to_string(lambda_max);

  if (lambda) {
    v.status = Status::satisfied_at_horizon;
    v.witness = *lambda;
    v.residual = suffix[static_cast<std::size_t>(*lambda + 1)];
    v.estimate = estimate_when_satisfied();
    return v;
  }

  v.status = Status::violated;
  v.residual = suffix[static_cast<std::size_t>(lambda_max + 1)];

  // Witness: a single-cell violator when one exists, else the worst box.
  StratumCell best_single, best_any;
  for (std::int64_t t = lambda_max + 1; t <= top; ++t) {
    const auto i = static_cast<std::size_t>(t);
    if (scan.single_arg[i] && scan.single_max[i] >= eps)
      best_single.offer(scan.single_max[i], *scan.single_arg[i]);
    if (scan.strata_arg[i]) best_any.offer(scan.strata_max[i], *scan.strata_arg[i]);
  }
  if (best_single.box)
    v.witness_box = best_single.box;
  else if (best_any.box)
    v.witness_box = best_any.box;
  return v;
}

}  // namespace detail

double max_deviation_beyond(const PartialSumTable& table, Complex estimate,
                            std::int64_t threshold) {
  const int m = table.dim();
  const LatticeBox domain(MultiIndex::zeros(m), table.horizon());
  const std::int64_t n = domain.volume();
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (std::int64_t i = 0; i < n; ++i) {
    const MultiIndex idx = box_unrank(domain, i);
    if (idx.min_coord() <= threshold) continue;
    const double dev = std::abs(table.cell(idx) - estimate);
    if (dev > worst) worst = dev;
  }
  return worst;
}

Verdict pringsheim_diagnose(const PartialSumTable& table, double eps) {
  const int m = table.dim();
  for (int p = 0; p < m; ++p)
    if (table.horizon()[p] < 3)
      throw std::invalid_argument("pringsheim_diagnose: horizon must be >= 3 per axis");
  if (eps <= 0) throw std::invalid_argument("pringsheim_diagnose: eps must be positive");

  const Complex est = table.cell(table.horizon());
  const std::int64_t minh = table.horizon().min_coord();

  // Stratum maxima of |cell - estimate| grouped by min{l}.
  std::vector<double> strata(static_cast<std::size_t>(minh + 1), 0.0);
  const LatticeBox domain(MultiIndex::zeros(m), table.horizon());
  const std::int64_t n = domain.volume();
  int n_threads = 1;
#ifdef _OPENMP
  n_threads = omp_get_max_threads();
#endif
  std::vector<std::vector<double>> local(static_cast<std::size_t>(n_threads),
                                         std::vector<double>(static_cast<std::size_t>(minh + 1), 0.0));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    int tid = 0;
#ifdef _OPENMP
    tid = omp_get_thread_num();
#endif
    const MultiIndex idx = box_unrank(domain, i);
    const std::int64_t t = idx.min_coord();
    const double dev = std::abs(table.cell(idx) - est);
    auto& slot = local[static_cast<std::size_t>(tid)][static_cast<std::size_t>(t)];
    if (dev > slot) slot = dev;
  }
  for (const auto& l : local)
    for (std::size_t i = 0; i < strata.size(); ++i) strata[i] = std::max(strata[i], l[i]);

  std::int64_t lambda_max = minh - validation_margin(minh);
  if (lambda_max < 0) lambda_max = 0;

  std::vector<double> suffix(static_cast<std::size_t>(minh + 2), 0.0);
  for (std::int64_t t = minh; t >= 0; --t)
    suffix[static_cast<std::size_t>(t)] =
        std::max(strata[static_cast<std::size_t>(t)], suffix[static_cast<std::size_t>(t + 1)]);

  Verdict v;
  v.mode = Mode::pringsheim;
  v.eps = eps;
  v.horizon = table.horizon();
  v.detail = "threshold search up to " + std::to_string(lambda_max) + " of min-horizon " +
             std::to_string(minh);

  for (std::int64_t t = 0; t <= lambda_max; ++t) {
    if (suffix[static_cast<std::size_t>(t + 1)] < eps) {
      v.status = Status::satisfied_at_horizon;
      v.witness = t;
      v.residual = suffix[static_cast<std::size_t>(t + 1)];
      v.estimate = est;
      return v;
    }
  }
  v.status = Status::violated;
  v.residual = suffix[static_cast<std::size_t>(lambda_max + 1)];
  return v;
}

Verdict regular_diagnose_direct(const PartialSumTable& table, double eps,
                                std::int64_t box_budget) {
  if (eps <= 0) throw std::invalid_argument("regular_diagnose_direct: eps must be positive");
  const auto scan = detail::scan_boxes(
      table.horizon(),
      [&table](const LatticeBox& box) { return std::abs(table.subrect_sum(box)); }, box_budget);
  return detail::assemble_regular_verdict(scan, Mode::regular, eps, table.horizon(),
                                          table.horizon().max_coord(),
                                          [&table] { return table.cell(table.horizon()); });
}

Verdict regular_diagnose_recursive(const TermSource& src, double eps, const MultiIndex& horizon,
                                   std::optional<std::int64_t> pin_depth_override) {
  if (src.dim != horizon.dim())
    throw std::invalid_argument("regular_diagnose_recursive: dimension mismatch");
  const int m = src.dim;

  if (m == 1) {
    const auto table = PartialSumTable::build(src, horizon);
    Verdict v = regular_diagnose_direct(table, eps);
    v.detail = "ordinary 1-d tail check: " + v.detail;
    return v;
  }

  const auto table = PartialSumTable::build(src, horizon);
  Verdict top = pringsheim_diagnose(table, eps);
  if (top.status != Status::satisfied_at_horizon) {
    Verdict v = top;
    v.mode = Mode::regular;
    v.estimate = std::nullopt;
    v.detail = "top-level Pringsheim check failed: " + top.detail;
    return v;
  }

  const std::int64_t pin_depth = pin_depth_override.value_or(*top.witness);
  std::int64_t witness = *top.witness;
  double residual = top.residual;

  for (int p = 0; p < m; ++p) {
    const MultiIndex sub_horizon = horizon.with_axis_removed(p);
    for (std::int64_t j = 0; j <= pin_depth; ++j) {
      const std::pair<int, std::int64_t> pin{p, j};
      const TermSource sub = subseries(src, std::span(&pin, 1));
      const Verdict rec = regular_diagnose_recursive(sub, eps, sub_horizon, std::nullopt);
      if (rec.status != Status::satisfied_at_horizon) {
        Verdict v;
        v.mode = Mode::regular;
        v.status = Status::violated;
        v.eps = eps;
        v.horizon = horizon;
        v.residual = rec.residual;
        v.witness_box = rec.witness_box;
        v.pinned_failure = PinnedFailure{p, {j}};
        v.detail = "subseries pinned at axis " + std::to_string(p) + ", j=" + std::to_string(j) +
                   " failed: " + rec.detail;
        return v;
      }
      if (rec.witness && *rec.witness > witness) witness = *rec.witness;
      residual = std::max(residual, rec.residual);
    }
  }

  Verdict v;
  v.mode = Mode::regular;
  v.status = Status::satisfied_at_horizon;
  v.eps = eps;
  v.horizon = horizon;
  v.witness = witness;
  v.residual = residual;
  v.estimate = top.estimate;
  v.detail = "Pringsheim + all subseries to pin depth " + std::to_string(pin_depth);
  return v;
}

Verdict absolute_diagnose(const TermSource& src, double eps, const MultiIndex& horizon,
                          std::int64_t box_budget) {
  TermSource abs_src;
  abs_src.dim = src.dim;
  abs_src.label = src.label + "|abs";
  abs_src.eval = [eval = src.eval](const MultiIndex& idx) {
    return Complex{std::abs(eval(idx)), 0.0};
  };
  const auto table = PartialSumTable::build(abs_src, horizon);
  Verdict v = regular_diagnose_direct(table, eps, box_budget);
  v.mode = Mode::absolute;
  const Complex total = table.cell(horizon);
  if (v.status == Status::satisfied_at_horizon) v.estimate = total;
  v.detail += "; partial sum of |c| = " + std::to_string(total.real());
  return v;
}

Verdict complete_diagnose(const TermSource& src, double eps, const MultiIndex& horizon,
                          std::optional<std::int64_t> pin_depth_override) {
  const int m = src.dim;
  if (m < 2) throw std::invalid_argument("complete_diagnose: requires dim >= 2");
  if (src.dim != horizon.dim())
    throw std::invalid_argument("complete_diagnose: dimension mismatch");

  const auto table = PartialSumTable::build(src, horizon);
  Verdict top = pringsheim_diagnose(table, eps);
  if (top.status != Status::satisfied_at_horizon) {
    Verdict v = top;
    v.mode = Mode::complete;
    v.estimate = std::nullopt;
    v.detail = "Pringsheim check failed: " + top.detail;
    return v;
  }

  const std::int64_t pin_depth = pin_depth_override.value_or(*top.witness);
  std::int64_t witness = *top.witness;
  double residual = top.residual;

  for (int p = 0; p < m; ++p) {
    // All pin combinations of the other axes over {0..pin_depth}^(m-1).
    const MultiIndex pin_horizon = MultiIndex::filled(m - 1, pin_depth);
    const LatticeBox pin_domain(MultiIndex::zeros(m - 1), pin_horizon);
    bool failed = false;
    Verdict failure;
    for_each_index(pin_domain, [&](const MultiIndex& combo) {
      if (failed) return;
      std::vector<std::pair<int, std::int64_t>> pins;
      int k = 0;
      for (int q = 0; q < m; ++q)
        if (q != p) pins.emplace_back(q, combo[k++]);
      const TermSource line = subseries(src, std::span<const std::pair<int, std::int64_t>>(pins));
      const auto line_table = PartialSumTable::build(line, MultiIndex::filled(1, horizon[p]));
      const Verdict lv = regular_diagnose_direct(line_table, eps);
      if (lv.status != Status::satisfied_at_horizon) {
        failed = true;
        failure = lv;
        failure.pinned_failure = PinnedFailure{p, {}};
        for (const auto& [axis, val] : pins) failure.pinned_failure->pins.push_back(val);
        std::string combo_str;
        for (const auto& [axis, val] : pins)
          combo_str += " j_" + std::to_string(axis) + "=" + std::to_string(val);
        failure.detail = "single-index series along axis " + std::to_string(p) +
                         " with pins" + combo_str + " failed: " + lv.detail;
        return;
      }
      if (lv.witness && *lv.witness > witness) witness = *lv.witness;
      residual = std::max(residual, lv.residual);
    });
    if (failed) {
      Verdict v = failure;
      v.mode = Mode::complete;
      v.status = Status::violated;
      v.eps = eps;
      v.horizon = horizon;
      v.estimate = std::nullopt;
      v.pinned_failure->axis = p;
      return v;
    }
  }

  Verdict v;
  v.mode = Mode::complete;
  v.status = Status::satisfied_at_horizon;
  v.eps = eps;
  v.horizon = horizon;
  v.witness = witness;
  v.residual = residual;
  v.estimate = top.estimate;
  v.detail = "Pringsheim + all single-index lines to pin depth " + std::to_string(pin_depth);
  return v;
}

}  // namespace regconv
