// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Each criterion pins its tolerances in code; run it via
//   regconv_acceptance --cli <path-to-regconv-binary>
// (the CLI path is needed only for the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <sys/wait.h>

#include "oracles.hpp"
#include "regconv/corpus.hpp"
#include "regconv/fubini.hpp"
#include "regconv/successive.hpp"

using namespace regconv;

namespace {

std::string g_cli_path;

struct Check {
  bool ok = true;
  std::string message;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      message = what;
    }
  }
};

// ---------------------------------------------------------------------------
// 1. Corner-query exactness against the nested-loop oracle.
// ---------------------------------------------------------------------------
Check criterion_1() {
  Check c;
  std::mt19937_64 rng(20250810);
  for (int m = 1; m <= 4; ++m) {
    const std::int64_t max_h = (m == 4) ? 6 : 8;
    for (int source_id = 0; source_id < 1000; ++source_id) {
      MultiIndex horizon = MultiIndex::zeros(m);
      for (int p = 0; p < m; ++p)
        horizon[p] = 3 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(max_h - 2));
      const auto src = oracles::random_integer_source(m, horizon, rng());
      const auto table = PartialSumTable::build(src, horizon);
      for (int b = 0; b < 100; ++b) {
        MultiIndex lo = MultiIndex::zeros(m), hi = MultiIndex::zeros(m);
        for (int p = 0; p < m; ++p) {
          std::int64_t x = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(horizon[p] + 1));
          std::int64_t y = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(horizon[p] + 1));
          if (x > y) std::swap(x, y);
          lo[p] = x;
          hi[p] = y;
        }
        const LatticeBox box(lo, hi);
        if (table.subrect_sum(box) != oracles::nested_loop_sum(src, box)) {
          c.expect(false, "mismatch at m=" + std::to_string(m) + " box " + box.to_string());
          return c;
        }
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 2. The direct and recursive regular diagnoses agree.
// ---------------------------------------------------------------------------
Check criterion_2() {
  Check c;
  for (const auto& entry : series_corpus()) {
    const auto table = PartialSumTable::build(entry.source, entry.test_horizon);
    const Verdict direct = regular_diagnose_direct(table, entry.test_eps);
    const Verdict recursive =
        regular_diagnose_recursive(entry.source, entry.test_eps, entry.test_horizon);
    c.expect(direct.status == recursive.status,
             "corpus " + entry.source.label + " m=" + std::to_string(entry.source.dim) +
                 ": direct " + to_string(direct.status) + " vs recursive " +
                 to_string(recursive.status));
  }

  std::mt19937_64 rng(424242);
  int checked = 0;
  auto compare = [&](const TermSource& src, double eps, const MultiIndex& horizon) {
    const auto table = PartialSumTable::build(src, horizon);
    const Verdict direct = regular_diagnose_direct(table, eps);
    const Verdict recursive = regular_diagnose_recursive(src, eps, horizon);
    c.expect(direct.status == recursive.status,
             src.label + " #" + std::to_string(checked) + ": direct " +
                 to_string(direct.status) + " vs recursive " + to_string(recursive.status));
    ++checked;
  };

  // (a) finite-support integer sources: regular at any horizon beyond support
  for (int i = 0; i < 80; ++i) {
    const int m = (i % 2) ? 2 : 3;
    const MultiIndex support = MultiIndex::filled(m, 5);
    auto base = oracles::random_integer_source(m, support, rng(), 3);
    TermSource src;
    src.dim = m;
    src.label = "finite-support";
    src.eval = [base, support](const MultiIndex& j) {
      for (int p = 0; p < support.dim(); ++p)
        if (j[p] > support[p]) return Complex{0.0, 0.0};
      return base.eval(j);
    };
    compare(src, 0.5, MultiIndex::filled(m, 12));
  }

  // (b) geometric decay with random sign flips: absolutely summable
  for (int i = 0; i < 60; ++i) {
    const int m = (i % 2) ? 2 : 3;
    std::vector<double> rates(static_cast<std::size_t>(m));
    for (auto& r : rates) r = 0.3 + 0.2 * static_cast<double>(rng() % 1000) / 1000.0;
    const auto signs = oracles::random_integer_source(m, MultiIndex::filled(m, 12), rng(), 1);
    TermSource src;
    src.dim = m;
    src.label = "geometric-signed";
    src.eval = [rates, signs, m](const MultiIndex& j) {
      double v = signs.eval(j).real() >= 0 ? 1.0 : -1.0;
      for (int p = 0; p < m; ++p)
        v *= std::pow(rates[static_cast<std::size_t>(p)], static_cast<double>(j[p]));
      return Complex{v, 0.0};
    };
    compare(src, 0.05, MultiIndex::filled(m, 12));
  }

  // (c) planted divergent line at a small offset: violated either way
  for (int i = 0; i < 60; ++i) {
    const std::int64_t offset = static_cast<std::int64_t>(rng() % 5);
    const double scale = 1.0 + static_cast<double>(rng() % 3);
    TermSource src;
    src.dim = 2;
    src.label = "planted-line";
    src.eval = [offset, scale](const MultiIndex& j) {
      if (j[1] == offset) return Complex{scale * static_cast<double>(j[0] + 1), 0.0};
      if (j[1] == offset + 1) return Complex{-scale * static_cast<double>(j[0] + 1), 0.0};
      return Complex{0.0, 0.0};
    };
    compare(src, 0.5, MultiIndex::filled(2, 12));
  }

  c.expect(checked == 200, "expected 200 random sources, ran " + std::to_string(checked));
  return c;
}

// ---------------------------------------------------------------------------
// 3. Implication chain at each member's registered eps/horizon.
// ---------------------------------------------------------------------------
Check criterion_3() {
  Check c;
  for (const auto& entry : series_corpus()) {
    const double eps = entry.test_eps;
    const auto table = PartialSumTable::build(entry.source, entry.test_horizon);
    const Verdict absolute = absolute_diagnose(entry.source, eps, entry.test_horizon);
    const Verdict regular = regular_diagnose_direct(table, eps);
    const Verdict pringsheim = pringsheim_diagnose(table, eps);
    const Verdict complete = complete_diagnose(entry.source, eps, entry.test_horizon);
    const std::string who = entry.source.label + " m=" + std::to_string(entry.source.dim);

    if (absolute.status == Status::satisfied_at_horizon)
      c.expect(regular.status == Status::satisfied_at_horizon, who + ": absolute !=> regular");
    if (regular.status == Status::satisfied_at_horizon) {
      c.expect(pringsheim.status == Status::satisfied_at_horizon,
               who + ": regular !=> pringsheim");
      if (pringsheim.estimate && regular.estimate) {
        c.expect(*regular.estimate == *pringsheim.estimate, who + ": estimates differ");
        const double dev =
            max_deviation_beyond(table, *pringsheim.estimate, *regular.witness);
        c.expect(dev <= static_cast<double>(entry.source.dim) * eps,
                 who + ": deviation " + std::to_string(dev) + " beyond lambda_2 exceeds m*eps");
      }
      c.expect(complete.status == Status::satisfied_at_horizon, who + ": regular !=> complete");
    }
  }

  for (const auto& entry : integrand_corpus()) {
    const double eps = entry.test_eps;
    const IntegralTable table(entry.source, entry.params, entry.test_cells);
    const IntegralTable abs_table(abs_integrand(entry.source), entry.params, entry.test_cells);
    const Verdict absolute = abs_table.regular_diagnose(eps);
    const Verdict regular = table.regular_diagnose(eps);
    const Verdict pringsheim = table.pringsheim_diagnose(eps);
    const std::string who = entry.source.label + " m=" + std::to_string(entry.source.dim);

    if (absolute.status == Status::satisfied_at_horizon)
      c.expect(regular.status == Status::satisfied_at_horizon, who + ": absolute !=> regular");
    if (regular.status == Status::satisfied_at_horizon) {
      c.expect(pringsheim.status == Status::satisfied_at_horizon,
               who + ": regular !=> pringsheim");
      if (pringsheim.estimate && regular.real_witness) {
        const auto threshold = static_cast<std::int64_t>(
            std::ceil(*regular.real_witness / entry.params.delta));
        const double dev =
            max_deviation_beyond(table.cell_prefix(), *pringsheim.estimate, threshold);
        c.expect(dev <= static_cast<double>(entry.source.dim) * eps,
                 who + ": deviation beyond rho_2 exceeds m*eps");
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 4. Successive summation hits (ln 2)^m under every permutation.
// ---------------------------------------------------------------------------
Check criterion_4() {
  Check c;
  const double tol = 1e-4;
  const double budget_vs_truth = 1e-3;  // pinned by the criterion
  for (int m : {2, 3}) {
    const auto* entry = find_series("alt", m);
    if (!entry) {
      c.expect(false, "alt m=" + std::to_string(m) + " missing from the corpus");
      return c;
    }
    std::vector<int> identity(static_cast<std::size_t>(m));
    for (int p = 0; p < m; ++p) identity[static_cast<std::size_t>(p)] = p;
    const auto sweep =
        permutation_sweep(entry->source, SummationPlan::uniform(m, identity, tol));
    const double truth = std::pow(std::log(2.0), m);
    std::size_t expected_count = 1;
    for (int k = 2; k <= m; ++k) expected_count *= static_cast<std::size_t>(k);
    c.expect(sweep.results.size() == expected_count, "wrong permutation count");
    for (const auto& r : sweep.results) {
      c.expect(!r.inconclusive, "a permutation failed its tolerance");
      c.expect(std::abs(r.value.real() - truth) <= budget_vs_truth,
               "m=" + std::to_string(m) + ": |value - truth| = " +
                   std::to_string(std::abs(r.value.real() - truth)));
    }

    // Agreement with the Pringsheim estimate at the registered horizon. The
    // estimate itself carries the alternating-tail error of its horizon, so
    // the documented budget is budget_vs_truth + m * first-omitted-term.
    const auto table = PartialSumTable::build(entry->source, entry->test_horizon);
    const Complex estimate = table.cell(entry->test_horizon);
    const double est_tail = static_cast<double>(m) /
                            (static_cast<double>(entry->test_horizon.min_coord()) + 2.0);
    for (const auto& r : sweep.results) {
      c.expect(std::abs(r.value - estimate) <= budget_vs_truth + est_tail,
               "m=" + std::to_string(m) + ": successive vs Pringsheim estimate gap " +
                   std::to_string(std::abs(r.value - estimate)));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 5. Counterexample witnesses, verified against brute force at horizon 32.
// ---------------------------------------------------------------------------
Check criterion_5() {
  Check c;
  const MultiIndex horizon{32, 32};
  const auto* u = find_series("u", 2);
  c.expect(u != nullptr, "u missing");
  if (!u) return c;
  const auto table = PartialSumTable::build(u->source, horizon);

  const Verdict pringsheim = pringsheim_diagnose(table, 0.25);
  c.expect(pringsheim.status == Status::satisfied_at_horizon, "u: Pringsheim not satisfied");
  if (pringsheim.estimate)
    c.expect(std::abs(*pringsheim.estimate) == 0.0, "u: estimate is not zero");

  const Verdict regular = regular_diagnose_direct(table, 0.25);
  c.expect(regular.status == Status::violated, "u: regular not violated");
  c.expect(regular.witness_box.has_value(), "u: no witness box");
  if (regular.witness_box) {
    c.expect(regular.witness_box->lo == regular.witness_box->hi,
             "u: witness box is not a single cell");
    const Complex at_witness = oracles::nested_loop_sum(u->source, *regular.witness_box);
    c.expect(std::abs(at_witness) >= 0.25, "u: witness box does not violate");
    c.expect(table.subrect_sum(*regular.witness_box) == at_witness,
             "u: witness value disagrees with brute force");
  }

  const MultiIndex horizon3{32, 32, 32};
  const auto* dw = find_series("d-tensor-w", 3);
  c.expect(dw != nullptr, "d-tensor-w missing");
  if (!dw) return c;

  const Verdict complete = complete_diagnose(dw->source, 0.25, horizon3);
  c.expect(complete.status == Status::satisfied_at_horizon, "d-tensor-w: complete not satisfied");

  const Verdict recursive = regular_diagnose_recursive(dw->source, 0.25, horizon3);
  c.expect(recursive.status == Status::violated, "d-tensor-w: recursive regular not violated");
  c.expect(recursive.pinned_failure.has_value(), "d-tensor-w: no pinned witness");
  if (recursive.pinned_failure) {
    c.expect(recursive.pinned_failure->axis == 2, "d-tensor-w: wrong pinned axis");
    c.expect(recursive.pinned_failure->pins == std::vector<std::int64_t>{0},
             "d-tensor-w: wrong pin value");
  }

  // Brute force behind the witness: the pinned slice at the last axis = 0 is
  // the diagonal pair, whose rectangular sums alternate between 1 and 0.
  const auto slice = subseries(dw->source, {{2, 0}});
  for (std::int64_t n = 0; n + 1 <= 31; ++n) {
    const Complex s_nn =
        oracles::nested_loop_sum(slice, LatticeBox(MultiIndex{0, 0}, MultiIndex{n, n}));
    const Complex s_n1n =
        oracles::nested_loop_sum(slice, LatticeBox(MultiIndex{0, 0}, MultiIndex{n + 1, n}));
    c.expect(s_nn == Complex{1.0, 0.0}, "slice s(n,n) != 1");
    c.expect(s_n1n == Complex{0.0, 0.0}, "slice s(n+1,n) != 0");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 6. Integral engine: closed form at v = 3 and additivity residuals.
// ---------------------------------------------------------------------------
Check criterion_6() {
  Check c;
  std::mt19937_64 rng(606060);
  for (int m : {2, 4}) {
    IntegrandSource f;
    f.dim = m;
    f.label = "expo";
    f.abs_integrable = true;
    f.eval = [m](std::span<const double> t) {
      double total = 0.0;
      for (int p = 0; p < m; ++p) total += t[static_cast<std::size_t>(p)];
      return Complex{std::exp(-total), 0.0};
    };
    const IntegralTable table(f, QuadParams{0.5, 5}, MultiIndex::filled(m, 8));

    std::vector<double> v(static_cast<std::size_t>(m), 3.0);
    const double closed = std::pow(1.0 - std::exp(-3.0), m);
    const double err = std::abs(table.rect_integral(v).real() - closed);
    c.expect(err <= 1e-8,
             "m=" + std::to_string(m) + ": rect error " + std::to_string(err));

    // 100 random boxes and splits. In two dimensions the corners are fully
    // off-grid; in four the corners sit on the grid and the split point is
    // off-grid (the split cell is where the residual lives either way).
    std::uniform_real_distribution<double> lo_pick(0.0, 3.0);
    std::uniform_int_distribution<int> lo_cell(0, 6);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> lo(static_cast<std::size_t>(m)), hi(static_cast<std::size_t>(m));
      for (int p = 0; p < m; ++p) {
        double a, b;
        if (m == 2) {
          a = lo_pick(rng);
          std::uniform_real_distribution<double> hi_pick(a + 0.75, 4.0);
          b = hi_pick(rng);
        } else {
          const int k = lo_cell(rng);
          std::uniform_int_distribution<int> hi_cell(k + 2, 8);
          a = 0.5 * k;
          b = 0.5 * hi_cell(rng);
        }
        lo[static_cast<std::size_t>(p)] = a;
        hi[static_cast<std::size_t>(p)] = b;
      }
      const RealBox box(lo, hi);
      const int axis = static_cast<int>(rng() % static_cast<std::uint64_t>(m));
      std::uniform_real_distribution<double> split_pick(lo[static_cast<std::size_t>(axis)] + 0.1,
                                                        hi[static_cast<std::size_t>(axis)] - 0.1);
      const double split = split_pick(rng);
      const double residual = table.additivity_check(box, axis, split);
      const double scale = std::abs(table.subrect_integral(box));
      c.expect(residual <= 1e-10 * std::max(scale, 1e-6),
               "m=" + std::to_string(m) + ": additivity residual " + std::to_string(residual) +
                   " on " + box.to_string());
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 7. Iterated-limit pipeline at m = 4, p = q = 2.
// ---------------------------------------------------------------------------
Check criterion_7() {
  Check c;
  const SplitSpec split = SplitSpec::leading(4, 2);

  // The 25 uniformity boxes: u on a 5x5 grid with v = u + 4, sized so the
  // rung-to-rung differences dominate eps until the last rung for every box.
  auto uniformity_boxes = [] {
    std::vector<OuterBox> probes;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        OuterBox b;
        b.u = {0.5 * i, 0.5 * j};
        b.v = {0.5 * i + 4.0, 0.5 * j + 4.0};
        probes.push_back(std::move(b));
      }
    return probes;
  };
  auto tail_boxes = [] {
    std::vector<OuterBox> probes;
    for (double u : {6.0, 9.0, 12.0, 15.0, 18.0})
      probes.push_back(OuterBox{{u, u}, {u + 3.0, u + 3.0}});
    return probes;
  };
  auto chain_boxes = [] {
    std::vector<OuterBox> probes;
    for (double v : {2.0, 4.0, 8.0, 16.0, 24.0}) probes.push_back(OuterBox{{0.0, 0.0}, {v, v}});
    return probes;
  };

  {
    IntegrandSource f;
    f.dim = 4;
    f.label = "expo";
    f.abs_integrable = true;
    f.eval = [](std::span<const double> t) {
      return Complex{std::exp(-t[0] - t[1] - t[2] - t[3]), 0.0};
    };
    const double eps = 1e-6;
    const IntegralTable table(f, QuadParams{0.5, 3}, MultiIndex::filled(4, 48));

    auto probes = uniformity_boxes();
    const std::size_t n_uniformity = probes.size();
    for (auto& b : tail_boxes()) probes.push_back(b);
    for (auto& b : chain_boxes()) probes.push_back(b);

    const auto jt = uniformity_probe(table, split, probes, eps);
    c.expect(jt.all_stabilized, "expo: some probe box failed to stabilize");
    for (std::size_t i = 1; i < n_uniformity; ++i) {
      c.expect(jt.entries[i].result.inner_horizon == jt.entries[0].result.inner_horizon,
               "expo: uniformity statistic varies across the 25 probe boxes");
    }

    const Verdict jreg = j_regular_diagnose(jt, eps);
    c.expect(jreg.status == Status::satisfied_at_horizon, "expo: J-regular not satisfied");

    const auto fin = final_limit(jt, eps);
    c.expect(fin.stabilized, "expo: final limit did not stabilize");
    c.expect(std::abs(fin.value.real() - 1.0) <= 1e-6,
             "expo: |final - 1| = " + std::to_string(std::abs(fin.value.real() - 1.0)));
    const double gap = std::abs(fin.value - table.pringsheim_estimate());
    c.expect(gap <= 5.0 * eps, "expo: final vs Pringsheim gap " + std::to_string(gap));

    // Cross-check: the pointwise inner-integral path agrees
    // with the iterated limit on a moderate outer box.
    const OuterBox cross{{0.0, 0.5}, {2.0, 2.5}};
    const auto iterated = iterated_limit(table, split, cross, eps);
    const Complex variant = inner_lebesgue_variant(table, split, cross, eps);
    c.expect(std::abs(iterated.value - variant) <= 1e-6,
             "expo: inner-integral variant gap " +
                 std::to_string(std::abs(iterated.value - variant)));

    // Criterion 8 (expo half): repeated splits agree with the direct path.
    const auto chain_a =
        std::vector<SplitSpec>{SplitSpec::leading(4, 2), SplitSpec::leading(2, 1)};
    const auto r_a = repeated_split(table, chain_a, eps);
    const auto r_unit = repeated_split(table, unit_split_chain(4), eps);
    c.expect(r_a.stabilized && r_unit.stabilized, "expo: a chain failed to stabilize");
    c.expect(std::abs(r_a.value - fin.value) <= 4.0 * 5.0 * eps,
             "expo: 4->2->1 chain vs direct gap " +
                 std::to_string(std::abs(r_a.value - fin.value)));
    c.expect(std::abs(r_unit.value - fin.value) <= 4.0 * 5.0 * eps,
             "expo: unit chain vs direct gap " +
                 std::to_string(std::abs(r_unit.value - fin.value)));
  }

  {
    IntegrandSource g;
    g.dim = 4;
    g.label = "cond";
    g.smoothness = Smoothness::oscillatory;
    g.period = 2.0 * M_PI;
    g.eval = [](std::span<const double> t) {
      double v = 1.0;
      for (int p = 0; p < 4; ++p)
        v *= std::sin(t[static_cast<std::size_t>(p)]) / (1.0 + t[static_cast<std::size_t>(p)]);
      return Complex{v, 0.0};
    };
    // The chain steps of the conditionally convergent family swing by about
    // 4 G^3 / (1 + v) between ladder rungs; at extent 24 that is ~0.04, so
    // the stabilization epsilon has to sit above it.
    const double eps = 0.05;
    const IntegralTable table(g, QuadParams{0.5, 3}, MultiIndex::filled(4, 48));

    auto probes = chain_boxes();
    for (auto& b : uniformity_boxes()) probes.push_back(b);
    const auto jt = uniformity_probe(table, split, probes, eps);
    const auto fin = final_limit(jt, eps);
    c.expect(fin.stabilized, "cond: final limit did not stabilize");

    // Documented budget: each axis factor is short of the improper value G by
    // at most the Dirichlet-style tail bound 2/(1+w) at its achieved horizon,
    // the per-axis partial integrals are bounded by B = 0.85, and the chain
    // comparison itself contributes 5 eps.
    const double g1 = oracles::cond_factor_oracle();
    double w_min = 24.0;
    for (const auto& e : jt.entries)
      if (e.result.stabilized) w_min = std::min(w_min, e.result.inner_horizon);
    const double bound = 4.0 * std::pow(0.85, 3) * (2.0 / (1.0 + w_min)) + 5.0 * eps;
    const double err = std::abs(fin.value.real() - std::pow(g1, 4));
    c.expect(err <= bound, "cond: |final - G^4| = " + std::to_string(err) +
                               " exceeds documented budget " + std::to_string(bound));

    // Criterion 8 (cond half).
    const auto chain_a =
        std::vector<SplitSpec>{SplitSpec::leading(4, 2), SplitSpec::leading(2, 1)};
    const auto r_a = repeated_split(table, chain_a, eps);
    const auto r_unit = repeated_split(table, unit_split_chain(4), eps);
    c.expect(r_a.stabilized && r_unit.stabilized, "cond: a chain failed to stabilize");
    const double chain_budget = 5.0 * eps * 4.0;
    c.expect(std::abs(r_a.value - fin.value) <= chain_budget,
             "cond: 4->2->1 chain vs direct gap " +
                 std::to_string(std::abs(r_a.value - fin.value)));
    c.expect(std::abs(r_unit.value - fin.value) <= chain_budget,
             "cond: unit chain vs direct gap " +
                 std::to_string(std::abs(r_unit.value - fin.value)));
  }
  return c;
}

// Criterion 8 is exercised inside criterion_7 on the same tables; this entry
// re-checks the chain consistency on the cheap 3-d exponential so the line
// stands on its own.
Check criterion_8() {
  Check c;
  IntegrandSource f;
  f.dim = 3;
  f.label = "expo";
  f.abs_integrable = true;
  f.eval = [](std::span<const double> t) {
    return Complex{std::exp(-t[0] - t[1] - t[2]), 0.0};
  };
  const double eps = 1e-4;
  const IntegralTable table(f, QuadParams{0.5, 4}, MultiIndex::filled(3, 64));
  const SplitSpec split = SplitSpec::leading(3, 2);
  const auto jt = uniformity_probe(table, split, default_probe_set(table, split), eps);
  const auto direct = final_limit(jt, eps);
  const auto unit = repeated_split(table, unit_split_chain(3), eps);
  c.expect(direct.stabilized && unit.stabilized, "a path failed to stabilize");
  c.expect(std::abs(direct.value.real() - 1.0) <= 1e-3, "direct final far from 1");
  c.expect(std::abs(direct.value - unit.value) <= 3.0 * 5.0 * eps,
           "unit chain vs direct gap " + std::to_string(std::abs(direct.value - unit.value)));
  return c;
}

// ---------------------------------------------------------------------------
// 9. Symmetric adapters: odd cancellation exact, even cases vs brute force.
// ---------------------------------------------------------------------------
Check criterion_9() {
  Check c;

  SignedTermSource odd;
  odd.dim = 2;
  odd.label = "odd";
  odd.eval = [](std::span<const std::int64_t> j) {
    return Complex{static_cast<double>(j[0]) * static_cast<double>(j[1] * j[1] + 1), 0.0};
  };
  const auto folded_odd = symmetric_fold(odd);
  const auto odd_table = PartialSumTable::build(folded_odd, MultiIndex{12, 12});
  for_each_index(LatticeBox(MultiIndex::zeros(2), MultiIndex{12, 12}), [&](const MultiIndex& l) {
    if (odd_table.cell(l) != Complex{0.0, 0.0})
      c.expect(false, "odd series: nonzero symmetric sum at " + l.to_string());
  });

  SignedTermSource even;
  even.dim = 2;
  even.label = "even";
  even.eval = [](std::span<const std::int64_t> j) {
    return Complex{static_cast<double>(j[0] * j[0] % 7) + static_cast<double>(j[1] * j[1] % 5),
                   0.0};
  };
  const auto folded_even = symmetric_fold(even);
  const auto even_table = PartialSumTable::build(folded_even, MultiIndex{10, 10});
  for (std::int64_t l1 = 0; l1 <= 10; l1 += 2) {
    for (std::int64_t l2 = 0; l2 <= 10; l2 += 3) {
      const Complex via_table = even_table.cell(MultiIndex{l1, l2});
      const Complex direct = oracles::symmetric_nested_sum(even, MultiIndex{l1, l2});
      c.expect(std::abs(via_table - direct) <= 1e-10,
               "even series: fold vs two-sided oracle differ at (" + std::to_string(l1) + "," +
                   std::to_string(l2) + ")");
    }
  }

  IntegrandSource odd_f;
  odd_f.dim = 2;
  odd_f.label = "odd-integrand";
  odd_f.eval = [](std::span<const double> t) {
    return Complex{t[0] * std::exp(-t[0] * t[0] - std::abs(t[1])), 0.0};
  };
  const auto odd_adapter = make_symmetric_adapter(odd_f, QuadParams{0.5, 6}, MultiIndex{8, 8});
  for (double v : {1.0, 2.0, 4.0}) {
    const double coords[] = {v, v};
    if (odd_adapter.folded.rect_integral(coords) != Complex{0.0, 0.0})
      c.expect(false, "odd integrand: nonzero symmetric integral at v=" + std::to_string(v));
  }

  IntegrandSource even_f;
  even_f.dim = 2;
  even_f.label = "even-integrand";
  even_f.eval = [](std::span<const double> t) {
    return Complex{std::cos(t[0]) * std::exp(-std::abs(t[1])) + t[0] * t[0] * 0.05, 0.0};
  };
  const auto even_adapter = make_symmetric_adapter(even_f, QuadParams{0.5, 8}, MultiIndex{8, 8});
  for (double v : {1.0, 2.5, 4.0}) {
    const double coords[] = {v, v};
    const Complex folded = even_adapter.folded.rect_integral(coords);
    const Complex direct = even_adapter.direct_symmetric_integral(coords);
    c.expect(std::abs(folded - direct) <= 1e-10 * std::max(1.0, std::abs(direct)),
             "even integrand: fold vs direct differ at v=" + std::to_string(v));
  }
  return c;
}

// ---------------------------------------------------------------------------
// 10. CLI determinism: identical configs give byte-identical reports.
// ---------------------------------------------------------------------------
std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Check criterion_10() {
  Check c;
  if (g_cli_path.empty()) {
    c.expect(false, "no --cli path given");
    return c;
  }
  const std::vector<std::string> configs = {
      "diagnose --source geo --m 2 --eps 0.0009765625 --horizon 64",
      "diagnose --source d-tensor-w --eps 0.25 --horizon 32",
      "successive --source alt --m 2 --tol 1e-4",
  };
  int idx = 0;
  for (const auto& config : configs) {
    const std::string a = "acc10_a_" + std::to_string(idx) + ".json";
    const std::string b = "acc10_b_" + std::to_string(idx) + ".json";
    for (const auto& path : {a, b}) {
      const std::string cmd = g_cli_path + " " + config + " --out " + path + " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      c.expect(code == 0, "config '" + config + "' exited with " + std::to_string(code));
    }
    const std::string sa = slurp(a), sb = slurp(b);
    c.expect(!sa.empty() && sa == sb, "config '" + config + "' reports differ between reruns");
    std::remove(a.c_str());
    std::remove(b.c_str());
    ++idx;
  }
  return c;
}

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0 = none stated
  std::function<Check()> run;
};

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--cli") == 0) g_cli_path = argv[i + 1];

  const std::vector<Criterion> criteria = {
      {1, "corner-query exactness vs nested-loop oracle", 10.0, criterion_1},
      {2, "direct and recursive regular diagnoses agree", 60.0, criterion_2},
      {3, "implication chain absolute => regular => pringsheim/complete", 0.0, criterion_3},
      {4, "successive summation reaches (ln 2)^m under all permutations", 30.0, criterion_4},
      {5, "counterexample witnesses verified by brute force", 0.0, criterion_5},
      {6, "integral engine closed form and additivity", 0.0, criterion_6},
      {7, "iterated-limit pipeline at m=4, p=q=2", 300.0, criterion_7},
      {8, "repeated splits agree with the direct final limit", 0.0, criterion_8},
      {9, "symmetric adapters: odd cancellation and even oracles", 0.0, criterion_9},
      {10, "CLI reports byte-identical across reruns", 0.0, criterion_10},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.message = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    if (criterion.time_limit_s > 0 && elapsed >= criterion.time_limit_s) {
      result.ok = false;
      result.message = "runtime " + std::to_string(elapsed) + " s exceeds " +
                       std::to_string(criterion.time_limit_s) + " s";
    }
    std::printf("%s  %2d (%6.1f s): %s%s%s\n", result.ok ? "PASS" : "FAIL", criterion.id,
                elapsed, criterion.name.c_str(), result.ok ? "" : " -- ",
                result.ok ? "" : result.message.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  return failures;
}
