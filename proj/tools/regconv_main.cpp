#include <chrono>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "regconv/report.hpp"
#include "regconv/version.hpp"

namespace {

using namespace regconv;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMismatch = 2;

void print_labels(std::ostream& os) {
  os << "available sources:\n";
  for (const auto& l : corpus_labels()) os << "  " << l << "\n";
}

MultiIndex broadcast_horizon(const std::vector<std::int64_t>& values, int m) {
  if (values.size() == 1) return MultiIndex::filled(m, values[0]);
  if (static_cast<int>(values.size()) != m)
    throw CLI::ValidationError("--horizon needs one value or one per axis");
  return MultiIndex(std::span<const std::int64_t>(values));
}

std::string csv_complex(const Complex& z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << "," << z.imag();
  return os.str();
}

struct CommonOutputs {
  std::string out_path, csv_path;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonOutputs& out) {
  cmd->add_option("--out", out.out_path, "write the JSON report here");
  cmd->add_option("--csv", out.csv_path, "write a CSV summary here");
  cmd->add_flag("--timing", out.timing,
                "include wall-clock in the report (off by default so reruns are byte-identical)");
}

void emit(const CommonOutputs& out, Json config, Json results, double wall_ms,
          const std::string& csv) {
  const Json report = make_report(std::move(config), std::move(results),
                                  out.timing ? std::optional<double>(wall_ms) : std::nullopt);
  if (!out.out_path.empty()) write_text_file(out.out_path, report.dump(2) + "\n");
  if (!out.csv_path.empty()) write_text_file(out.csv_path, csv);
  std::cout << report.dump(2) << "\n";
}

int run_diagnose(const std::string& label, std::optional<int> m_opt, double eps,
                 const std::vector<std::int64_t>& horizon_opt, std::optional<double> delta_opt,
                 std::optional<int> q_opt, std::optional<std::int64_t> cells_opt,
                 std::int64_t budget, const CommonOutputs& outputs) {
  const auto start = std::chrono::steady_clock::now();

  const SeriesEntry* series = find_series(label, m_opt);
  const IntegrandEntry* integrand = series ? nullptr : find_integrand(label, m_opt);
  if (!series && !integrand) {
    std::cerr << "unknown source '" << label << "'\n";
    print_labels(std::cerr);
    return kExitUsage;
  }

  Json config;
  config["subcommand"] = "diagnose";
  config["source"] = label;
  config["eps"] = eps;
  config["box_budget"] = budget;

  bool matched = true;
  Json results;
  std::string csv;

  if (series) {
    const MultiIndex horizon = horizon_opt.empty()
                                   ? series->test_horizon
                                   : broadcast_horizon(horizon_opt, series->source.dim);
    config["m"] = series->source.dim;
    config["kind"] = "series";
    config["horizon"] = to_json(horizon);
    const SeriesDiagnosis d = diagnose_series(series->source, eps, horizon, budget);
    results = to_json(d);
    if (series->source.ground_truth)
      results["ground_truth"] = to_json(*series->source.ground_truth);
    matched = status_matches(d.pringsheim, series->tags.pringsheim) &&
              status_matches(d.regular_direct, series->tags.regular) &&
              status_matches(d.absolute, series->tags.absolute) &&
              status_matches(d.complete, series->tags.complete);

    csv = "mode,status,estimate_re,estimate_im,witness,residual,eps\n";
    for (const Verdict* v :
         {&d.pringsheim, &d.regular_direct, &d.regular_recursive, &d.absolute, &d.complete}) {
      csv += std::string(to_string(v->mode)) + "," + to_string(v->status) + ",";
      csv += v->estimate ? csv_complex(*v->estimate) : ",";
      csv += ",";
      csv += v->witness ? std::to_string(*v->witness) : "";
      std::ostringstream tail;
      tail.precision(17);
      tail << "," << v->residual << "," << v->eps << "\n";
      csv += tail.str();
    }
  } else {
    QuadParams params = integrand->params;
    if (delta_opt) params.delta = *delta_opt;
    if (q_opt) params.q = *q_opt;
    MultiIndex cells = integrand->test_cells;
    if (cells_opt) cells = MultiIndex::filled(integrand->source.dim, *cells_opt);
    config["m"] = integrand->source.dim;
    config["kind"] = "integrand";
    config["delta"] = params.delta;
    config["q"] = params.q;
    config["cells"] = to_json(cells);
    const IntegrandDiagnosis d =
        diagnose_integrand(integrand->source, params, cells, eps, budget);
    results = to_json(d);
    if (integrand->source.ground_truth)
      results["ground_truth"] = to_json(*integrand->source.ground_truth);
    matched = status_matches(d.pringsheim, integrand->tags.pringsheim) &&
              status_matches(d.regular, integrand->tags.regular) &&
              status_matches(d.absolute, integrand->tags.absolute);

    csv = "mode,status,estimate_re,estimate_im,real_witness,residual,eps\n";
    for (const Verdict* v : {&d.pringsheim, &d.regular, &d.absolute}) {
      csv += std::string(to_string(v->mode)) + "," + to_string(v->status) + ",";
      csv += v->estimate ? csv_complex(*v->estimate) : ",";
      csv += ",";
      std::ostringstream tail;
      tail.precision(17);
      if (v->real_witness) tail << *v->real_witness;
      tail << "," << v->residual << "," << v->eps << "\n";
      csv += tail.str();
    }
  }
  results["tags_matched"] = matched;

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(outputs, std::move(config), std::move(results), wall_ms, csv);
  return matched ? kExitOk : kExitMismatch;
}

int run_successive(const std::string& label, std::optional<int> m_opt, double tol,
                   std::int64_t cap, std::optional<double> budget_opt,
                   const CommonOutputs& outputs) {
  const auto start = std::chrono::steady_clock::now();
  const SeriesEntry* series = find_series(label, m_opt);
  if (!series) {
    std::cerr << "unknown series source '" << label << "'\n";
    print_labels(std::cerr);
    return kExitUsage;
  }
  const int m = series->source.dim;

  std::vector<int> identity(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) identity[static_cast<std::size_t>(p)] = p;
  const SummationPlan plan = SummationPlan::uniform(m, identity, tol, cap);
  const SweepResult sweep = permutation_sweep(series->source, plan);

  // Discrepancy budget: per-axis tolerances compound once per axis.
  const double budget = budget_opt.value_or(2.0 * static_cast<double>(m) * tol);
  bool ok = sweep.max_discrepancy <= budget;
  for (const auto& r : sweep.results) ok = ok && !r.inconclusive;

  Json config;
  config["subcommand"] = "successive";
  config["source"] = label;
  config["m"] = m;
  config["tol"] = tol;
  config["cap"] = cap;
  config["discrepancy_budget"] = budget;

  Json results = to_json(sweep);
  results["within_budget"] = ok;
  if (series->source.ground_truth) {
    results["ground_truth"] = to_json(*series->source.ground_truth);
    double worst = 0.0;
    for (const auto& r : sweep.results)
      worst = std::max(worst, std::abs(r.value - *series->source.ground_truth));
    results["max_error_vs_ground_truth"] = worst;
  }

  std::string csv = "perm,value_re,value_im,inconclusive,heuristic\n";
  for (const auto& r : sweep.results) {
    std::string perm;
    for (int p : r.plan.perm) perm += std::to_string(p);
    csv += perm + "," + csv_complex(r.value) + "," + (r.inconclusive ? "1" : "0") + "," +
           (r.heuristic ? "1" : "0") + "\n";
  }

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(outputs, std::move(config), std::move(results), wall_ms, csv);
  return ok ? kExitOk : kExitMismatch;
}

std::vector<SplitSpec> parse_chain(const std::string& spec, int m) {
  if (spec == "unit") return unit_split_chain(m);
  std::vector<SplitSpec> chain;
  std::stringstream ss(spec);
  std::string stage;
  int expected_m = m;
  while (std::getline(ss, stage, ',')) {
    const auto plus = stage.find('+');
    if (plus == std::string::npos)
      throw CLI::ValidationError("--chain stages look like 'p+q' (or 'unit')");
    const int p = std::stoi(stage.substr(0, plus));
    const int q = std::stoi(stage.substr(plus + 1));
    if (p + q != expected_m)
      throw CLI::ValidationError("--chain stage '" + stage + "' must split " +
                                 std::to_string(expected_m));
    chain.push_back(SplitSpec::leading(expected_m, p));
    expected_m = p;
  }
  if (chain.empty()) throw CLI::ValidationError("--chain is empty");
  return chain;
}

int run_fubini(const std::string& label, std::optional<int> m_opt, int p, double eps,
               std::optional<double> delta_opt, std::optional<int> q_opt,
               std::optional<double> extent_opt, const std::string& chain_spec,
               std::uint64_t seed, int extra_probes, const CommonOutputs& outputs) {
  const auto start = std::chrono::steady_clock::now();
  const IntegrandEntry* entry = find_integrand(label, m_opt);
  if (!entry) {
    std::cerr << "unknown integrand source '" << label << "'\n";
    print_labels(std::cerr);
    return kExitUsage;
  }
  const int m = entry->source.dim;
  if (p < 1 || p >= m) {
    std::cerr << "--p must be in [1, " << m - 1 << "] for m=" << m << "\n";
    return kExitUsage;
  }

  QuadParams params = entry->params;
  if (delta_opt) params.delta = *delta_opt;
  if (q_opt) params.q = *q_opt;
  MultiIndex cells = entry->test_cells;
  if (extent_opt) {
    const auto n = static_cast<std::int64_t>(std::ceil(*extent_opt / params.delta));
    cells = MultiIndex::filled(m, std::max<std::int64_t>(4, n));
  }

  const IntegralTable table(entry->source, params, cells);
  const SplitSpec split = SplitSpec::leading(m, p);

  std::vector<OuterBox> probes = default_probe_set(table, split);
  if (extra_probes > 0) {
    // Deterministically sampled extra probe boxes on the cell lattice.
    std::mt19937_64 rng(seed);
    double extent = table.extent(split.outer_axes[0]);
    for (int a : split.outer_axes) extent = std::min(extent, table.extent(a));
    const auto max_cell = static_cast<std::int64_t>(std::floor(extent / params.delta));
    std::uniform_int_distribution<std::int64_t> pick(0, max_cell);
    for (int i = 0; i < extra_probes; ++i) {
      OuterBox b;
      for (int k = 0; k < p; ++k) {
        std::int64_t a = pick(rng), bb = pick(rng);
        if (a > bb) std::swap(a, bb);
        b.u.push_back(static_cast<double>(a) * params.delta);
        b.v.push_back(static_cast<double>(bb) * params.delta);
      }
      probes.push_back(std::move(b));
    }
  }

  const IteratedLimitTable jt = uniformity_probe(table, split, probes, eps);
  const Verdict jreg = j_regular_diagnose(jt, eps);
  const LadderResult final = final_limit(jt, eps);
  const Complex pringsheim_estimate = table.pringsheim_estimate();
  const double gap = std::abs(final.value - pringsheim_estimate);
  bool ok = final.stabilized && gap <= 5.0 * eps;

  Json config;
  config["subcommand"] = "fubini";
  config["source"] = label;
  config["m"] = m;
  config["p"] = p;
  config["eps"] = eps;
  config["delta"] = params.delta;
  config["q"] = params.q;
  config["cells"] = to_json(cells);
  config["seed"] = seed;
  config["extra_probes"] = extra_probes;
  if (!chain_spec.empty()) config["chain"] = chain_spec;

  Json results;
  results["iterated_limits"] = to_json(jt);
  results["j_regular"] = to_json(jreg);
  results["final_limit"] = to_json(final);
  results["pringsheim_estimate"] = to_json(pringsheim_estimate);
  results["final_vs_pringsheim_gap"] = gap;
  results["five_eps"] = 5.0 * eps;

  if (!chain_spec.empty()) {
    const auto chain = parse_chain(chain_spec, m);
    const LadderResult chained = repeated_split(table, chain, eps);
    results["repeated_split"] = to_json(chained);
    results["chain_vs_direct_gap"] = std::abs(chained.value - final.value);
    ok = ok && chained.stabilized;
  }
  results["within_5eps"] = ok;

  std::string csv = "u,v,J_re,J_im,inner_horizon,residual,stabilized\n";
  for (const auto& e : jt.entries) {
    std::string u, v;
    for (std::size_t i = 0; i < e.box.u.size(); ++i) {
      u += (i ? ";" : "") + std::to_string(e.box.u[i]);
      v += (i ? ";" : "") + std::to_string(e.box.v[i]);
    }
    csv += u + "," + v + "," + csv_complex(e.result.value) + "," +
           std::to_string(e.result.inner_horizon) + "," + std::to_string(e.result.residual) +
           "," + (e.result.stabilized ? "1" : "0") + "\n";
  }

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(outputs, std::move(config), std::move(results), wall_ms, csv);
  return ok ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-horizon convergence diagnostics for multiple series and integrals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(regconv::kToolVersion));

  auto* list_cmd = app.add_subcommand("list", "list the registered sources");

  std::string label;
  std::optional<int> m_opt;
  double eps = 0.0, tol = 0.0;
  std::vector<std::int64_t> horizon;
  std::optional<double> delta_opt, extent_opt;
  std::optional<int> q_opt;
  std::optional<std::int64_t> cells_opt;
  std::int64_t budget = regconv::kDefaultBoxBudget;
  std::int64_t cap = 200'000;
  std::optional<double> disc_budget;
  int split_p = 1;
  std::string chain_spec;
  std::uint64_t seed = 0;
  int extra_probes = 0;
  CommonOutputs out_diag, out_succ, out_fub;

  auto* diag = app.add_subcommand(
      "diagnose", "run all convergence-mode diagnostics on a registered source");
  diag->add_option("--source", label, "source label")->required();
  diag->add_option("--m", m_opt, "dimension, when the label is registered at several");
  diag->add_option("--eps", eps, "epsilon for every mode (no default: every number carries it)")
      ->required()
      ->check(CLI::PositiveNumber);
  diag->add_option("--horizon", horizon, "per-axis horizon override (one value broadcasts)");
  diag->add_option("--delta", delta_opt, "cell width override (integrands)");
  diag->add_option("--q", q_opt, "quadrature order override (integrands)");
  diag->add_option("--cells", cells_opt, "cells per axis override (integrands)");
  diag->add_option("--budget", budget, "box-enumeration budget");
  add_common(diag, out_diag);

  auto* succ = app.add_subcommand("successive",
                                  "sum a registered series axis-by-axis under all permutations");
  succ->add_option("--source", label, "series label")->required();
  succ->add_option("--m", m_opt, "dimension");
  succ->add_option("--tol", tol, "per-axis tail tolerance")->required()->check(CLI::PositiveNumber);
  succ->add_option("--cap", cap, "per-axis depth cap");
  succ->add_option("--discrepancy-budget", disc_budget,
                   "pairwise discrepancy budget (default 2*m*tol)");
  add_common(succ, out_succ);

  auto* fub = app.add_subcommand("fubini",
                                 "iterated-limit pipeline for a registered integrand");
  fub->add_option("--source", label, "integrand label")->required();
  fub->add_option("--m", m_opt, "dimension");
  fub->add_option("--p", split_p, "outer block size (split m = p + q)")->required();
  fub->add_option("--eps", eps, "ladder stabilization epsilon")
      ->required()
      ->check(CLI::PositiveNumber);
  fub->add_option("--delta", delta_opt, "cell width override");
  fub->add_option("--q", q_opt, "quadrature order override");
  fub->add_option("--extent", extent_opt, "gridded extent per axis override");
  fub->add_option("--chain", chain_spec, "repeated-split chain: 'unit' or 'p+q,p1+q1,...'");
  fub->add_option("--seed", seed, "seed for extra sampled probe boxes");
  fub->add_option("--probes", extra_probes, "number of extra sampled probe boxes");
  add_common(fub, out_fub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (list_cmd->parsed()) {
      print_labels(std::cout);
      return kExitOk;
    }
    if (diag->parsed())
      return run_diagnose(label, m_opt, eps, horizon, delta_opt, q_opt, cells_opt, budget,
                          out_diag);
    if (succ->parsed()) return run_successive(label, m_opt, tol, cap, disc_budget, out_succ);
    if (fub->parsed())
      return run_fubini(label, m_opt, split_p, eps, delta_opt, q_opt, extent_opt, chain_spec,
                        seed, extra_probes, out_fub);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  }
  return kExitUsage;
}
