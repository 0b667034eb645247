#include "regconv/corpus.hpp"

#include <cmath>

namespace regconv {

namespace {

double alt_harmonic_term(std::int64_t j) {
  return (j % 2 == 0 ? 1.0 : -1.0) / (static_cast<double>(j) + 1.0);
}

// +1 on the diagonal, -1 on the first subdiagonal: rectangular partial sums
// alternate between 1 and 0 arbitrarily deep, so Pringsheim fails.
double diagonal_pair(std::int64_t j1, std::int64_t j2) {
  if (j1 == j2) return 1.0;
  if (j1 == j2 + 1) return -1.0;
  return 0.0;
}

// (1, -1, 0, 0, ...): partial sums telescope to zero from index 1 on.
double step_pair(std::int64_t j) {
  if (j == 0) return 1.0;
  if (j == 1) return -1.0;
  return 0.0;
}

TermSource make_u_source() {
  TermSource s;
  s.dim = 2;
  s.label = "u";
  s.ground_truth = Complex{0.0, 0.0};
  s.eval = [](const MultiIndex& j) {
    if (j[1] == 0) return Complex{static_cast<double>(j[0]), 0.0};
    if (j[1] == 1) return Complex{-static_cast<double>(j[0]), 0.0};
    return Complex{0.0, 0.0};
  };
  return s;
}

TermSource make_alt_source(int m) {
  TermSource s;
  s.dim = m;
  s.label = "alt";
  s.alternating = true;
  s.ground_truth = Complex{std::pow(std::log(2.0), m), 0.0};
  s.eval = [m](const MultiIndex& j) {
    double v = 1.0;
    for (int p = 0; p < m; ++p) v *= alt_harmonic_term(j[p]);
    return Complex{v, 0.0};
  };
  return s;
}

TermSource make_d_tensor_w_source() {
  TermSource s;
  s.dim = 3;
  s.label = "d-tensor-w";
  s.ground_truth = Complex{0.0, 0.0};
  s.eval = [](const MultiIndex& j) {
    return Complex{diagonal_pair(j[0], j[1]) * step_pair(j[2]), 0.0};
  };
  return s;
}

TermSource make_geo_source(int m) {
  TermSource s;
  s.dim = m;
  s.label = "geo";
  s.ground_truth = Complex{std::pow(2.0, m), 0.0};
  s.eval = [m](const MultiIndex& j) {
    std::int64_t total = 0;
    for (int p = 0; p < m; ++p) total += j[p];
    return Complex{std::pow(2.0, -static_cast<double>(total)), 0.0};
  };
  return s;
}

IntegrandSource make_expo_source(int m) {
  IntegrandSource s;
  s.dim = m;
  s.label = "expo";
  s.smoothness = Smoothness::smooth;
  s.abs_integrable = true;
  s.ground_truth = Complex{1.0, 0.0};
  s.eval = [m](std::span<const double> t) {
    double total = 0.0;
    for (int p = 0; p < m; ++p) total += t[static_cast<std::size_t>(p)];
    return Complex{std::exp(-total), 0.0};
  };
  return s;
}

IntegrandSource make_cond_source(int m) {
  IntegrandSource s;
  s.dim = m;
  s.label = "cond";
  s.smoothness = Smoothness::oscillatory;
  s.period = 2.0 * M_PI;
  s.ground_truth = Complex{std::pow(kCondFactor1D, m), 0.0};
  s.eval = [m](std::span<const double> t) {
    double v = 1.0;
    for (int p = 0; p < m; ++p)
      v *= std::sin(t[static_cast<std::size_t>(p)]) / (1.0 + t[static_cast<std::size_t>(p)]);
    return Complex{v, 0.0};
  };
  return s;
}

// Strip integrals over [u, u+pi] x [0, v] grow like 1 + u, so no regular
// threshold can exist; the rectangular integrals oscillate unboundedly too.
IntegrandSource make_strip_violator() {
  IntegrandSource s;
  s.dim = 2;
  s.label = "strip-violator";
  s.smoothness = Smoothness::oscillatory;
  s.period = 2.0 * M_PI;
  s.eval = [](std::span<const double> t) {
    return Complex{(1.0 + t[0]) * std::sin(t[0]) * std::exp(-t[1]), 0.0};
  };
  return s;
}

}  // namespace

const std::vector<SeriesEntry>& series_corpus() {
  static const std::vector<SeriesEntry> entries = [] {
    std::vector<SeriesEntry> v;
    v.push_back({make_u_source(),
                 {true, false, false, false},
                 MultiIndex{32, 32},
                 0.25,
                 "closed-form partial sums: s(l1,l2)=0 for l2>=1, single-cell boxes grow"});
    v.push_back({make_alt_source(2),
                 {true, true, false, true},
                 MultiIndex{200, 200},
                 1e-2,
                 "1-d alternating-series oracle, first-omitted-term bound, product factorization"});
    v.push_back({make_alt_source(3),
                 {true, true, false, true},
                 MultiIndex{48, 48, 48},
                 0.1,
                 "1-d alternating-series oracle cubed"});
    v.push_back({make_d_tensor_w_source(),
                 {true, false, false, true},
                 MultiIndex{32, 32, 32},
                 0.25,
                 "brute force on the diagonal pair: s_d(n,n)=1, s_d(n+1,n)=0"});
    v.push_back({make_geo_source(2),
                 {true, true, true, true},
                 MultiIndex{64, 64},
                 std::pow(2.0, -10),
                 "geometric tail: per-axis segment sums bounded by 2^{1-k}"});
    v.push_back({make_geo_source(3),
                 {true, true, true, true},
                 MultiIndex{24, 24, 24},
                 std::pow(2.0, -8),
                 "geometric tail"});
    return v;
  }();
  return entries;
}

const std::vector<IntegrandEntry>& integrand_corpus() {
  static const std::vector<IntegrandEntry> entries = [] {
    std::vector<IntegrandEntry> v;
    v.push_back({make_expo_source(2),
                 {true, true, true, std::nullopt},
                 QuadParams{0.5, 8},
                 MultiIndex{32, 32},
                 1e-4,
                 "closed form (1-e^{-v})^2, exponential tails"});
    v.push_back({make_expo_source(4),
                 {true, true, true, std::nullopt},
                 QuadParams{0.5, 4},
                 MultiIndex{8, 8, 8, 8},
                 0.1,
                 "closed form (1-e^{-v})^4"});
    v.push_back({make_cond_source(2),
                 {true, true, false, std::nullopt},
                 QuadParams{0.5, 8},
                 MultiIndex{64, 64},
                 0.1,
                 "Dirichlet-style bound |int_u^v g| <= 2/(1+u); |g| strips decay only "
                 "logarithmically"});
    v.push_back({make_cond_source(4),
                 {true, true, false, std::nullopt},
                 QuadParams{0.5, 3},
                 MultiIndex{32, 32, 32, 32},
                 0.2,
                 "Dirichlet-style bound to the fourth power"});
    v.push_back({make_strip_violator(),
                 {false, false, false, std::nullopt},
                 QuadParams{0.5, 8},
                 MultiIndex{64, 64},
                 1.0,
                 "strip integrals over [u, u+pi] x [0,1] have magnitude ~ 1+u"});
    return v;
  }();
  return entries;
}

const SeriesEntry* find_series(const std::string& label, std::optional<int> dim) {
  const SeriesEntry* best = nullptr;
  for (const auto& e : series_corpus()) {
    if (e.source.label != label) continue;
    if (dim && e.source.dim != *dim) continue;
    if (!best || e.source.dim < best->source.dim) best = &e;
  }
  return best;
}

const IntegrandEntry* find_integrand(const std::string& label, std::optional<int> dim) {
  const IntegrandEntry* best = nullptr;
  for (const auto& e : integrand_corpus()) {
    if (e.source.label != label) continue;
    if (dim && e.source.dim != *dim) continue;
    if (!best || e.source.dim < best->source.dim) best = &e;
  }
  return best;
}

std::vector<std::string> corpus_labels() {
  std::vector<std::string> out;
  for (const auto& e : series_corpus())
    out.push_back(e.source.label + " (m=" + std::to_string(e.source.dim) + ", series)");
  for (const auto& e : integrand_corpus())
    out.push_back(e.source.label + " (m=" + std::to_string(e.source.dim) + ", integrand)");
  return out;
}

SeriesDiagnosis diagnose_series(const TermSource& src, double eps, const MultiIndex& horizon,
                                std::int64_t box_budget) {
  const auto table = PartialSumTable::build(src, horizon);
  SeriesDiagnosis d{
      pringsheim_diagnose(table, eps),
      regular_diagnose_direct(table, eps, box_budget),
      regular_diagnose_recursive(src, eps, horizon),
      absolute_diagnose(src, eps, horizon, box_budget),
      complete_diagnose(src, eps, horizon),
  };
  return d;
}

IntegrandDiagnosis diagnose_integrand(const IntegrandSource& src, const QuadParams& params,
                                      const MultiIndex& cells, double eps,
                                      std::int64_t box_budget) {
  const IntegralTable table(src, params, cells);
  const IntegralTable abs_table(abs_integrand(src), params, cells);
  IntegrandDiagnosis d{
      table.pringsheim_diagnose(eps),
      table.regular_diagnose(eps, box_budget),
      abs_table.regular_diagnose(eps, box_budget),
  };
  d.absolute.mode = Mode::absolute;
  if (d.absolute.status == Status::satisfied_at_horizon)
    d.absolute.estimate = abs_table.pringsheim_estimate();
  return d;
}

bool status_matches(const Verdict& v, std::optional<bool> expected) {
  if (!expected) return true;
  if (v.status == Status::inconclusive) return false;
  return *expected == (v.status == Status::satisfied_at_horizon);
}

}  // namespace regconv
