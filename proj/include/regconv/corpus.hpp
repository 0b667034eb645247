#pragma once

#include "regconv/diagnostics.hpp"
#include "regconv/integral_table.hpp"

namespace regconv {

/// 1-D value of the conditionally convergent improper integral of
/// sin(t)/(1+t) over the positive half line, frozen from the test suite's
/// integration-by-parts oracle (tail below 1e-9).
inline constexpr double kCondFactor1D = 0.6214496242361616;

/// Expected finite-horizon behaviour per mode; absent means not applicable.
struct ModeTags {
  std::optional<bool> pringsheim, regular, absolute, complete;
};

struct SeriesEntry {
  TermSource source;
  ModeTags tags;
  MultiIndex test_horizon;  // registered horizon for tag re-verification
  double test_eps = 0.0;    // registered eps
  std::string note;         // which oracle certifies the tags
};

struct IntegrandEntry {
  IntegrandSource source;
  ModeTags tags;
  QuadParams params;
  MultiIndex test_cells;  // registered cell counts per axis
  double test_eps = 0.0;
  std::string note;
};

const std::vector<SeriesEntry>& series_corpus();
const std::vector<IntegrandEntry>& integrand_corpus();

/// Lookup by label, optionally disambiguated by dimension (smallest wins).
const SeriesEntry* find_series(const std::string& label, std::optional<int> dim = std::nullopt);
const IntegrandEntry* find_integrand(const std::string& label,
                                     std::optional<int> dim = std::nullopt);

/// "label (m=2)" for every registered member, for usage errors and `list`.
std::vector<std::string> corpus_labels();

/// Full four-mode diagnosis of a series entry at the given eps/horizon.
struct SeriesDiagnosis {
  Verdict pringsheim, regular_direct, regular_recursive, absolute, complete;
};
SeriesDiagnosis diagnose_series(const TermSource& src, double eps, const MultiIndex& horizon,
                                std::int64_t box_budget = kDefaultBoxBudget);

/// Pringsheim/regular/absolute diagnosis of an integrand entry.
struct IntegrandDiagnosis {
  Verdict pringsheim, regular, absolute;
};
IntegrandDiagnosis diagnose_integrand(const IntegrandSource& src, const QuadParams& params,
                                      const MultiIndex& cells, double eps,
                                      std::int64_t box_budget = kDefaultBoxBudget);

/// satisfied-at-horizon matches holds, violated matches fails; inconclusive
/// never matches a tagged expectation.
bool status_matches(const Verdict& v, std::optional<bool> expected);

}  // namespace regconv
