#include "regconv/report.hpp"

#include <fstream>

#include "regconv/version.hpp"

namespace regconv {

Json to_json(const Complex& z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json to_json(const MultiIndex& idx) {
  Json a = Json::array();
  for (int p = 0; p < idx.dim(); ++p) a.push_back(idx[p]);
  return a;
}

Json to_json(const LatticeBox& box) {
  return Json{{"lo", to_json(box.lo)}, {"hi", to_json(box.hi)}};
}

Json to_json(const Verdict& v) {
  Json j;
  j["mode"] = to_string(v.mode);
  j["status"] = to_string(v.status);
  j["eps"] = v.eps;
  j["horizon"] = to_json(v.horizon);
  j["residual"] = v.residual;
  if (v.estimate) j["estimate"] = to_json(*v.estimate);
  if (v.witness) j["witness"] = *v.witness;
  if (v.real_witness) j["real_witness"] = *v.real_witness;
  if (v.witness_box) j["witness_box"] = to_json(*v.witness_box);
  if (v.real_box_lo) j["real_box_lo"] = *v.real_box_lo;
  if (v.real_box_hi) j["real_box_hi"] = *v.real_box_hi;
  if (v.pinned_failure) {
    j["pinned_failure"] = Json{{"axis", v.pinned_failure->axis},
                               {"pins", v.pinned_failure->pins}};
  }
  j["detail"] = v.detail;
  return j;
}

Json to_json(const SuccessiveResult& r) {
  Json j;
  j["value"] = to_json(r.value);
  j["permutation"] = r.plan.perm;
  Json axes = Json::array();
  for (const auto& a : r.axes)
    axes.push_back(Json{{"achieved_tail", a.achieved_tail}, {"max_depth", a.max_depth}});
  j["axes"] = axes;
  j["inconclusive"] = r.inconclusive;
  if (r.inconclusive) j["failed_axis"] = r.failed_axis;
  j["heuristic"] = r.heuristic;
  return j;
}

Json to_json(const SweepResult& s) {
  Json j;
  Json results = Json::array();
  for (const auto& r : s.results) results.push_back(to_json(r));
  j["results"] = results;
  j["max_discrepancy"] = s.max_discrepancy;
  return j;
}

Json to_json(const LadderResult& r) {
  Json j;
  j["value"] = to_json(r.value);
  j["inner_horizon"] = r.inner_horizon;
  j["residual"] = r.residual;
  j["stabilized"] = r.stabilized;
  Json rungs = Json::array();
  for (const auto& z : r.rungs) rungs.push_back(to_json(z));
  j["rungs"] = rungs;
  return j;
}

Json to_json(const IteratedLimitTable& jt) {
  Json j;
  j["split"] = jt.split.to_string();
  j["eps"] = jt.eps;
  j["uniformity_statistic"] = jt.uniformity_statistic;
  j["all_stabilized"] = jt.all_stabilized;
  Json entries = Json::array();
  for (const auto& e : jt.entries) {
    entries.push_back(Json{{"u", e.box.u},
                           {"v", e.box.v},
                           {"J", to_json(e.result.value)},
                           {"inner_horizon", e.result.inner_horizon},
                           {"residual", e.result.residual},
                           {"stabilized", e.result.stabilized}});
  }
  j["entries"] = entries;
  return j;
}

Json to_json(const SeriesDiagnosis& d) {
  return Json{{"pringsheim", to_json(d.pringsheim)},
              {"regular", to_json(d.regular_direct)},
              {"regular_recursive", to_json(d.regular_recursive)},
              {"absolute", to_json(d.absolute)},
              {"complete", to_json(d.complete)}};
}

Json to_json(const IntegrandDiagnosis& d) {
  return Json{{"pringsheim", to_json(d.pringsheim)},
              {"regular", to_json(d.regular)},
              {"absolute", to_json(d.absolute)}};
}

Json make_report(Json config, Json results, std::optional<double> wall_ms) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
  j["config"] = std::move(config);
  j["results"] = std::move(results);
  if (wall_ms) j["wall_clock_ms"] = *wall_ms;
  return j;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << contents;
}

}  // namespace regconv
