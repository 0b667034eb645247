#pragma once

#include <json.hpp>

#include "regconv/corpus.hpp"
#include "regconv/fubini.hpp"
#include "regconv/successive.hpp"

namespace regconv {

using Json = nlohmann::ordered_json;

Json to_json(const Complex& z);
Json to_json(const MultiIndex& idx);
Json to_json(const LatticeBox& box);
Json to_json(const Verdict& v);
Json to_json(const SuccessiveResult& r);
Json to_json(const SweepResult& s);
Json to_json(const LadderResult& r);
Json to_json(const IteratedLimitTable& jt);
Json to_json(const SeriesDiagnosis& d);
Json to_json(const IntegrandDiagnosis& d);

/// Versioned report envelope. Timing is attached only when requested so that
/// identical configs rerun to byte-identical files.
Json make_report(Json config, Json results, std::optional<double> wall_ms);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace regconv
