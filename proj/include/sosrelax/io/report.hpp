#pragma once

#include <string>

#include "json.hpp"
#include "sosrelax/relax.hpp"
#include "sosrelax/robust.hpp"
#include "sosrelax/soscert.hpp"

namespace sosrelax::io {

struct ReportOptions {
  bool timestamp = true;   // adds "timestamp" and "wallclock_ms"
  bool moments = false;    // full moment vector
};

nlohmann::json solve_report_json(const SolveReport& rep, const ReportOptions& opts = {});
nlohmann::json robust_check_json(const RobustCheck& check);
// verdict, margin and, on request, the Gram matrix and a decomposition
nlohmann::json sos_result_json(const SosResult& res, bool with_gram, bool with_decomposition);

// One-paragraph human summary for standard error.
std::string summary(const SolveReport& rep);

// Wall-clock time as an ISO 8601 UTC string.
std::string utc_timestamp();

}  // namespace sosrelax::io
