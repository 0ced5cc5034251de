#include "sosrelax/io/report.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace sosrelax::io {

using nlohmann::json;

namespace {

json matrix_rows(const SymMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.dim(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

json poly_terms(const Polynomial& p) {
  json out = json::array();
  for (const auto& t : p.terms()) out.push_back({{"exps", t.exps}, {"coef", t.coef}});
  return out;
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json solve_report_json(const SolveReport& rep, const ReportOptions& opts) {
  json j;
  j["status"] = to_string(rep.status);
  j["primal_status"] = to_string(rep.primal_status);
  j["dual_status"] = to_string(rep.dual_status);
  const bool solved = rep.status != SolveStatus::kNoSlaterPoint;
  j["val_primal"] = solved ? json(rep.val_primal) : json(nullptr);
  j["val_dual"] = solved ? json(rep.val_dual) : json(nullptr);
  j["x_star"] = rep.x_star ? json(*rep.x_star) : json(nullptr);
  j["margins"] = rep.margins;
  if (rep.x_star) {
    j["objective_at_x"] = rep.objective_at_x;
    j["gap"] = rep.gap;
  }
  j["iterations"] = {{"primal", rep.primal_iterations}, {"dual", rep.dual_iterations}};
  if (rep.slater) {
    j["slater"] = {{"x0", rep.slater->x0}, {"margins", rep.slater->margins}};
  } else {
    j["slater"] = nullptr;
  }
  if (opts.moments && rep.moments) j["moments"] = rep.moments->y;
  j["warnings"] = rep.warnings;
  if (opts.timestamp) {
    j["wallclock_ms"] = rep.wallclock_ms;
    j["timestamp"] = utc_timestamp();
  }
  return j;
}

json robust_check_json(const RobustCheck& check) {
  return {{"worst_case_margins", check.margins}, {"worst_case_u", check.worst_u}};
}

json sos_result_json(const SosResult& res, bool with_gram, bool with_decomposition) {
  json j;
  j["verdict"] = to_string(res.verdict);
  j["margin"] = res.margin;
  j["solver_status"] = to_string(res.status);
  if (!res.reason.empty()) j["reason"] = res.reason;
  if (res.certificate) {
    j["residual"] = res.certificate->residual;
    if (with_gram) {
      j["gram"] = matrix_rows(res.certificate->W);
      j["gram_positions"] = res.certificate->positions;
    }
    if (with_decomposition) {
      json terms = json::array();
      for (const auto& p : extract_decomposition(*res.certificate).terms) terms.push_back(poly_terms(p));
      j["decomposition"] = terms;
    }
  }
  return j;
}

std::string summary(const SolveReport& rep) {
  std::ostringstream os;
  os << std::setprecision(8);
  os << "status: " << to_string(rep.status);
  if (rep.status != SolveStatus::kNoSlaterPoint) {
    os << "  relaxation values: " << rep.val_primal << " (primal), " << rep.val_dual << " (moment)";
  }
  os << "\n";
  if (rep.x_star) {
    os << "x* = (";
    for (std::size_t i = 0; i < rep.x_star->size(); ++i) os << (i ? ", " : "") << (*rep.x_star)[i];
    os << ")  f0(x*) = " << rep.objective_at_x << "\n";
  }
  for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace sosrelax::io
