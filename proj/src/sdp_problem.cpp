#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "sosrelax/errors.hpp"
#include "sosrelax/sdp.hpp"

namespace sosrelax {

namespace {

constexpr int kMaxPsdBlockDim = 200;
constexpr int kMaxScalarConstraints = 5000;

}  // namespace

int ConeSpec::psd_offset(int block) const {
  int offset = 0;
  for (int b = 0; b < block; ++b) offset += packed_size(psd_blocks[static_cast<std::size_t>(b)]);
  return offset;
}

int ConeSpec::nonneg_offset() const { return psd_offset(static_cast<int>(psd_blocks.size())); }
int ConeSpec::free_offset() const { return nonneg_offset() + nonneg_count; }
int ConeSpec::var_count() const { return free_offset() + free_count; }

void LinearFunctional::add_matrix(const ConeSpec& cone, int block, const SymMatrix& m, double scale) {
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j <= i; ++j) {
      if (m(i, j) != 0.0) add_psd(cone, block, i, j, scale * m(i, j));
    }
  }
}

std::vector<std::pair<int, double>> LinearFunctional::merged() const {
  std::map<int, double> acc;
  for (const auto& [idx, c] : terms_) acc[idx] += c;
  std::vector<std::pair<int, double>> out;
  out.reserve(acc.size());
  for (const auto& [idx, c] : acc) {
    if (c != 0.0) out.emplace_back(idx, c);
  }
  return out;
}

namespace {

// Weight of a scalarized variable in the trace pairing: 2 for off-diagonal
// PSD entries, 1 otherwise.
std::vector<double> pairing_weights(const ConeSpec& cone) {
  std::vector<double> w(static_cast<std::size_t>(cone.var_count()), 1.0);
  for (std::size_t b = 0; b < cone.psd_blocks.size(); ++b) {
    const int t = cone.psd_blocks[b];
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j < i; ++j) w[static_cast<std::size_t>(cone.psd_index(static_cast<int>(b), i, j))] = 2.0;
    }
  }
  return w;
}

}  // namespace

double LinearFunctional::evaluate(const ConeSpec& cone, const std::vector<double>& x) const {
  const auto w = pairing_weights(cone);
  double s = 0.0;
  for (const auto& [idx, c] : terms_) s += w[static_cast<std::size_t>(idx)] * c * x[static_cast<std::size_t>(idx)];
  return s;
}

void SdpProblem::validate() const {
  for (int t : cone.psd_blocks) {
    if (t < 1) throw InvalidInput("PSD block dimension must be positive");
    if (t > kMaxPsdBlockDim) throw SizeLimitError("PSD block exceeds 200x200 cap");
  }
  if (cone.nonneg_count < 0 || cone.free_count < 0) throw InvalidInput("negative variable count");
  if (equalities.size() + inequalities.size() > static_cast<std::size_t>(kMaxScalarConstraints)) {
    throw SizeLimitError("problem exceeds 5000 scalar constraints");
  }
  const int nvar = cone.var_count();
  auto check = [nvar](const LinearFunctional& f, const char* what) {
    for (const auto& [idx, c] : f.raw_terms()) {
      if (idx < 0 || idx >= nvar) throw InvalidInput(std::string(what) + ": variable index out of range");
      if (!std::isfinite(c)) throw InvalidInput(std::string(what) + ": non-finite coefficient");
    }
  };
  check(objective, "objective");
  if (!std::isfinite(objective_offset)) throw InvalidInput("objective offset is not finite");
  for (const auto& r : equalities) {
    check(r.a, "equality row");
    if (!std::isfinite(r.rhs)) throw InvalidInput("equality right-hand side is not finite");
  }
  for (const auto& r : inequalities) {
    check(r.a, "inequality row");
    if (!std::isfinite(r.rhs)) throw InvalidInput("inequality right-hand side is not finite");
  }
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kPrimalInfeasible: return "primal_infeasible";
    case SdpStatus::kDualInfeasible: return "dual_infeasible";
    case SdpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

SymMatrix SdpSolution::dual_slack_block(const ConeSpec& cone, int block) const {
  const int t = cone.psd_blocks[static_cast<std::size_t>(block)];
  const auto first = dual_slack.begin() + cone.psd_offset(block);
  return SymMatrix::from_packed(t, std::vector<double>(first, first + packed_size(t)));
}

SymMatrix SdpSolution::primal_block(const ConeSpec& cone, int block) const {
  const int t = cone.psd_blocks[static_cast<std::size_t>(block)];
  const auto first = x.begin() + cone.psd_offset(block);
  return SymMatrix::from_packed(t, std::vector<double>(first, first + packed_size(t)));
}

FeasibilityResult check_feasible(const SdpProblem& problem, const SolverOptions& options) {
  SdpProblem p = problem;
  p.objective = LinearFunctional();
  p.objective_offset = 0.0;
  p.sense = ObjectiveSense::kMinimize;
  FeasibilityResult result;
  result.solution = solve(p, options);
  switch (result.solution.status) {
    case SdpStatus::kOptimal:
      result.verdict = Feasibility::kFeasible;
      result.point = result.solution.x;
      break;
    case SdpStatus::kPrimalInfeasible:
      result.verdict = Feasibility::kInfeasible;
      break;
    default:
      result.verdict = Feasibility::kUnknown;
      break;
  }
  return result;
}

// ---------------------------------------------------------------------------
// SDPA sparse export. The problem is written as the SDPA "dual" form
//   maximize F0 . Y  subject to  Fi . Y = ci,  Y psd,
// with Y the conic variable; a minimization objective is negated.

void write_sdpa(const SdpProblem& problem, std::ostream& out) {
  problem.validate();
  const ConeSpec& cone = problem.cone;
  const int npsd = static_cast<int>(cone.psd_blocks.size());
  const int nineq = static_cast<int>(problem.inequalities.size());
  // diagonal block: nonnegatives, free+ , free-, inequality slacks
  const int diag_size = cone.nonneg_count + 2 * cone.free_count + nineq;
  const int diag_block = npsd + 1;  // 1-based SDPA block number
  const int free_base = cone.nonneg_count;
  const int slack_base = cone.nonneg_count + 2 * cone.free_count;

  // Entry destinations of scalarized variable `idx` with a coefficient:
  // (block, i, j, factor) in 1-based SDPA coordinates.
  struct Dest {
    int block, i, j;
    double factor;
  };
  std::vector<std::vector<Dest>> dest(static_cast<std::size_t>(cone.var_count()));
  for (int b = 0; b < npsd; ++b) {
    const int t = cone.psd_blocks[static_cast<std::size_t>(b)];
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j <= i; ++j) dest[static_cast<std::size_t>(cone.psd_index(b, i, j))].push_back({b + 1, j + 1, i + 1, 1.0});
    }
  }
  for (int k = 0; k < cone.nonneg_count; ++k) {
    dest[static_cast<std::size_t>(cone.nonneg_index(k))].push_back({diag_block, k + 1, k + 1, 1.0});
  }
  for (int k = 0; k < cone.free_count; ++k) {
    auto& d = dest[static_cast<std::size_t>(cone.free_index(k))];
    d.push_back({diag_block, free_base + k + 1, free_base + k + 1, 1.0});
    d.push_back({diag_block, free_base + cone.free_count + k + 1, free_base + cone.free_count + k + 1, -1.0});
  }

  using Key = std::tuple<int, int, int>;
  auto emit = [&](std::map<Key, double>& acc, const LinearFunctional& f, double scale) {
    for (const auto& [idx, c] : f.merged()) {
      for (const auto& d : dest[static_cast<std::size_t>(idx)]) acc[{d.block, d.i, d.j}] += scale * d.factor * c;
    }
  };

  std::ostringstream body;
  body << std::setprecision(17);
  const int m = static_cast<int>(problem.equalities.size()) + nineq;

  body << "\"sosrelax export: " << (problem.sense == ObjectiveSense::kMinimize ? "minimize" : "maximize")
       << " objective, offset " << problem.objective_offset << "\n";
  body << m << " =mdim\n";
  const bool has_diag = diag_size > 0;
  body << npsd + (has_diag ? 1 : 0) << " =nblocks\n";
  for (int b = 0; b < npsd; ++b) body << cone.psd_blocks[static_cast<std::size_t>(b)] << (b + 1 < npsd || has_diag ? " " : "");
  if (has_diag) body << -diag_size;
  body << "\n";
  for (int r = 0; r < m; ++r) {
    const double rhs = r < static_cast<int>(problem.equalities.size())
                           ? problem.equalities[static_cast<std::size_t>(r)].rhs
                           : problem.inequalities[static_cast<std::size_t>(r) - problem.equalities.size()].rhs;
    body << rhs << (r + 1 < m ? " " : "");
  }
  body << "\n";

  auto write_matrix = [&](int matno, const std::map<Key, double>& acc) {
    for (const auto& [key, v] : acc) {
      if (v == 0.0) continue;
      body << matno << " " << std::get<0>(key) << " " << std::get<1>(key) << " " << std::get<2>(key) << " " << v << "\n";
    }
  };

  std::map<Key, double> f0;
  emit(f0, problem.objective, problem.sense == ObjectiveSense::kMinimize ? -1.0 : 1.0);
  write_matrix(0, f0);
  int matno = 1;
  for (const auto& row : problem.equalities) {
    std::map<Key, double> acc;
    emit(acc, row.a, 1.0);
    write_matrix(matno++, acc);
  }
  for (int k = 0; k < nineq; ++k) {
    const auto& row = problem.inequalities[static_cast<std::size_t>(k)];
    std::map<Key, double> acc;
    emit(acc, row.a, 1.0);
    const double slack = row.sense == RowSense::kLessEqual ? 1.0 : -1.0;
    acc[{diag_block, slack_base + k + 1, slack_base + k + 1}] += slack;
    write_matrix(matno++, acc);
  }
  out << body.str();
}

}  // namespace sosrelax
