#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sosrelax/sym_matrix.hpp"

namespace sosrelax {

// Conic variable layout of an SdpProblem. The scalarized variable vector
// holds, in order: the packed lower triangle of every PSD block, then the
// nonnegative scalars, then the free scalars.
struct ConeSpec {
  std::vector<int> psd_blocks;
  int nonneg_count = 0;
  int free_count = 0;

  int psd_offset(int block) const;
  int nonneg_offset() const;
  int free_offset() const;
  int var_count() const;
  // Index of entry (i, j) of PSD block `block`.
  int psd_index(int block, int i, int j) const { return psd_offset(block) + packed_index(i, j); }
  int nonneg_index(int k) const { return nonneg_offset() + k; }
  int free_index(int k) const { return free_offset() + k; }

  friend bool operator==(const ConeSpec&, const ConeSpec&) = default;
};

// Sparse linear functional over the scalarized variable. A coefficient on a
// PSD entry is the matching entry C_ij = C_ji of a symmetric coefficient
// matrix, so the functional pairs with the block X through Tr(C X): an
// off-diagonal coefficient contributes 2 C_ij X_ij.
class LinearFunctional {
 public:
  LinearFunctional() = default;

  void add(int index, double coef) { terms_.emplace_back(index, coef); }
  void add_psd(const ConeSpec& cone, int block, int i, int j, double coef) {
    add(cone.psd_index(block, i, j), coef);
  }
  // Adds Tr(M X) for a symmetric coefficient matrix M on block `block`.
  void add_matrix(const ConeSpec& cone, int block, const SymMatrix& m, double scale = 1.0);

  // Merged terms sorted by index with duplicates summed and zeros dropped.
  std::vector<std::pair<int, double>> merged() const;
  const std::vector<std::pair<int, double>>& raw_terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // Value at a scalarized point using the trace pairing.
  double evaluate(const ConeSpec& cone, const std::vector<double>& x) const;

 private:
  std::vector<std::pair<int, double>> terms_;
};

enum class ObjectiveSense { kMinimize, kMaximize };
enum class RowSense { kLessEqual, kGreaterEqual };

struct EqualityRow {
  LinearFunctional a;
  double rhs = 0.0;
};

struct InequalityRow {
  LinearFunctional a;
  double rhs = 0.0;
  RowSense sense = RowSense::kLessEqual;
};

// Linear conic program over PSD blocks, nonnegative scalars and free scalars.
struct SdpProblem {
  ConeSpec cone;
  ObjectiveSense sense = ObjectiveSense::kMinimize;
  LinearFunctional objective;
  double objective_offset = 0.0;
  std::vector<EqualityRow> equalities;
  std::vector<InequalityRow> inequalities;

  // Throws InvalidInput on out-of-range indices or non-finite data and
  // SizeLimitError when the problem exceeds the dense solver caps.
  void validate() const;
};

enum class SdpStatus { kOptimal, kPrimalInfeasible, kDualInfeasible, kNumericalFailure };

std::string to_string(SdpStatus s);

struct SolverOptions {
  double gap_tol = 1e-8;       // relative duality gap
  double abs_gap_tol = 1e-10;  // absolute gap, used when objective values are near zero
  double feas_tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;
  int refinement_steps = 3;
  // When positive and below gap_tol: once the tolerances above are met, keep
  // iterating toward this relative gap. If progress stalls first, the last
  // iterate that met the tolerances above is returned as optimal.
  double target_gap_tol = 0.0;
  bool verbose = false;
};

// Per-iteration record used by diagnostics and tests.
struct IterationInfo {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
  double step = 0.0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::kNumericalFailure;
  // Objective values in the problem's own sense, including objective_offset.
  double primal_value = 0.0;
  double dual_value = 0.0;
  std::vector<double> x;
  // Multipliers such that, for minimization,
  //   c - sum_i eq_multipliers[i] a_i - sum_k ineq_multipliers[k] g_k = dual slack
  // lies in the dual cone and is zero on free variables (for maximization the
  // left-hand side is negated). Inequality multipliers are <= 0 on <= rows and
  // >= 0 on >= rows for minimization, with opposite signs for maximization.
  std::vector<double> eq_multipliers;
  std::vector<double> ineq_multipliers;
  // Dual slack on the cone variables, in the scalarized layout (packed PSD
  // blocks then nonnegatives); free entries are omitted.
  std::vector<double> dual_slack;

  // PrimalInfeasible: weights u (equalities) and v >= 0 (inequalities, each
  // taken in its <= form) with sum u_i a_i + sum v_k g_k in the dual cone, zero
  // on free variables, and sum u_i b_i + sum v_k e_k = -1.
  std::vector<double> farkas_eq;
  std::vector<double> farkas_ineq;
  // DualInfeasible: a ray d in the cone with A d = 0, inequality rows
  // satisfied homogeneously and an objective improving at unit rate.
  std::vector<double> ray;

  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  std::vector<IterationInfo> history;

  bool optimal() const { return status == SdpStatus::kOptimal; }
  // Dual slack of PSD block `block` as a matrix.
  SymMatrix dual_slack_block(const ConeSpec& cone, int block) const;
  SymMatrix primal_block(const ConeSpec& cone, int block) const;
};

// Primal-dual interior-point solve of a linear conic program.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

enum class Feasibility { kFeasible, kInfeasible, kUnknown };

struct FeasibilityResult {
  Feasibility verdict = Feasibility::kUnknown;
  std::vector<double> point;  // set when feasible
  SdpSolution solution;
};

// Decides whether the constraint set of `problem` is nonempty (the objective
// is ignored).
FeasibilityResult check_feasible(const SdpProblem& problem, const SolverOptions& options = {});

// Writes the problem in sparse SDPA format (".dat-s"). Equality rows become
// SDPA constraints; nonnegative scalars, inequality slacks and the two halves
// of each split free variable are collected in one diagonal block.
void write_sdpa(const SdpProblem& problem, std::ostream& out);

}  // namespace sosrelax
