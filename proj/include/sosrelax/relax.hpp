#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sosrelax/poly.hpp"
#include "sosrelax/sdp.hpp"
#include "sosrelax/sdp_builder.hpp"
#include "sosrelax/ssafunc.hpp"
#include "sosrelax/sym_matrix.hpp"

namespace sosrelax {

// Moment vector y over x^(d) of n variables; y[0] is the mass.
struct MomentVector {
  int n = 0;
  int d = 0;
  std::vector<double> y;

  // The moments of the point mass at x, i.e. x^(d).
  static MomentVector dirac(std::span<const double> x, int d);
};

// L_y(u) = sum_a u_a y_a.
double riesz(const MomentVector& y, const Polynomial& u);

// M_r(y), entry (b, g) = y at the position of x^(r)_b * x^(r)_g. `y` must
// have length s(2r, n).
SymMatrix moment_matrix(std::span<const double> y, int n, int r);

// L_y(f) - f(L_y(X_1), ..., L_y(X_n)). Throws CertificationError when f is
// not certified SOS-convex.
double jensen_gap(const MomentVector& y, const Polynomial& f);

// Variables of the relaxation for one function of the program.
struct FunctionVars {
  int scale = -1;               // lambda_0 (constraints only; nonnegative)
  std::vector<int> lambda;      // lambda_1..lambda_m (free)
  std::vector<int> lift;        // z_1..z_p (free)
  int lmi = -1;                 // -1 when Omega is zero dimensional
};

// max mu such that
//   h^0_0 + sum_j l^0_j h^0_j + sum_i (l^i_0 h^i_0 + sum_j l^i_j h^i_j) - mu
// has a PSD Gram matrix W over x^(d/2), with the LMIs of every Omega_i
// holding at (l^i, z^i) (homogenized by l^i_0 for constraints).
struct PrimalRelaxation {
  int n = 0;
  int d = 0;
  SdpBuilder builder;
  SdpProblem problem;
  int mu = -1;
  int gram = -1;  // PSD handle of W
  std::vector<FunctionVars> functions;  // objective first
  // equality row of the coefficient equation for each monomial of x^(d)
  std::vector<int> coefficient_rows;
};

// min L_y(h^0_0) + Tr(Z_0 A^0_0) subject to y_1 = 1, M_{d/2}(y) >= 0,
// Z_i >= 0 and the trace couplings of every Omega_i.
struct DualRelaxation {
  int n = 0;
  int d = 0;
  SdpBuilder builder;
  SdpProblem problem;
  std::vector<int> moments;     // free variable ids of y
  int moment_lmi = -1;
  std::vector<int> z;           // structured Z_i handles, objective first; -1 when absent
  int normalization_row = -1;
  std::vector<int> coupling_rows;     // Tr(Z_i A^i_j) rows, j >= 1
  std::vector<int> lifting_rows;      // Tr(Z_i B^i_l) rows
  std::vector<int> inequality_rows;   // one per constraint
};

PrimalRelaxation build_primal(const SsaProgram& prog);
DualRelaxation build_dual(const SsaProgram& prog);

// Moment vector of a dual solution.
MomentVector moment_vector(const DualRelaxation& dual, const SdpSolution& sol);
// x*_k = L_y(X_k). Throws InvalidInput unless the solve is optimal.
std::vector<double> recover(const DualRelaxation& dual, const SdpSolution& sol);

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNoSlaterPoint, kNumericalFailure };

std::string to_string(SolveStatus s);

struct RelaxOptions {
  SolverOptions solver;
  bool assume_slater = false;
  bool recover = true;
  std::optional<std::vector<double>> slater_hint;
  bool parallel = true;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kNumericalFailure;
  SdpStatus primal_status = SdpStatus::kNumericalFailure;
  SdpStatus dual_status = SdpStatus::kNumericalFailure;
  double val_primal = 0.0;
  double val_dual = 0.0;
  std::optional<SlaterWitness> slater;
  std::optional<std::vector<double>> x_star;
  std::optional<MomentVector> moments;
  // f_i(x*) for each constraint and f_0(x*)
  std::vector<double> margins;
  double objective_at_x = 0.0;
  double gap = 0.0;  // |f_0(x*) - val_dual|
  int primal_iterations = 0;
  int dual_iterations = 0;
  double wallclock_ms = 0.0;
  std::vector<std::string> warnings;
};

SolveReport solve_program(const SsaProgram& prog, const RelaxOptions& opts = {});

}  // namespace sosrelax
