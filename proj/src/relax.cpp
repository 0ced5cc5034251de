#include "sosrelax/relax.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <string>

#include "sosrelax/errors.hpp"
#include "sosrelax/spectra.hpp"

namespace sosrelax {

namespace {

double coef_at(const Polynomial& p, int pos) { return pos < p.basis().size() ? p.coeff(pos) : 0.0; }

void check_degree(const Polynomial& p, int d) {
  if (p.degree() > d) throw DimensionError("polynomial degree exceeds the relaxation degree");
}

const SsaFunction& function_at(const SsaProgram& prog, std::size_t k) {
  return k == 0 ? prog.objective : prog.constraints[k - 1];
}

std::size_t function_count(const SsaProgram& prog) { return prog.constraints.size() + 1; }

// Relaxation-level acceptance: a solve that stalled within 10x the solver
// tolerances still carries a usable value (it returns its best iterate).
bool near_optimal(const SdpSolution& sol, const SolverOptions& o) {
  if (sol.status != SdpStatus::kNumericalFailure) return false;
  const double scale = std::max(1.0, std::min(std::abs(sol.primal_value), std::abs(sol.dual_value)));
  const double gap = std::max(sol.gap, std::abs(sol.primal_value - sol.dual_value));
  return std::isfinite(sol.primal_value) && sol.primal_residual <= 10.0 * o.feas_tol && sol.dual_residual <= 10.0 * o.feas_tol &&
         (gap <= 10.0 * o.abs_gap_tol || gap / scale <= 10.0 * o.gap_tol);
}

}  // namespace

MomentVector MomentVector::dirac(std::span<const double> x, int d) {
  const auto basis = MonomialBasis::get(static_cast<int>(x.size()), d);
  return MomentVector{static_cast<int>(x.size()), d, basis->evaluate(x)};
}

double riesz(const MomentVector& y, const Polynomial& u) {
  if (u.num_vars() != y.n) throw DimensionError("polynomial and moments use different variable counts");
  if (u.degree() > y.d) throw DimensionError("polynomial degree exceeds the moment degree");
  double s = 0.0;
  const int len = std::min(u.basis().size(), static_cast<int>(y.y.size()));
  for (int a = 0; a < len; ++a) s += u.coeff(a) * y.y[static_cast<std::size_t>(a)];
  return s;
}

SymMatrix moment_matrix(std::span<const double> y, int n, int r) {
  const auto pairing = PairingIndex::get(n, r);
  if (static_cast<int>(y.size()) != pairing->full_size()) throw DimensionError("moment vector has the wrong length");
  const int k = pairing->half_size();
  SymMatrix m(k);
  for (int b = 0; b < k; ++b) {
    for (int g = 0; g <= b; ++g) m.at(b, g) = y[static_cast<std::size_t>(pairing->product(b, g))];
  }
  return m;
}

double jensen_gap(const MomentVector& y, const Polynomial& f) {
  if (!certify_piece(f)) throw CertificationError("Jensen gap requested for a polynomial that is not SOS-convex");
  std::vector<double> mean(static_cast<std::size_t>(y.n));
  for (int k = 0; k < y.n; ++k) mean[static_cast<std::size_t>(k)] = y.y.at(static_cast<std::size_t>(k) + 1);
  return riesz(y, f) - f.evaluate(mean);
}

PrimalRelaxation build_primal(const SsaProgram& prog) {
  prog.validate();
  PrimalRelaxation rel;
  rel.n = prog.n();
  rel.d = prog.degree();
  const auto pairing = PairingIndex::get(rel.n, rel.d / 2);
  const int s = pairing->full_size();
  SdpBuilder& b = rel.builder;

  rel.mu = b.add_free();
  rel.gram = b.add_psd(pairing->half_size());

  // polynomial side of each coefficient equation, minus its constant part
  std::vector<LinExpr> coef(static_cast<std::size_t>(s));
  std::vector<double> rhs(static_cast<std::size_t>(s), 0.0);

  for (std::size_t k = 0; k < function_count(prog); ++k) {
    const SsaFunction& f = function_at(prog, k);
    const Spectrahedron& om = f.omega();
    for (const auto& h : f.h()) check_degree(h, rel.d);
    FunctionVars fv;
    if (k > 0) {
      fv.scale = b.add_nonneg();
      for (int a = 0; a < s; ++a) coef[static_cast<std::size_t>(a)].add(fv.scale, coef_at(f.h()[0], a));
    } else {
      for (int a = 0; a < s; ++a) rhs[static_cast<std::size_t>(a)] = coef_at(f.h()[0], a);
    }
    for (int j = 1; j <= f.m(); ++j) {
      const int v = b.add_free();
      fv.lambda.push_back(v);
      for (int a = 0; a < s; ++a) coef[static_cast<std::size_t>(a)].add(v, coef_at(f.h()[static_cast<std::size_t>(j)], a));
    }
    for (int l = 0; l < om.p(); ++l) fv.lift.push_back(b.add_free());

    if (om.t() > 0) {
      std::vector<SdpBuilder::MatrixTerm> terms;
      if (k > 0) terms.push_back({fv.scale, om.a()[0]});
      for (int j = 0; j < f.m(); ++j) terms.push_back({fv.lambda[static_cast<std::size_t>(j)], om.a()[static_cast<std::size_t>(j) + 1]});
      for (int l = 0; l < om.p(); ++l) terms.push_back({fv.lift[static_cast<std::size_t>(l)], om.b()[static_cast<std::size_t>(l)]});
      const SymMatrix constant = k == 0 ? om.a()[0] : SymMatrix(om.t());
      fv.lmi = b.add_lmi(om.structure(), constant, terms);
    }
    rel.functions.push_back(std::move(fv));
  }

  // sum_{pairs of a} W_bg - (polynomial side) + mu [a = 1] = (h^0_0)_a
  for (int a = 0; a < s; ++a) {
    LinExpr e;
    for (const auto& [beta, gamma] : pairing->pairs(a)) e.add(b.entry(rel.gram, beta, gamma), 1.0);
    e.add(coef[static_cast<std::size_t>(a)], -1.0);
    if (a == 0) e.add(rel.mu, 1.0);
    rel.coefficient_rows.push_back(b.add_equality(e, rhs[static_cast<std::size_t>(a)]));
  }
  b.set_objective(ObjectiveSense::kMaximize, LinExpr(rel.mu, 1.0));
  rel.problem = b.build();
  return rel;
}

DualRelaxation build_dual(const SsaProgram& prog) {
  prog.validate();
  DualRelaxation rel;
  rel.n = prog.n();
  rel.d = prog.degree();
  const auto pairing = PairingIndex::get(rel.n, rel.d / 2);
  const int s = pairing->full_size();
  const int k = pairing->half_size();
  SdpBuilder& b = rel.builder;

  for (int a = 0; a < s; ++a) rel.moments.push_back(b.add_free());
  auto riesz_expr = [&](const Polynomial& p) {
    LinExpr e;
    for (int a = 0; a < s; ++a) e.add(rel.moments[static_cast<std::size_t>(a)], coef_at(p, a));
    return e;
  };

  rel.normalization_row = b.add_equality(LinExpr(rel.moments[0], 1.0), 1.0);

  std::vector<SymMatrix> mats(static_cast<std::size_t>(s) + 1, SymMatrix(k));
  for (int a = 0; a < s; ++a) {
    for (const auto& [beta, gamma] : pairing->pairs(a)) mats[static_cast<std::size_t>(a) + 1].at(beta, gamma) = 1.0;
  }
  std::vector<SdpBuilder::MatrixTerm> terms;
  for (int a = 0; a < s; ++a) terms.push_back({rel.moments[static_cast<std::size_t>(a)], mats[static_cast<std::size_t>(a) + 1]});
  rel.moment_lmi = b.add_lmi(LmiStructure(mats), mats[0], terms);

  LinExpr objective;
  for (std::size_t i = 0; i < function_count(prog); ++i) {
    const SsaFunction& f = function_at(prog, i);
    const Spectrahedron& om = f.omega();
    for (const auto& h : f.h()) check_degree(h, rel.d);
    const int z = om.t() > 0 ? b.add_structured_psd(om.structure()) : -1;
    rel.z.push_back(z);
    auto with_trace = [&](LinExpr e, const SymMatrix& m) {
      if (z >= 0) e.add(b.trace_with(z, m));
      return e;
    };
    const LinExpr lead = with_trace(riesz_expr(f.h()[0]), om.a()[0]);
    if (i == 0) {
      objective = lead;
    } else {
      rel.inequality_rows.push_back(b.add_inequality(lead, 0.0, RowSense::kLessEqual));
    }
    for (int j = 1; j <= f.m(); ++j) {
      const LinExpr e = with_trace(riesz_expr(f.h()[static_cast<std::size_t>(j)]), om.a()[static_cast<std::size_t>(j)]);
      rel.coupling_rows.push_back(b.add_equality(e, 0.0));
    }
    for (int l = 0; l < om.p(); ++l) {
      rel.lifting_rows.push_back(b.add_equality(b.trace_with(z, om.b()[static_cast<std::size_t>(l)]), 0.0));
    }
  }
  b.set_objective(ObjectiveSense::kMinimize, objective);
  rel.problem = b.build();
  return rel;
}

MomentVector moment_vector(const DualRelaxation& dual, const SdpSolution& sol) {
  MomentVector m{dual.n, dual.d, {}};
  for (int v : dual.moments) m.y.push_back(dual.builder.value(sol, v));
  return m;
}

std::vector<double> recover(const DualRelaxation& dual, const SdpSolution& sol) {
  if (!sol.optimal()) throw InvalidInput("recovery needs an optimal moment solution");
  std::vector<double> x;
  for (int k = 1; k <= dual.n; ++k) x.push_back(dual.builder.value(sol, dual.moments[static_cast<std::size_t>(k)]));
  return x;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNoSlaterPoint: return "no_slater_point";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "numerical_failure";
}

SolveReport solve_program(const SsaProgram& prog, const RelaxOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  prog.validate();
  SolveReport rep;

  for (std::size_t i = 0; i < function_count(prog); ++i) {
    const Certification& c = function_at(prog, i).certification();
    const bool ok = c.policy == CertificationPolicy::kNone ? certify(function_at(prog, i), 8, 1, opts.solver).certified
                                                           : c.certified;
    if (!ok) rep.warnings.push_back("function " + std::to_string(i) + " is not certified SOS-convex");
  }

  rep.slater = find_slater(prog, opts.slater_hint, opts.solver);
  if (!rep.slater) {
    if (!opts.assume_slater) {
      rep.status = SolveStatus::kNoSlaterPoint;
      rep.warnings.push_back("no strictly feasible point found; the relaxation may not be exact");
      rep.wallclock_ms = elapsed_ms();
      return rep;
    }
    rep.warnings.push_back("no strictly feasible point found; proceeding as requested");
  }

  // recovery needs every index set to have a strict interior
  bool interior = true;
  if (opts.recover) {
    for (std::size_t i = 0; i < function_count(prog); ++i) {
      const Spectrahedron& om = function_at(prog, i).omega();
      if (om.t() == 0) continue;
      if (!interior_margin(om, opts.solver).strict) {
        interior = false;
        rep.warnings.push_back("index set of function " + std::to_string(i) +
                               " has no strictly feasible point; x* withheld");
      }
    }
  }

  const PrimalRelaxation primal = build_primal(prog);
  const DualRelaxation dual = build_dual(prog);
  // x* is only pinned to about sqrt(gap) along flat directions; push further when it is cheap
  SolverOptions sopts = opts.solver;
  if (sopts.target_gap_tol == 0.0) sopts.target_gap_tol = std::min(sopts.gap_tol, 1e-11);
  SdpSolution psol, dsol;
  if (opts.parallel) {
    auto fut = std::async(std::launch::async, [&] { return solve(primal.problem, sopts); });
    dsol = solve(dual.problem, sopts);
    psol = fut.get();
  } else {
    psol = solve(primal.problem, sopts);
    dsol = solve(dual.problem, sopts);
  }
  rep.primal_status = psol.status;
  rep.dual_status = dsol.status;
  rep.primal_iterations = psol.iterations;
  rep.dual_iterations = dsol.iterations;
  rep.val_primal = psol.primal_value;
  rep.val_dual = dsol.primal_value;

  const bool p_ok = psol.optimal() || near_optimal(psol, opts.solver);
  const bool d_ok = dsol.optimal() || near_optimal(dsol, opts.solver);
  for (const auto* sol : {&psol, &dsol}) {
    if (!sol->optimal() && near_optimal(*sol, opts.solver)) {
      rep.warnings.push_back(std::string(sol == &psol ? "primal" : "dual") +
                             " solve stopped short of the solver tolerances; accepted within 10x");
    }
  }
  if (p_ok && d_ok) {
    rep.status = SolveStatus::kOptimal;
  } else if (dsol.status == SdpStatus::kPrimalInfeasible || psol.status == SdpStatus::kDualInfeasible) {
    rep.status = SolveStatus::kInfeasible;
  } else if (dsol.status == SdpStatus::kDualInfeasible || psol.status == SdpStatus::kPrimalInfeasible) {
    rep.status = SolveStatus::kUnbounded;
  } else {
    rep.status = SolveStatus::kNumericalFailure;
  }

  if (rep.status == SolveStatus::kOptimal) {
    const double tol = 1e-5 * (1.0 + std::abs(rep.val_dual));
    if (std::abs(rep.val_primal - rep.val_dual) > tol) {
      rep.warnings.push_back("primal and dual relaxation values differ beyond tolerance");
    }
  }

  if (d_ok) {
    SdpSolution accepted = dsol;
    accepted.status = SdpStatus::kOptimal;
    rep.moments = moment_vector(dual, accepted);
    if (opts.recover && interior) {
      rep.x_star = recover(dual, accepted);
      for (const auto& c : prog.constraints) rep.margins.push_back(eval(c, *rep.x_star, opts.solver));
      rep.objective_at_x = eval(prog.objective, *rep.x_star, opts.solver);
      rep.gap = std::abs(rep.objective_at_x - rep.val_dual);
      for (double m : rep.margins) {
        if (m > 1e-6) {
          rep.warnings.push_back("recovered point violates a constraint by more than 1e-6");
          break;
        }
      }
    }
  }
  rep.wallclock_ms = elapsed_ms();
  return rep;
}

}  // namespace sosrelax
