#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sosrelax/errors.hpp"
#include "sosrelax/sdp.hpp"
#include "sosrelax/sdp_builder.hpp"

using namespace sosrelax;

namespace {

SymMatrix random_sym(int t, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SymMatrix m(t);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j <= i; ++j) m.at(i, j) = u(rng);
  }
  return m;
}

// min c'y s.t. A0 + sum y_k A_k >= 0, |y_k| <= box.
struct PencilProblem {
  std::vector<SymMatrix> a;
  std::vector<double> c;
  double box = 2.0;

  int dim() const { return static_cast<int>(c.size()); }

  SymMatrix pencil(const std::vector<double>& y) const {
    SymMatrix m = a[0];
    for (int k = 0; k < dim(); ++k) m += y[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k) + 1];
    return m;
  }

  // optional shift: maximize t with pencil - t I >= 0 instead
  SdpBuilder build(std::vector<int>& ys, int* shift = nullptr) const {
    SdpBuilder b;
    std::vector<SdpBuilder::MatrixTerm> terms;
    for (int k = 0; k < dim(); ++k) {
      ys.push_back(b.add_free());
      terms.push_back({ys.back(), a[static_cast<std::size_t>(k) + 1]});
      b.add_inequality(LinExpr(ys.back(), 1.0), box, RowSense::kLessEqual);
      b.add_inequality(LinExpr(ys.back(), 1.0), -box, RowSense::kGreaterEqual);
    }
    std::optional<int> margin;
    if (shift) {
      *shift = b.add_free();
      margin = *shift;
    }
    b.add_lmi(LmiStructure(a, false), a[0], terms, margin);
    if (shift) {
      b.set_objective(ObjectiveSense::kMaximize, LinExpr(*shift, 1.0));
    } else {
      LinExpr obj;
      for (int k = 0; k < dim(); ++k) obj.add(ys[static_cast<std::size_t>(k)], c[static_cast<std::size_t>(k)]);
      b.set_objective(ObjectiveSense::kMinimize, obj);
    }
    return b;
  }
};

PencilProblem random_pencil(std::mt19937_64& rng, int dim, bool strictly_feasible) {
  PencilProblem p;
  p.a.push_back(strictly_feasible ? SymMatrix::identity(3) : random_sym(3, rng));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < dim; ++k) {
    p.a.push_back(random_sym(3, rng));
    p.c.push_back(u(rng));
  }
  return p;
}

// Symmetric matrix of a functional's coefficients on PSD block `block`.
SymMatrix coef_block(const ConeSpec& cone, const std::vector<double>& coef, int block) {
  const int t = cone.psd_blocks[static_cast<std::size_t>(block)];
  SymMatrix m(t);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j <= i; ++j) m.at(i, j) = coef[static_cast<std::size_t>(cone.psd_index(block, i, j))];
  }
  return m;
}

std::vector<double> dense(const ConeSpec& cone, const LinearFunctional& f) {
  std::vector<double> v(static_cast<std::size_t>(cone.var_count()), 0.0);
  for (const auto& [i, c] : f.merged()) v[static_cast<std::size_t>(i)] += c;
  return v;
}

// Value of a functional at a scalarized point under the trace pairing.
double pair(const ConeSpec& cone, const std::vector<double>& coef, const std::vector<double>& x) {
  double s = 0.0;
  for (int b = 0; b < static_cast<int>(cone.psd_blocks.size()); ++b) {
    const int t = cone.psd_blocks[static_cast<std::size_t>(b)];
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j <= i; ++j) {
        const auto k = static_cast<std::size_t>(cone.psd_index(b, i, j));
        s += (i == j ? 1.0 : 2.0) * coef[k] * x[k];
      }
    }
  }
  for (int k = cone.nonneg_offset(); k < cone.var_count(); ++k) s += coef[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
  return s;
}

// Checks a combination of constraint rows lies in the dual cone (PSD blocks,
// nonneg, zero on free) within tol.
void expect_in_dual_cone(const ConeSpec& cone, const std::vector<double>& v, double tol) {
  for (int b = 0; b < static_cast<int>(cone.psd_blocks.size()); ++b) {
    EXPECT_GE(oracle::smallest_eigenvalue(coef_block(cone, v, b).to_dense()), -tol);
  }
  for (int k = 0; k < cone.nonneg_count; ++k) EXPECT_GE(v[static_cast<std::size_t>(cone.nonneg_index(k))], -tol);
  for (int k = 0; k < cone.free_count; ++k) EXPECT_NEAR(v[static_cast<std::size_t>(cone.free_index(k))], 0.0, tol);
}

void verify_farkas(const SdpProblem& p, const SdpSolution& sol) {
  ASSERT_EQ(sol.farkas_eq.size(), p.equalities.size());
  ASSERT_EQ(sol.farkas_ineq.size(), p.inequalities.size());
  std::vector<double> comb(static_cast<std::size_t>(p.cone.var_count()), 0.0);
  double rhs = 0.0;
  for (std::size_t i = 0; i < p.equalities.size(); ++i) {
    const auto a = dense(p.cone, p.equalities[i].a);
    for (std::size_t k = 0; k < comb.size(); ++k) comb[k] += sol.farkas_eq[i] * a[k];
    rhs += sol.farkas_eq[i] * p.equalities[i].rhs;
  }
  for (std::size_t i = 0; i < p.inequalities.size(); ++i) {
    const double v = sol.farkas_ineq[i];
    EXPECT_GE(v, -1e-9);
    const double sgn = p.inequalities[i].sense == RowSense::kLessEqual ? 1.0 : -1.0;
    const auto g = dense(p.cone, p.inequalities[i].a);
    for (std::size_t k = 0; k < comb.size(); ++k) comb[k] += v * sgn * g[k];
    rhs += v * sgn * p.inequalities[i].rhs;
  }
  expect_in_dual_cone(p.cone, comb, 1e-7);
  EXPECT_NEAR(rhs, -1.0, 1e-7);
}

void verify_ray(const SdpProblem& p, const SdpSolution& sol) {
  ASSERT_EQ(static_cast<int>(sol.ray.size()), p.cone.var_count());
  for (int b = 0; b < static_cast<int>(p.cone.psd_blocks.size()); ++b) {
    EXPECT_GE(oracle::smallest_eigenvalue(sol.primal_block(p.cone, b).to_dense()), -1e-7);
  }
  for (int k = 0; k < p.cone.nonneg_count; ++k) EXPECT_GE(sol.ray[static_cast<std::size_t>(p.cone.nonneg_index(k))], -1e-9);
  for (const auto& row : p.equalities) EXPECT_NEAR(pair(p.cone, dense(p.cone, row.a), sol.ray), 0.0, 1e-7);
  for (const auto& row : p.inequalities) {
    const double v = pair(p.cone, dense(p.cone, row.a), sol.ray);
    if (row.sense == RowSense::kLessEqual) {
      EXPECT_LE(v, 1e-7);
    } else {
      EXPECT_GE(v, -1e-7);
    }
  }
  const double slope = pair(p.cone, dense(p.cone, p.objective), sol.ray);
  if (p.sense == ObjectiveSense::kMinimize) {
    EXPECT_LT(slope, -0.5);
  } else {
    EXPECT_GT(slope, 0.5);
  }
}

}  // namespace

TEST(Solve, OneByOneBlock) {
  SdpProblem p;
  p.cone.psd_blocks = {1};
  p.objective.add(0, 1.0);
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SdpStatus::kOptimal);
  EXPECT_NEAR(sol.primal_value, 0.0, 1e-8);
}

TEST(Solve, SmallestEigenvalueOfDiagonal) {
  SdpBuilder b;
  const int mu = b.add_free();
  LmiStructure s({SymMatrix::diagonal(std::vector<double>{1.0, 2.0}), SymMatrix::identity(2)});
  b.add_lmi(s, SymMatrix::diagonal(std::vector<double>{1.0, 2.0}), {{mu, -1.0 * SymMatrix::identity(2)}});
  b.set_objective(ObjectiveSense::kMaximize, LinExpr(mu, 1.0));
  const auto sol = solve(b.build());
  ASSERT_EQ(sol.status, SdpStatus::kOptimal);
  EXPECT_NEAR(b.value(sol, mu), 1.0, 1e-7);
  EXPECT_NEAR(sol.primal_value, 1.0, 1e-7);
}

TEST(Solve, RandomPencilsMatchLevelSearch) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const PencilProblem p = random_pencil(rng, 2, true);
    std::vector<int> ys;
    SdpBuilder b = p.build(ys);
    const auto sol = solve(b.build());
    ASSERT_EQ(sol.status, SdpStatus::kOptimal) << "trial " << trial;
    const double ref = oracle::concave_level_min_2d(
        p.c, [&](const std::vector<double>& y) { return oracle::smallest_eigenvalue(p.pencil(y).to_dense()); },
        {-p.box, -p.box}, {p.box, p.box});
    EXPECT_NEAR(sol.primal_value, ref, 1e-4) << "trial " << trial;
    // the returned point is feasible
    std::vector<double> y{b.value(sol, ys[0]), b.value(sol, ys[1])};
    EXPECT_GE(oracle::smallest_eigenvalue(p.pencil(y).to_dense()), -1e-7);
  }
}

TEST(Solve, OptimalSolutionInvariants) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const PencilProblem pp = random_pencil(rng, 3, true);
    std::vector<int> ys;
    const SdpProblem p = pp.build(ys).build();
    const auto sol = solve(p);
    ASSERT_EQ(sol.status, SdpStatus::kOptimal);
    EXPECT_LE(std::abs(sol.primal_value - sol.dual_value), 1e-8 * (1.0 + std::abs(sol.primal_value)) + 1e-10);
    // weak duality at the solution
    EXPECT_GE(sol.primal_value, sol.dual_value - 1e-8);
    for (const auto& row : p.equalities) {
      EXPECT_NEAR(pair(p.cone, dense(p.cone, row.a), sol.x), row.rhs, 1e-7 * (1.0 + std::abs(row.rhs)));
    }
    for (int blk = 0; blk < static_cast<int>(p.cone.psd_blocks.size()); ++blk) {
      EXPECT_GE(oracle::smallest_eigenvalue(sol.primal_block(p.cone, blk).to_dense()), -1e-8);
    }
  }
}

TEST(Solve, FailureReturnsBestIterate) {
  std::mt19937_64 rng(13);
  const PencilProblem pp = random_pencil(rng, 3, true);
  std::vector<int> ys;
  const SdpProblem p = pp.build(ys).build();
  SolverOptions o;
  o.max_iter = 3;
  const auto sol = solve(p, o);
  ASSERT_EQ(sol.status, SdpStatus::kNumericalFailure);
  ASSERT_FALSE(sol.history.empty());
  // worst tolerance ratio, the relative gap measured against the smaller objective
  auto merit = [&](const IterationInfo& h) {
    const double gap = std::max(h.gap, std::abs(h.primal_value - h.dual_value));
    const double rel = gap / std::max(1.0, std::min(std::abs(h.primal_value), std::abs(h.dual_value)));
    return std::max({h.primal_residual / o.feas_tol, h.dual_residual / o.feas_tol, std::min(rel / o.gap_tol, gap / o.abs_gap_tol)});
  };
  const IterationInfo* reported = nullptr;
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& h : sol.history) {
    if (h.primal_residual == sol.primal_residual && h.dual_residual == sol.dual_residual) reported = &h;
    lowest = std::min(lowest, merit(h));
  }
  ASSERT_NE(reported, nullptr);
  // the reported point is the best one seen
  EXPECT_LE(merit(*reported), lowest * (1.0 + 1e-12));
}

TEST(Solve, Reproducible) {
  std::mt19937_64 rng(11);
  const PencilProblem pp = random_pencil(rng, 3, true);
  std::vector<int> ys;
  const SdpProblem p = pp.build(ys).build();
  const auto s1 = solve(p);
  const auto s2 = solve(p);
  EXPECT_EQ(s1.iterations, s2.iterations);
  EXPECT_EQ(s1.primal_value, s2.primal_value);
  EXPECT_EQ(s1.x, s2.x);
}

// Random ellipse {y : |M y + q| <= 1} as an arrow LMI; its curved boundary
// makes the minimizer of a linear objective well determined.
PencilProblem random_ellipse(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PencilProblem p;
  Eigen::Matrix2d m;
  m << 1.0 + 0.5 * u(rng), 0.5 * u(rng), 0.5 * u(rng), 1.0 + 0.5 * u(rng);
  const Eigen::Vector2d q(0.3 * u(rng), 0.3 * u(rng));
  SymMatrix a0 = SymMatrix::identity(3);
  a0.at(2, 0) = q(0);
  a0.at(2, 1) = q(1);
  p.a.push_back(a0);
  for (int k = 0; k < 2; ++k) {
    SymMatrix ak(3);
    ak.at(2, 0) = m(0, k);
    ak.at(2, 1) = m(1, k);
    p.a.push_back(ak);
    p.c.push_back(u(rng));
  }
  p.box = 10.0;
  return p;
}

// At the default 1e-8 gap the minimizer is only pinned to about 1e-5 along
// the boundary; the comparison runs at a 1e-10 stop.
TEST(Solve, ObjectiveScalingKeepsMinimizer) {
  SolverOptions tight;
  tight.gap_tol = 1e-10;
  tight.feas_tol = 1e-10;
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    PencilProblem pp = random_ellipse(rng);
    std::vector<int> ys1, ys2;
    SdpBuilder b1 = pp.build(ys1);
    const auto s1 = solve(b1.build(), tight);
    for (double& c : pp.c) c *= 7.5;
    SdpBuilder b2 = pp.build(ys2);
    const auto s2 = solve(b2.build(), tight);
    ASSERT_TRUE(s1.optimal() && s2.optimal());
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(b1.value(s1, ys1[static_cast<std::size_t>(k)]), b2.value(s2, ys2[static_cast<std::size_t>(k)]), 1e-6);
    EXPECT_NEAR(7.5 * s1.primal_value, s2.primal_value, 1e-6);
  }
}

TEST(Solve, InfeasibleHasFarkasCertificate) {
  // [[1, y], [y, 1]] >= 0 and y >= 2
  SdpBuilder b;
  const int y = b.add_free();
  const SymMatrix off = SymMatrix::unit(2, 0, 1);
  b.add_lmi(LmiStructure({SymMatrix::identity(2), off}), SymMatrix::identity(2), {{y, off}});
  b.add_inequality(LinExpr(y, 1.0), 2.0, RowSense::kGreaterEqual);
  b.set_objective(ObjectiveSense::kMinimize, LinExpr(y, 1.0));
  const SdpProblem p = b.build();
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SdpStatus::kPrimalInfeasible);
  verify_farkas(p, sol);
}

TEST(Solve, UnboundedHasImprovingRay) {
  // min -y over [[y]] >= 0
  SdpBuilder b;
  const int y = b.add_free();
  b.add_lmi(LmiStructure({SymMatrix(1), SymMatrix::identity(1)}), SymMatrix(1), {{y, SymMatrix::identity(1)}});
  b.set_objective(ObjectiveSense::kMinimize, LinExpr(y, -1.0));
  const SdpProblem p = b.build();
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SdpStatus::kDualInfeasible);
  verify_ray(p, sol);
  EXPECT_GT(b.ray_value(sol, y), 0.0);
}

TEST(Solve, UnboundedWithPsdBlock) {
  // max X_11 with X >= 0 and X_22 = 1
  SdpProblem p;
  p.cone.psd_blocks = {2};
  p.sense = ObjectiveSense::kMaximize;
  p.objective.add_psd(p.cone, 0, 0, 0, 1.0);
  EqualityRow r;
  r.a.add_psd(p.cone, 0, 1, 1, 1.0);
  r.rhs = 1.0;
  p.equalities.push_back(r);
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SdpStatus::kDualInfeasible);
  verify_ray(p, sol);
}

TEST(Solve, RejectsNonFiniteData) {
  SdpProblem p;
  p.cone.psd_blocks = {1};
  p.objective.add(0, std::nan(""));
  EXPECT_THROW(solve(p), InvalidInput);
}

TEST(Solve, RejectsOversizedBlocks) {
  SdpProblem p;
  p.cone.psd_blocks = {201};
  EXPECT_THROW(solve(p), SizeLimitError);
}

TEST(CheckFeasible, Examples) {
  const SymMatrix off = SymMatrix::unit(2, 0, 1);
  {
    SdpBuilder b;
    const int y = b.add_free();
    b.add_lmi(LmiStructure({SymMatrix::identity(2), off}), SymMatrix::identity(2), {{y, off}});
    b.add_inequality(LinExpr(y, 1.0), 2.0, RowSense::kGreaterEqual);
    EXPECT_EQ(check_feasible(b.build()).verdict, Feasibility::kInfeasible);
  }
  {
    SdpBuilder b;
    const int y = b.add_free();
    b.add_lmi(LmiStructure({SymMatrix::identity(2), off}), SymMatrix::identity(2), {{y, off}});
    const auto r = check_feasible(b.build());
    ASSERT_EQ(r.verdict, Feasibility::kFeasible);
    const double yv = b.value(r.solution, y);
    EXPECT_LE(std::abs(yv), 1.0 + 1e-8);
  }
}

TEST(CheckFeasible, AgreesWithMaxMargin) {
  std::mt19937_64 rng(17);
  int decided = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const PencilProblem pp = random_pencil(rng, 2, false);
    int shift = -1;
    std::vector<int> ys_m;
    SdpBuilder bm = pp.build(ys_m, &shift);
    const auto margin = solve(bm.build());
    ASSERT_EQ(margin.status, SdpStatus::kOptimal);
    const double t = margin.primal_value;
    if (std::abs(t) < 1e-4) continue;
    ++decided;
    std::vector<int> ys;
    SdpBuilder b = pp.build(ys);
    const auto r = check_feasible(b.build());
    if (t > 0) {
      ASSERT_EQ(r.verdict, Feasibility::kFeasible) << "trial " << trial;
      std::vector<double> y{b.value(r.solution, ys[0]), b.value(r.solution, ys[1])};
      EXPECT_GE(oracle::smallest_eigenvalue(pp.pencil(y).to_dense()), -1e-8);
      EXPECT_LE(std::abs(y[0]), pp.box + 1e-8);
    } else {
      ASSERT_EQ(r.verdict, Feasibility::kInfeasible) << "trial " << trial;
      verify_farkas(b.build(), r.solution);
    }
  }
  EXPECT_GE(decided, 10);
}

TEST(MinEig, Examples) {
  EXPECT_NEAR(min_eig(SymMatrix::identity(3)), 1.0, 1e-12);
  const SymMatrix d = SymMatrix::diagonal(std::vector<double>{1.0, 2.0});
  EXPECT_NEAR(-min_eig(-1.0 * d), 2.0, 1e-12);
  EXPECT_NEAR(max_eig(d), 2.0, 1e-12);
}

TEST(MinEig, MatchesInertiaBisection) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix m = random_sym(8, rng, 3.0);
    const double ref = oracle::smallest_eigenvalue(m.to_dense());
    EXPECT_NEAR(min_eig(m), ref, 1e-10 * (1.0 + m.frobenius_norm()));
    const auto ev = eigenvalues(m);
    ASSERT_EQ(ev.size(), 8u);
    for (std::size_t k = 1; k < ev.size(); ++k) EXPECT_GE(ev[k - 1], ev[k]);
    for (int k = 0; k < 8; ++k) EXPECT_NEAR(ev[static_cast<std::size_t>(7 - k)], oracle::kth_eigenvalue(m.to_dense(), k), 1e-9);
  }
}

TEST(SymMatrix, PackingAndTrace) {
  EXPECT_EQ(packed_index(0, 0), 0);
  EXPECT_EQ(packed_index(1, 0), 1);
  EXPECT_EQ(packed_index(0, 1), 1);
  EXPECT_EQ(packed_index(2, 0), 3);
  std::mt19937_64 rng(23);
  const SymMatrix a = random_sym(4, rng), b = random_sym(4, rng);
  EXPECT_NEAR(trace_inner(a, b), (a.to_dense() * b.to_dense()).trace(), 1e-12);
  const SymMatrix bd = block_diag(a, b);
  EXPECT_EQ(bd.dim(), 8);
  EXPECT_EQ(bd(5, 4), b(1, 0));
  EXPECT_EQ(bd(5, 1), 0.0);
}

TEST(Sdpa, WrittenDataReproducesConstraints) {
  std::mt19937_64 rng(29);
  const PencilProblem pp = random_pencil(rng, 2, true);
  std::vector<int> ys;
  const SdpProblem p = pp.build(ys).build();
  const auto sol = solve(p);
  ASSERT_TRUE(sol.optimal());

  std::ostringstream out;
  write_sdpa(p, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  ASSERT_EQ(line.front(), '"');
  int mdim = 0, nblocks = 0;
  in >> mdim;
  std::getline(in, line);
  in >> nblocks;
  std::getline(in, line);
  EXPECT_EQ(mdim, static_cast<int>(p.equalities.size() + p.inequalities.size()));
  std::vector<int> sizes(static_cast<std::size_t>(nblocks));
  for (int& s : sizes) in >> s;
  std::vector<double> c(static_cast<std::size_t>(mdim));
  for (double& v : c) in >> v;

  // Conic point Y in SDPA layout built from the solution.
  const ConeSpec& cone = p.cone;
  const int nineq = static_cast<int>(p.inequalities.size());
  auto y_entry = [&](int block, int i, int j) -> double {
    const int npsd = static_cast<int>(cone.psd_blocks.size());
    if (block <= npsd) return sol.x[static_cast<std::size_t>(cone.psd_index(block - 1, i - 1, j - 1))];
    if (i != j) return 0.0;
    int k = i - 1;
    if (k < cone.nonneg_count) return sol.x[static_cast<std::size_t>(cone.nonneg_index(k))];
    k -= cone.nonneg_count;
    if (k < cone.free_count) return std::max(0.0, sol.x[static_cast<std::size_t>(cone.free_index(k))]);
    k -= cone.free_count;
    if (k < cone.free_count) return std::max(0.0, -sol.x[static_cast<std::size_t>(cone.free_index(k))]);
    k -= cone.free_count;
    EXPECT_LT(k, nineq);
    const auto& row = p.inequalities[static_cast<std::size_t>(k)];
    const double g = pair(cone, dense(cone, row.a), sol.x);
    return row.sense == RowSense::kLessEqual ? row.rhs - g : g - row.rhs;
  };
  std::vector<double> lhs(static_cast<std::size_t>(mdim) + 1, 0.0);
  int matno, block, i, j;
  double v;
  while (in >> matno >> block >> i >> j >> v) {
    ASSERT_LE(i, j);
    lhs[static_cast<std::size_t>(matno)] += (i == j ? 1.0 : 2.0) * v * y_entry(block, i, j);
  }
  for (int r = 0; r < mdim; ++r) EXPECT_NEAR(lhs[static_cast<std::size_t>(r) + 1], c[static_cast<std::size_t>(r)], 1e-7);
  // F0 . Y is the negated minimization objective
  EXPECT_NEAR(lhs[0], -sol.primal_value, 1e-7);
}
