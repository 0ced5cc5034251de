#pragma once

// Random robust programs with polytope uncertainty, together with their
// scenario form (one quadratic per vertex of U) for brute-force checks.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "programs.hpp"
#include "sosrelax/robust.hpp"

namespace testprog {

struct RobustInstance {
  sosrelax::RobustProgram rp;
  oracle::Quadratic objective;
  // scenarios[i] holds constraint i at every vertex of U_i
  std::vector<std::vector<oracle::Quadratic>> scenarios;
};

inline Polynomial to_poly(const oracle::Quadratic& q) {
  const int n = static_cast<int>(q.p.size());
  Polynomial f = cst(n, q.r);
  for (int i = 0; i < n; ++i) {
    f = f + q.p(i) * var(n, i);
    for (int j = 0; j < n; ++j) f = f + q.P(i, j) * (var(n, i) * var(n, j));
  }
  return f;
}

inline oracle::Quadratic disc_quadratic(const Eigen::VectorXd& d, double r) {
  const int n = static_cast<int>(d.size());
  return {Eigen::MatrixXd::Identity(n, n), -2.0 * d, d.squaredNorm() - r * r};
}

inline oracle::Quadratic affine_quadratic(const Eigen::VectorXd& a, double b) {
  const int n = static_cast<int>(a.size());
  return {Eigen::MatrixXd::Zero(n, n), a, b};
}

inline oracle::Quadratic combine(const std::vector<oracle::Quadratic>& g, const std::vector<double>& u) {
  oracle::Quadratic q = g[0];
  for (std::size_t j = 1; j < g.size(); ++j) {
    q.P += u[j - 1] * g[j].P;
    q.p += u[j - 1] * g[j].p;
    q.r += u[j - 1] * g[j].r;
  }
  return q;
}

// Box U as an LMI: the matrices of the built-in box set.
inline std::vector<sosrelax::SymMatrix> box_lmi(const std::vector<double>& lo, const std::vector<double>& hi) {
  return sosrelax::Spectrahedron::box(lo, hi).a();
}

inline std::vector<std::vector<double>> box_vertices(const std::vector<double>& lo, const std::vector<double>& hi) {
  std::vector<std::vector<double>> out;
  const std::size_t m = lo.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::vector<double> v(m);
    for (std::size_t j = 0; j < m; ++j) v[j] = (mask >> j & 1) ? hi[j] : lo[j];
    out.push_back(v);
  }
  return out;
}

inline void add_constraint(RobustInstance& inst, const std::vector<oracle::Quadratic>& g, int t,
                           std::vector<sosrelax::SymMatrix> a, const std::vector<std::vector<double>>& vertices) {
  sosrelax::UncertainConstraint c;
  for (const auto& q : g) c.g.push_back(to_poly(q));
  c.t = t;
  c.a = std::move(a);
  inst.rp.constraints.push_back(c);
  std::vector<oracle::Quadratic> sc;
  for (const auto& v : vertices) sc.push_back(combine(g, v));
  inst.scenarios.push_back(sc);
}

// n = 2. Every instance is strictly feasible at the origin. kind % 3 picks the
// uncertainty: affine terms over a box, an SOS-convex weight in [0, 1] next
// to an affine term, or a choice between two discs over the simplex.
inline RobustInstance random_robust(int kind, std::mt19937_64& rng, double widen = 1.0) {
  const int n = 2;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rvec = [&](double s) {
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v(k) = s * u(rng);
    return v;
  };
  auto radius = [&] { return 1.2 + 0.2 * u(rng); };
  RobustInstance inst;
  const Eigen::VectorXd c = rvec(2.0);
  inst.objective = disc_quadratic(c, 0.0);
  inst.rp.objective = to_poly(inst.objective);

  switch (kind % 3) {
    case 0: {
      const std::vector<oracle::Quadratic> g{disc_quadratic(rvec(0.2), radius()), affine_quadratic(rvec(0.3), 0.2 * u(rng)),
                                             affine_quadratic(rvec(0.3), 0.2 * u(rng))};
      const std::vector<double> lo{-widen, -widen}, hi{widen, widen};
      add_constraint(inst, g, 0, box_lmi(lo, hi), box_vertices(lo, hi));
      break;
    }
    case 1: {
      oracle::Quadratic bowl{0.3 * Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n), 0.0};
      const std::vector<oracle::Quadratic> g{disc_quadratic(rvec(0.2), radius()), bowl,
                                             affine_quadratic(rvec(0.3), 0.2 * u(rng))};
      const std::vector<double> lo{0.0, -widen}, hi{widen, widen};
      add_constraint(inst, g, 1, box_lmi(lo, hi), box_vertices(lo, hi));
      break;
    }
    default: {
      const oracle::Quadratic zero{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0};
      const std::vector<oracle::Quadratic> g{zero, disc_quadratic(rvec(0.2), radius()),
                                             disc_quadratic(rvec(0.2), radius())};
      add_constraint(inst, g, 2, sosrelax::Spectrahedron::simplex(2).a(), {{1.0, 0.0}, {0.0, 1.0}});
      // a second, box-indexed constraint
      const std::vector<oracle::Quadratic> h{disc_quadratic(rvec(0.2), radius()), affine_quadratic(rvec(0.3), 0.0)};
      const std::vector<double> lo{-widen}, hi{widen};
      add_constraint(inst, h, 0, box_lmi(lo, hi), box_vertices(lo, hi));
      break;
    }
  }
  return inst;
}

// Optimal value of the scenario program over all vertices.
inline double scenario_min(const RobustInstance& inst) {
  std::vector<oracle::Quadratic> all;
  for (const auto& sc : inst.scenarios) all.insert(all.end(), sc.begin(), sc.end());
  return oracle::barrier_min(inst.objective, all, Eigen::VectorXd::Zero(inst.objective.p.size()));
}

// Worst case of constraint i at x by vertex enumeration.
inline double vertex_max(const RobustInstance& inst, std::size_t i, const Eigen::VectorXd& x) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& q : inst.scenarios[i]) best = std::max(best, q(x));
  return best;
}

}  // namespace testprog
