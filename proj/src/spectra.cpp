#include "sosrelax/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "sosrelax/errors.hpp"

namespace sosrelax {

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::vector<SymMatrix> pencil_matrices(const std::vector<SymMatrix>& a, const std::vector<SymMatrix>& b) {
  std::vector<SymMatrix> all = a;
  all.insert(all.end(), b.begin(), b.end());
  return all;
}

}  // namespace

Spectrahedron::Spectrahedron(std::vector<SymMatrix> a, std::vector<SymMatrix> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty()) throw InvalidInput("a spectrahedron needs at least the constant matrix A_0");
  const int t = a_.front().dim();
  for (const auto& m : a_) {
    if (m.dim() != t) throw DimensionError("LMI matrices differ in size");
    for (double v : m.packed()) {
      if (!std::isfinite(v)) throw InvalidInput("non-finite LMI entry");
    }
  }
  for (const auto& m : b_) {
    if (m.dim() != t) throw DimensionError("LMI matrices differ in size");
    for (double v : m.packed()) {
      if (!std::isfinite(v)) throw InvalidInput("non-finite LMI entry");
    }
  }
  if (t > 0) structure_ = LmiStructure(pencil_matrices(a_, b_));
}

Spectrahedron Spectrahedron::unchecked(std::vector<SymMatrix> a, std::vector<SymMatrix> b) {
  return Spectrahedron(std::move(a), std::move(b));
}

Spectrahedron Spectrahedron::from_lmi(std::vector<SymMatrix> a, std::vector<SymMatrix> b, const SolverOptions& opts) {
  Spectrahedron s(std::move(a), std::move(b));
  if (s.t() == 0) {
    if (s.m() > 0) throw InvalidInput("an empty LMI leaves y unbounded");
    return s;
  }
  SdpBuilder sb;
  std::vector<SdpBuilder::MatrixTerm> terms;
  for (int j = 1; j <= s.m(); ++j) terms.push_back({sb.add_free(), s.a_[static_cast<std::size_t>(j)]});
  for (const auto& bl : s.b_) terms.push_back({sb.add_free(), bl});
  sb.add_lmi(s.structure_, s.a_.front(), terms);
  const auto feas = check_feasible(sb.build(), opts);
  if (feas.verdict == Feasibility::kInfeasible) throw InvalidInput("spectrahedron is empty");
  if (feas.verdict != Feasibility::kFeasible) throw SolverFailure("could not decide whether the spectrahedron is empty");
  const auto bounded = assert_bounded(s, opts);
  if (!bounded.bounded) throw InvalidInput("spectrahedron is unbounded");
  return s;
}

Spectrahedron Spectrahedron::simplex(int m) {
  if (m < 1) throw InvalidInput("simplex dimension must be positive");
  const int t = m + 2;
  std::vector<SymMatrix> a(static_cast<std::size_t>(m) + 1, SymMatrix(t));
  a[0].at(m, m) = 1.0;
  a[0].at(m + 1, m + 1) = -1.0;
  for (int j = 1; j <= m; ++j) {
    a[static_cast<std::size_t>(j)].at(j - 1, j - 1) = 1.0;
    a[static_cast<std::size_t>(j)].at(m, m) = -1.0;
    a[static_cast<std::size_t>(j)].at(m + 1, m + 1) = 1.0;
  }
  return Spectrahedron(std::move(a), {});
}

Spectrahedron Spectrahedron::l2_ball(int m) {
  if (m < 1) throw InvalidInput("ball dimension must be positive");
  const int t = m + 1;
  std::vector<SymMatrix> a(static_cast<std::size_t>(m) + 1, SymMatrix(t));
  a[0] = SymMatrix::identity(t);
  for (int j = 1; j <= m; ++j) a[static_cast<std::size_t>(j)].at(m, j - 1) = 1.0;
  return Spectrahedron(std::move(a), {});
}

Spectrahedron Spectrahedron::box(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size()) throw DimensionError("box bounds differ in length");
  const int m = static_cast<int>(lo.size());
  if (m < 1) throw InvalidInput("box dimension must be positive");
  for (int j = 0; j < m; ++j) {
    if (!(lo[static_cast<std::size_t>(j)] <= hi[static_cast<std::size_t>(j)])) throw InvalidInput("box has lo > hi");
  }
  const int t = 2 * m;
  std::vector<SymMatrix> a(static_cast<std::size_t>(m) + 1, SymMatrix(t));
  for (int j = 0; j < m; ++j) {
    a[0].at(2 * j, 2 * j) = -lo[static_cast<std::size_t>(j)];
    a[0].at(2 * j + 1, 2 * j + 1) = hi[static_cast<std::size_t>(j)];
    a[static_cast<std::size_t>(j) + 1].at(2 * j, 2 * j) = 1.0;
    a[static_cast<std::size_t>(j) + 1].at(2 * j + 1, 2 * j + 1) = -1.0;
  }
  return Spectrahedron(std::move(a), {});
}

Spectrahedron Spectrahedron::psd_trace_one(int k) {
  if (k < 1) throw InvalidInput("matrix size must be positive");
  const int m = packed_size(k);
  const int t = k + 2;
  std::vector<SymMatrix> a(static_cast<std::size_t>(m) + 1, SymMatrix(t));
  a[0].at(k, k) = 1.0;
  a[0].at(k + 1, k + 1) = -1.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      SymMatrix& aj = a[static_cast<std::size_t>(packed_index(i, j)) + 1];
      if (i == j) {
        aj.at(i, i) = 1.0;
        aj.at(k, k) = -1.0;
        aj.at(k + 1, k + 1) = 1.0;
      } else {
        aj.at(i, j) = 1.0 / kSqrt2;
      }
    }
  }
  return Spectrahedron(std::move(a), {});
}

Spectrahedron Spectrahedron::point(std::span<const double> ybar) {
  const int m = static_cast<int>(ybar.size());
  if (m == 0) return Spectrahedron({SymMatrix(0)}, {});
  return box(ybar, ybar);
}

SymMatrix Spectrahedron::pencil(std::span<const double> y, std::span<const double> z) const {
  if (static_cast<int>(y.size()) != m()) throw DimensionError("point has the wrong dimension");
  if (!z.empty() && static_cast<int>(z.size()) != p()) throw DimensionError("lifting has the wrong dimension");
  SymMatrix s = a_.front();
  for (int j = 0; j < m(); ++j) s += y[static_cast<std::size_t>(j)] * a_[static_cast<std::size_t>(j) + 1];
  for (std::size_t l = 0; l < z.size(); ++l) s += z[l] * b_[l];
  return s;
}

std::vector<double> svec(const SymMatrix& x) {
  std::vector<double> v(static_cast<std::size_t>(packed_size(x.dim())));
  for (int i = 0; i < x.dim(); ++i) {
    for (int j = 0; j <= i; ++j) v[static_cast<std::size_t>(packed_index(i, j))] = (i == j ? 1.0 : kSqrt2) * x(i, j);
  }
  return v;
}

SymMatrix smat(std::span<const double> v, int k) {
  if (static_cast<int>(v.size()) != packed_size(k)) throw DimensionError("svec vector has the wrong length");
  SymMatrix x(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) x.at(i, j) = v[static_cast<std::size_t>(packed_index(i, j))] / (i == j ? 1.0 : kSqrt2);
  }
  return x;
}

Membership contains(const Spectrahedron& omega, std::span<const double> y, const SolverOptions& opts) {
  if (static_cast<int>(y.size()) != omega.m()) throw DimensionError("point has the wrong dimension");
  Membership r;
  if (omega.t() == 0) {
    r.contained = true;
    return r;
  }
  const SymMatrix fixed = omega.pencil(y);
  if (omega.p() == 0) {
    r.margin = min_eig(fixed);
    r.contained = r.margin >= -opts.feas_tol;
    return r;
  }
  // max t s.t. fixed + sum z_l B_l - t I >= 0, t <= 1
  std::vector<SymMatrix> mats{fixed};
  mats.insert(mats.end(), omega.b().begin(), omega.b().end());
  const LmiStructure st(mats, false);
  SdpBuilder sb;
  std::vector<SdpBuilder::MatrixTerm> terms;
  std::vector<int> zv;
  for (const auto& bl : omega.b()) {
    zv.push_back(sb.add_free());
    terms.push_back({zv.back(), bl});
  }
  const int t = sb.add_free();
  sb.add_lmi(st, fixed, terms, t);
  sb.add_inequality(LinExpr(t, 1.0), 1.0, RowSense::kLessEqual);
  sb.set_objective(ObjectiveSense::kMaximize, LinExpr(t, 1.0));
  const auto sol = solve(sb.build(), opts);
  if (sol.status == SdpStatus::kPrimalInfeasible) return r;
  if (sol.status != SdpStatus::kOptimal) throw SolverFailure("membership test: " + to_string(sol.status));
  r.margin = sb.value(sol, t);
  r.contained = r.margin >= -opts.feas_tol;
  for (int v : zv) r.z.push_back(sb.value(sol, v));
  return r;
}

LinearMax maximize_linear(const Spectrahedron& omega, std::span<const double> c, const SolverOptions& opts) {
  if (static_cast<int>(c.size()) != omega.m()) throw DimensionError("objective has the wrong dimension");
  LinearMax r;
  if (omega.t() == 0) {
    r.dual = SymMatrix(0);
    return r;
  }
  SdpBuilder sb;
  std::vector<SdpBuilder::MatrixTerm> terms;
  std::vector<int> yv, zv;
  for (int j = 1; j <= omega.m(); ++j) {
    yv.push_back(sb.add_free());
    terms.push_back({yv.back(), omega.a()[static_cast<std::size_t>(j)]});
  }
  for (const auto& bl : omega.b()) {
    zv.push_back(sb.add_free());
    terms.push_back({zv.back(), bl});
  }
  const int lmi = sb.add_lmi(omega.structure(), omega.a().front(), terms);
  LinExpr obj;
  for (int j = 0; j < omega.m(); ++j) obj.add(yv[static_cast<std::size_t>(j)], c[static_cast<std::size_t>(j)]);
  sb.set_objective(ObjectiveSense::kMaximize, obj);
  const auto sol = solve(sb.build(), opts);
  if (sol.status != SdpStatus::kOptimal) throw SolverFailure("linear maximization over a spectrahedron: " + to_string(sol.status));
  r.value = sol.primal_value;
  for (int v : yv) r.y.push_back(sb.value(sol, v));
  for (int v : zv) r.z.push_back(sb.value(sol, v));
  r.dual = sb.lmi_dual(sol, lmi);
  return r;
}

BoundednessResult assert_bounded(const Spectrahedron& omega, const SolverOptions& opts) {
  BoundednessResult r;
  const int m = omega.m();
  if (m == 0) return r;
  if (omega.t() == 0) {
    r.bounded = false;
    r.direction.assign(static_cast<std::size_t>(m), 0.0);
    r.direction[0] = 1.0;
    return r;
  }
  SdpBuilder sb;
  std::vector<SdpBuilder::MatrixTerm> terms;
  std::vector<int> yv;
  for (int j = 1; j <= m; ++j) {
    yv.push_back(sb.add_free());
    terms.push_back({yv.back(), omega.a()[static_cast<std::size_t>(j)]});
  }
  for (const auto& bl : omega.b()) terms.push_back({sb.add_free(), bl});
  sb.add_lmi(omega.structure(), omega.a().front(), terms);
  r.lo.resize(static_cast<std::size_t>(m));
  r.hi.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    for (double dir : {1.0, -1.0}) {
      sb.set_objective(ObjectiveSense::kMaximize, LinExpr(yv[static_cast<std::size_t>(j)], dir));
      const auto sol = solve(sb.build(), opts);
      if (sol.status == SdpStatus::kDualInfeasible) {
        r.bounded = false;
        r.lo.clear();
        r.hi.clear();
        for (int v : yv) r.direction.push_back(sb.ray_value(sol, v));
        return r;
      }
      if (sol.status == SdpStatus::kPrimalInfeasible) throw InvalidInput("spectrahedron is empty");
      if (sol.status != SdpStatus::kOptimal) throw SolverFailure("boundedness check: " + to_string(sol.status));
      (dir > 0 ? r.hi : r.lo)[static_cast<std::size_t>(j)] = dir * sol.primal_value;
    }
  }
  return r;
}

Spectrahedron product(const Spectrahedron& x, const Spectrahedron& y) {
  const int tx = x.t(), ty = y.t();
  auto left = [&](const SymMatrix& a) { return block_diag(a, SymMatrix(ty)); };
  auto right = [&](const SymMatrix& a) { return block_diag(SymMatrix(tx), a); };
  std::vector<SymMatrix> a{block_diag(x.a().front(), y.a().front())};
  for (int j = 1; j <= x.m(); ++j) a.push_back(left(x.a()[static_cast<std::size_t>(j)]));
  for (int j = 1; j <= y.m(); ++j) a.push_back(right(y.a()[static_cast<std::size_t>(j)]));
  std::vector<SymMatrix> b;
  for (const auto& m : x.b()) b.push_back(left(m));
  for (const auto& m : y.b()) b.push_back(right(m));
  return Spectrahedron::unchecked(std::move(a), std::move(b));
}

InteriorMargin interior_margin(const Spectrahedron& omega, const SolverOptions& opts) {
  InteriorMargin r;
  if (omega.t() == 0) {
    r.margin = 1.0;
    r.strict = true;
    return r;
  }
  SdpBuilder sb;
  std::vector<SdpBuilder::MatrixTerm> terms;
  std::vector<int> yv, zv;
  for (int j = 1; j <= omega.m(); ++j) {
    yv.push_back(sb.add_free());
    terms.push_back({yv.back(), omega.a()[static_cast<std::size_t>(j)]});
  }
  for (const auto& bl : omega.b()) {
    zv.push_back(sb.add_free());
    terms.push_back({zv.back(), bl});
  }
  const int t = sb.add_free();
  sb.add_lmi(omega.structure(), omega.a().front(), terms, t);
  sb.add_inequality(LinExpr(t, 1.0), 1.0, RowSense::kLessEqual);
  sb.set_objective(ObjectiveSense::kMaximize, LinExpr(t, 1.0));
  const auto sol = solve(sb.build(), opts);
  if (sol.status == SdpStatus::kPrimalInfeasible) {
    r.margin = -1.0;
    return r;
  }
  if (sol.status != SdpStatus::kOptimal) throw SolverFailure("interior margin: " + to_string(sol.status));
  r.margin = sb.value(sol, t);
  r.strict = r.margin > 1e-8;
  for (int v : yv) r.y.push_back(sb.value(sol, v));
  for (int v : zv) r.z.push_back(sb.value(sol, v));
  return r;
}

std::vector<std::vector<double>> sample_extreme_points(const Spectrahedron& omega, int count, std::mt19937_64& rng,
                                                       const SolverOptions& opts) {
  std::vector<std::vector<double>> pts;
  std::normal_distribution<double> gauss;
  for (int k = 0; k < count; ++k) {
    std::vector<double> c(static_cast<std::size_t>(omega.m()));
    for (double& v : c) v = gauss(rng);
    pts.push_back(maximize_linear(omega, c, opts).y);
  }
  return pts;
}

}  // namespace sosrelax
