#include "sosrelax/robust.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "sosrelax/errors.hpp"

namespace sosrelax {

double UncertainConstraint::value(std::span<const double> x, std::span<const double> u) const {
  if (static_cast<int>(u.size()) != s()) throw DimensionError("uncertain parameter has the wrong dimension");
  double v = g[0].evaluate(x);
  for (int j = 1; j <= s(); ++j) v += u[static_cast<std::size_t>(j) - 1] * g[static_cast<std::size_t>(j)].evaluate(x);
  return v;
}

void validate(const UncertainConstraint& c, int n) {
  if (c.g.empty()) throw InvalidInput("uncertain constraint needs g^(0)");
  if (c.t < 0 || c.t > c.s()) throw InvalidInput("sign split t must lie in [0, s]");
  if (static_cast<int>(c.a.size()) != c.s() + 1) throw DimensionError("expected A^0..A^s");
  for (const auto& m : c.a) {
    if (m.dim() != c.a.front().dim()) throw DimensionError("uncertainty matrices differ in size");
  }
  for (int j = 0; j <= c.s(); ++j) {
    const Polynomial& p = c.g[static_cast<std::size_t>(j)];
    if (p.num_vars() != n) throw DimensionError("uncertain constraint uses a different variable count");
    if (j > c.t) {
      if (p.degree() > 1) throw InvalidInput("pieces after the sign split must be affine");
    } else if (!certify_piece(p)) {
      throw CertificationError("piece " + std::to_string(j) + " of an uncertain constraint is not SOS-convex");
    }
  }
}

namespace {

std::vector<SymMatrix> embedded_matrices(const UncertainConstraint& c) {
  std::vector<SymMatrix> out;
  for (int j = 0; j <= c.s(); ++j) {
    SymMatrix sign(c.t);
    if (j >= 1 && j <= c.t) sign.at(j - 1, j - 1) = 1.0;
    out.push_back(c.t > 0 ? block_diag(sign, c.a[static_cast<std::size_t>(j)]) : c.a[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace

Spectrahedron embed_uncertainty(const UncertainConstraint& c, const SolverOptions& opts) {
  if (static_cast<int>(c.a.size()) != c.s() + 1) throw DimensionError("expected A^0..A^s");
  return Spectrahedron::from_lmi(embedded_matrices(c), {}, opts);
}

SsaProgram to_ssa_program(const RobustProgram& rp, const SolverOptions& opts) {
  const int n = rp.n();
  if (!certify_piece(rp.objective)) throw CertificationError("robust objective is not SOS-convex");
  SsaProgram prog{SsaFunction::polynomial(rp.objective), {}};
  prog.objective.set_certification({CertificationPolicy::kAffineIndex, true, 1});
  for (const auto& c : rp.constraints) {
    validate(c, n);
    SsaFunction f(n, c.g, embed_uncertainty(c, opts));
    f.set_certification({CertificationPolicy::kSignPattern, true, c.t + 1});
    prog.constraints.push_back(std::move(f));
  }
  return prog;
}

RobustCheck verify_robust(std::span<const double> x, const RobustProgram& rp, int k, std::uint64_t seed,
                          const SolverOptions& opts) {
  RobustCheck out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& c : rp.constraints) {
    const Spectrahedron omega = Spectrahedron::unchecked(embedded_matrices(c));
    auto points = sample_extreme_points(omega, k, rng, opts);
    const std::size_t extreme = points.size();
    for (std::size_t i = 0; i + 1 < extreme; ++i) {
      const auto& p = points[i];
      const auto& q = points[std::uniform_int_distribution<std::size_t>(0, extreme - 1)(rng)];
      const double w = unit(rng);
      std::vector<double> mix(p.size());
      for (std::size_t j = 0; j < p.size(); ++j) mix[j] = w * p[j] + (1.0 - w) * q[j];
      points.push_back(std::move(mix));
    }
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<double> arg;
    for (const auto& u : points) {
      const double v = c.value(x, u);
      if (v > worst) {
        worst = v;
        arg = u;
      }
    }
    out.margins.push_back(worst);
    out.worst_u.push_back(arg);
  }
  return out;
}

}  // namespace sosrelax
