#include "sosrelax/soscert.hpp"

#include <algorithm>
#include <cmath>

#include "sosrelax/errors.hpp"
#include "sosrelax/sdp_builder.hpp"

namespace sosrelax {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kYes: return "yes";
    case Verdict::kNo: return "no";
    case Verdict::kUnknown: return "unknown";
  }
  return "unknown";
}

SolverOptions default_sos_options() {
  SolverOptions o;
  // the margin sits exactly at zero for many certificates
  o.abs_gap_tol = 1e-11;
  return o;
}

Polynomial GramCertificate::gram_form() const {
  const auto pairing = PairingIndex::get(num_vars, half_degree);
  std::vector<double> c(static_cast<std::size_t>(pairing->full_size()), 0.0);
  const int k = static_cast<int>(positions.size());
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      c[static_cast<std::size_t>(pairing->product(positions[static_cast<std::size_t>(a)], positions[static_cast<std::size_t>(b)]))] += W(a, b);
    }
  }
  return Polynomial::from_coeffs(MonomialBasis::get(num_vars, 2 * half_degree), std::move(c));
}

Polynomial SosDecomposition::sum_of_squares() const {
  if (terms.empty()) return Polynomial(1);
  Polynomial s(terms.front().num_vars());
  for (const auto& t : terms) s = s + t * t;
  return s;
}

namespace {

SosResult trivially(Verdict v, std::string reason) {
  SosResult r;
  r.verdict = v;
  r.reason = std::move(reason);
  return r;
}

}  // namespace

SosResult is_sos_on(const Polynomial& f, const std::vector<int>& positions, const SolverOptions& opts) {
  const int n = f.num_vars();
  const int deg = f.degree();
  if (deg % 2 != 0) return trivially(Verdict::kNo, "odd degree");
  const int l = deg / 2;
  const auto pairing = PairingIndex::get(n, l);
  const int full = pairing->full_size();
  const Polynomial g = f.with_storage_degree(2 * l);
  const double scale = std::max(g.max_abs_coeff(), 1e-300);

  const int k = static_cast<int>(positions.size());
  std::vector<int> slot(static_cast<std::size_t>(pairing->half_size()), -1);
  for (int a = 0; a < k; ++a) {
    const int p = positions[static_cast<std::size_t>(a)];
    if (p < 0 || p >= pairing->half_size()) throw InvalidInput("Gram basis position out of range");
    slot[static_cast<std::size_t>(p)] = a;
  }

  if (f.is_zero()) {
    SosResult r;
    r.verdict = Verdict::kYes;
    r.certificate = GramCertificate{n, l, positions, SymMatrix(k), 0.0};
    r.reason = "zero polynomial";
    return r;
  }

  // maximize t subject to Gram(V + t I) = f / scale, V >= 0
  SdpBuilder sb;
  const int V = sb.add_psd(std::max(k, 1));
  const int t = sb.add_free();
  for (int alpha = 0; alpha < full; ++alpha) {
    LinExpr row;
    bool any = false;
    for (const auto& [b, c] : pairing->pairs(alpha)) {
      const int sb_ = slot[static_cast<std::size_t>(b)];
      const int sc = slot[static_cast<std::size_t>(c)];
      if (sb_ < 0 || sc < 0) continue;
      any = true;
      row.add(sb.entry(V, std::max(sb_, sc), std::min(sb_, sc)), 1.0);
      if (sb_ == sc) row.add(t, 1.0);
    }
    const double fa = g.coeff(alpha) / scale;
    if (!any) {
      if (fa != 0.0) return trivially(Verdict::kNo, "a monomial of f lies outside the Gram support");
      continue;
    }
    sb.add_equality(row, fa);
  }
  sb.set_objective(ObjectiveSense::kMaximize, LinExpr(t, 1.0));
  const SdpProblem prob = sb.build();
  const SdpSolution sol = solve(prob, opts);

  SosResult r;
  r.status = sol.status;
  if (sol.status != SdpStatus::kOptimal) {
    r.verdict = Verdict::kUnknown;
    r.reason = "solver status " + to_string(sol.status);
    return r;
  }
  const double tstar = sb.value(sol, t);
  r.margin = tstar;
  if (tstar >= kSosMarginThreshold) {
    SymMatrix W(k);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b <= a; ++b) W.at(a, b) = scale * (sb.value(sol, sb.entry(V, a, b)) + (a == b ? tstar : 0.0));
    }
    GramCertificate cert{n, l, positions, W, 0.0};
    cert.residual = (g - cert.gram_form()).coeff_norm();
    r.verdict = Verdict::kYes;
    r.certificate = std::move(cert);
    return r;
  }

  // Negative margin: the equality multipliers form a moment vector y with
  // M(y) >= 0, Tr M(y) = 1 and L_y(f) = t* < 0. Accept only if it checks out.
  std::vector<double> y(static_cast<std::size_t>(full), 0.0);
  std::size_t row = 0;
  for (int alpha = 0; alpha < full; ++alpha) {
    bool any = false;
    for (const auto& [b, c] : pairing->pairs(alpha)) {
      if (slot[static_cast<std::size_t>(b)] >= 0 && slot[static_cast<std::size_t>(c)] >= 0) any = true;
    }
    if (any) y[static_cast<std::size_t>(alpha)] = sol.eq_multipliers[row++];
  }
  SymMatrix M(k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b <= a; ++b) {
      M.at(a, b) = y[static_cast<std::size_t>(pairing->product(positions[static_cast<std::size_t>(a)], positions[static_cast<std::size_t>(b)]))];
    }
  }
  double trace = 0.0;
  for (int a = 0; a < k; ++a) trace += M(a, a);
  double ly = 0.0;
  for (int alpha = 0; alpha < full; ++alpha) ly += y[static_cast<std::size_t>(alpha)] * g.coeff(alpha) / scale;
  const double meig = k > 0 ? min_eig(M) : 0.0;
  if (meig >= -1e-8 && std::abs(trace - 1.0) <= 1e-6 && ly < -1e-9) {
    r.verdict = Verdict::kNo;
    r.dual_certificate = std::move(y);
    r.reason = "moment certificate";
  } else {
    r.verdict = Verdict::kUnknown;
    r.reason = "negative margin without a verified certificate";
  }
  return r;
}

SosResult is_sos(const Polynomial& f, const SolverOptions& opts) {
  const int deg = f.degree();
  if (deg % 2 != 0) return trivially(Verdict::kNo, "odd degree");
  std::vector<int> positions(static_cast<std::size_t>(basis_size(f.num_vars(), deg / 2)));
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i);
  return is_sos_on(f, positions, opts);
}

SosDecomposition extract_decomposition(const GramCertificate& cert) {
  const int k = cert.W.dim();
  SosDecomposition d;
  if (k == 0) return d;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.W.to_dense());
  const auto& ev = es.eigenvalues();
  if (ev(0) < -1e-8) throw CertificationError("Gram matrix is indefinite");
  const double cutoff = 1e-12 * std::max(1.0, ev(k - 1));
  const auto basis = MonomialBasis::get(cert.num_vars, cert.half_degree);
  for (int i = k - 1; i >= 0; --i) {
    if (ev(i) <= cutoff) continue;
    std::vector<double> c(static_cast<std::size_t>(basis->size()), 0.0);
    const double s = std::sqrt(ev(i));
    for (int a = 0; a < k; ++a) c[static_cast<std::size_t>(cert.positions[static_cast<std::size_t>(a)])] = s * es.eigenvectors()(a, i);
    d.terms.push_back(Polynomial::from_coeffs(basis, std::move(c)));
  }
  return d;
}

Polynomial convexity_form(const Polynomial& f) {
  const int n = f.num_vars();
  Polynomial F = f.lift_to_xy(VariableBlock::kX) - f.lift_to_xy(VariableBlock::kY);
  const auto grad = f.gradient();
  for (int k = 0; k < n; ++k) {
    const Polynomial diff = Polynomial::variable(2 * n, k) - Polynomial::variable(2 * n, n + k);
    F = F - grad[static_cast<std::size_t>(k)].lift_to_xy(VariableBlock::kY) * diff;
  }
  return F;
}

SosResult is_sos_convex(const Polynomial& f, const SolverOptions& opts) {
  const int deg = f.degree();
  if (deg <= 1) {
    SosResult r;
    r.verdict = Verdict::kYes;
    r.reason = "affine";
    return r;
  }
  if (deg % 2 != 0) return trivially(Verdict::kNo, "odd degree");
  const int n = f.num_vars();
  if (2 * n > kMaxVariables) throw SizeLimitError("SOS-convexity check needs 2n <= 8 variables");
  const Polynomial F = convexity_form(f);
  // F has no terms of degree below 2, so the constant monomial is dropped
  std::vector<int> positions;
  for (int p = 1; p < basis_size(2 * n, deg / 2); ++p) positions.push_back(p);
  return is_sos_on(F, positions, opts);
}

}  // namespace sosrelax
