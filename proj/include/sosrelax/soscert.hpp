#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sosrelax/poly.hpp"
#include "sosrelax/sdp.hpp"
#include "sosrelax/sym_matrix.hpp"

namespace sosrelax {

enum class Verdict { kYes, kNo, kUnknown };

std::string to_string(Verdict v);

// f = (x^(l))' W x^(l) restricted to the monomials listed in `positions`
// (positions in x^(l) of n variables).
struct GramCertificate {
  int num_vars = 0;
  int half_degree = 0;
  std::vector<int> positions;
  SymMatrix W;
  // Coefficient norm of f minus the Gram form of W.
  double residual = 0.0;

  // The polynomial (x^(l))' W x^(l).
  Polynomial gram_form() const;
};

struct SosDecomposition {
  std::vector<Polynomial> terms;

  Polynomial sum_of_squares() const;
};

struct SosResult {
  Verdict verdict = Verdict::kUnknown;
  // Largest t with W - t I >= 0 among Gram matrices of f, computed on f
  // normalized to unit max-coefficient.
  double margin = 0.0;
  std::optional<GramCertificate> certificate;
  // For kNo: moments y with M(y) >= 0, Tr M(y) = 1 and L_y(f) < 0, indexed
  // over x^(2l); empty when the answer follows from the degree or support.
  std::vector<double> dual_certificate;
  SdpStatus status = SdpStatus::kOptimal;
  std::string reason;
};

// Margin at or above this value counts as SOS.
inline constexpr double kSosMarginThreshold = -1e-9;

SolverOptions default_sos_options();

SosResult is_sos(const Polynomial& f, const SolverOptions& opts = default_sos_options());

// Gram certificate search on a subset of the half-degree basis; the basis
// positions must be given in increasing order.
SosResult is_sos_on(const Polynomial& f, const std::vector<int>& positions,
                    const SolverOptions& opts = default_sos_options());

// Factors W = sum_j v_j v_j' and returns f_j = v_j' x^(l). Throws
// CertificationError when W has an eigenvalue below -1e-8.
SosDecomposition extract_decomposition(const GramCertificate& cert);

// F(x, y) = f(x) - f(y) - grad f(y)'(x - y) in the 2n variables (x, y).
Polynomial convexity_form(const Polynomial& f);

SosResult is_sos_convex(const Polynomial& f, const SolverOptions& opts = default_sos_options());

}  // namespace sosrelax
