#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sosrelax/poly.hpp"
#include "sosrelax/sdp.hpp"
#include "sosrelax/spectra.hpp"

namespace sosrelax {

// How SOS-convexity of h_0 + sum y_j h_j over Omega was established.
enum class CertificationPolicy {
  kNone,         // not checked
  kAffineIndex,  // h_1..h_m affine, only h_0 needs certifying
  kVertices,     // Omega is a simplex and every vertex combination is certified
  kSampled,      // combinations at sampled extreme points of Omega
  kSignPattern,  // nonnegative weights on certified pieces, affine remainder
  kCombined,     // sum of functions certified under their own policies
};

std::string to_string(CertificationPolicy p);

struct Certification {
  CertificationPolicy policy = CertificationPolicy::kNone;
  bool certified = false;
  int combinations_checked = 0;
};

// f(x) = sup_{y in Omega} h_0(x) + sum_j y_j h_j(x).
class SsaFunction {
 public:
  // `h` holds h_0..h_m with m = omega.m(); `degree` < 0 uses the largest
  // degree among h rounded up to even.
  SsaFunction(int n, std::vector<Polynomial> h, Spectrahedron omega, int degree = -1);

  static SsaFunction polynomial(const Polynomial& f);

  int n() const { return n_; }
  int m() const { return omega_.m(); }
  // declared even degree d
  int degree() const { return degree_; }
  const std::vector<Polynomial>& h() const { return h_; }
  const Spectrahedron& omega() const { return omega_; }
  const Certification& certification() const { return cert_; }
  void set_certification(Certification c) { cert_ = c; }

  // h_0 + sum y_j h_j
  Polynomial combination(std::span<const double> y) const;

 private:
  int n_;
  std::vector<Polynomial> h_;
  Spectrahedron omega_;
  int degree_;
  Certification cert_;
};

struct EvalResult {
  double value = 0.0;
  std::vector<double> y;  // maximizing index
};

EvalResult eval_detailed(const SsaFunction& f, std::span<const double> x, const SolverOptions& opts = {});
double eval(const SsaFunction& f, std::span<const double> x, const SolverOptions& opts = {});

// Subgradient of f at x: grad h_0(x) + sum y*_j grad h_j(x).
std::vector<double> subgradient(const SsaFunction& f, std::span<const double> x, const SolverOptions& opts = {});

// True when p is certified SOS-convex (affine pieces and convex quadratics
// are decided directly, higher degrees through is_sos_convex).
bool certify_piece(const Polynomial& p);

// Certifies f under the policy suited to its data and records the result.
// `samples` extreme points are used when sampling is needed.
Certification certify(const SsaFunction& f, int samples = 8, std::uint64_t seed = 1, const SolverOptions& opts = {});

// max of SOS-convex polynomials over the simplex; throws CertificationError
// when a piece fails.
SsaFunction from_max_of_polys(const std::vector<Polynomial>& pieces);
SsaFunction euclidean_norm(int n);
SsaFunction l1_norm(int n);
// lambda_max of X in S^k with x = svec(X) (k(k+1)/2 variables, off-diagonal
// entries scaled by sqrt 2).
SsaFunction lambda_max(int k);
SsaFunction add(const SsaFunction& f, const SsaFunction& g);
// c f for c >= 0.
SsaFunction scale(double c, const SsaFunction& f);
// ||A x - b||^2 + mu ||x||_1; A is given row-major with rows of length n.
SsaFunction least_squares_l1(const std::vector<std::vector<double>>& a, const std::vector<double>& b, double mu);
// ||A x - b||^2 + mu1 ||x||_1 + mu2 ||x||^2
SsaFunction least_squares_elastic(const std::vector<std::vector<double>>& a, const std::vector<double>& b, double mu1,
                                  double mu2);

// min f_0(x) subject to f_i(x) <= 0.
struct SsaProgram {
  SsaFunction objective;
  std::vector<SsaFunction> constraints;

  int n() const { return objective.n(); }
  // common even degree d
  int degree() const;
  void validate() const;
};

struct SlaterWitness {
  std::vector<double> x0;
  std::vector<double> margins;
};

// Looks for x0 with f_i(x0) < -1e-8 for every constraint: tries the hint,
// the origin, then 100 subgradient steps on max_i f_i.
std::optional<SlaterWitness> find_slater(const SsaProgram& prog, std::optional<std::vector<double>> hint = std::nullopt,
                                         const SolverOptions& opts = {});

}  // namespace sosrelax
