#include "sosrelax/ssafunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sosrelax/errors.hpp"
#include "sosrelax/soscert.hpp"

namespace sosrelax {

std::string to_string(CertificationPolicy p) {
  switch (p) {
    case CertificationPolicy::kNone: return "none";
    case CertificationPolicy::kAffineIndex: return "affine_index";
    case CertificationPolicy::kVertices: return "simplex_vertices";
    case CertificationPolicy::kSampled: return "sampled_extreme_points";
    case CertificationPolicy::kSignPattern: return "sign_pattern";
    case CertificationPolicy::kCombined: return "combined";
  }
  return "none";
}

namespace {

int even_up(int d) { return d % 2 == 0 ? d : d + 1; }

}  // namespace

SsaFunction::SsaFunction(int n, std::vector<Polynomial> h, Spectrahedron omega, int degree)
    : n_(n), h_(std::move(h)), omega_(std::move(omega)) {
  if (n < 1) throw InvalidInput("function needs at least one variable");
  if (static_cast<int>(h_.size()) != omega_.m() + 1) {
    throw DimensionError("expected h_0..h_m with m the dimension of the index set");
  }
  int dmax = 0;
  for (const auto& p : h_) {
    if (p.num_vars() != n) throw DimensionError("polynomial piece has the wrong number of variables");
    dmax = std::max(dmax, p.degree());
  }
  if (degree < 0) {
    degree_ = even_up(dmax);
  } else {
    if (degree % 2 != 0) throw InvalidInput("declared degree must be even");
    if (degree < dmax) throw InvalidInput("declared degree is below the degree of a piece");
    degree_ = degree;
  }
  if (degree_ > kMaxDegree) throw SizeLimitError("degree exceeds the cap of 10");
}

SsaFunction SsaFunction::polynomial(const Polynomial& f) {
  return SsaFunction(f.num_vars(), {f}, Spectrahedron::point({}));
}

Polynomial SsaFunction::combination(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != m()) throw DimensionError("index point has the wrong dimension");
  Polynomial p = h_.front();
  for (int j = 0; j < m(); ++j) p = p + y[static_cast<std::size_t>(j)] * h_[static_cast<std::size_t>(j) + 1];
  return p;
}

EvalResult eval_detailed(const SsaFunction& f, std::span<const double> x, const SolverOptions& opts) {
  if (static_cast<int>(x.size()) != f.n()) throw DimensionError("point has the wrong dimension");
  EvalResult r;
  r.value = f.h().front().evaluate(x);
  if (f.m() == 0) return r;
  std::vector<double> c;
  for (int j = 1; j <= f.m(); ++j) c.push_back(f.h()[static_cast<std::size_t>(j)].evaluate(x));
  const auto lm = maximize_linear(f.omega(), c, opts);
  r.value += lm.value;
  r.y = lm.y;
  return r;
}

double eval(const SsaFunction& f, std::span<const double> x, const SolverOptions& opts) {
  return eval_detailed(f, x, opts).value;
}

std::vector<double> subgradient(const SsaFunction& f, std::span<const double> x, const SolverOptions& opts) {
  const auto r = eval_detailed(f, x, opts);
  const Polynomial p = f.m() == 0 ? f.h().front() : f.combination(r.y);
  std::vector<double> g;
  for (const auto& d : p.gradient()) g.push_back(d.evaluate(x));
  return g;
}

bool certify_piece(const Polynomial& p) {
  const int deg = p.degree();
  if (deg <= 1) return true;
  if (deg == 2) {
    // SOS-convex quadratics are exactly the convex ones
    const int n = p.num_vars();
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i) {
      const Polynomial di = p.derivative(i);
      for (int j = 0; j < n; ++j) H(i, j) = di.derivative(j).coeff(0);
    }
    return min_eig(H) >= -1e-9 * std::max(1.0, H.cwiseAbs().maxCoeff());
  }
  return is_sos_convex(p).verdict == Verdict::kYes;
}

Certification certify(const SsaFunction& f, int samples, std::uint64_t seed, const SolverOptions& opts) {
  Certification c;
  const bool affine_index = std::all_of(f.h().begin() + 1, f.h().end(), [](const Polynomial& p) { return p.degree() <= 1; });
  if (affine_index) {
    c.policy = CertificationPolicy::kAffineIndex;
    c.combinations_checked = 1;
    c.certified = certify_piece(f.h().front());
    return c;
  }
  if (f.omega() == Spectrahedron::simplex(f.m())) {
    c.policy = CertificationPolicy::kVertices;
    c.certified = true;
    for (int j = 0; j < f.m() && c.certified; ++j) {
      std::vector<double> y(static_cast<std::size_t>(f.m()), 0.0);
      y[static_cast<std::size_t>(j)] = 1.0;
      c.certified = certify_piece(f.combination(y));
      ++c.combinations_checked;
    }
    return c;
  }
  c.policy = CertificationPolicy::kSampled;
  c.certified = true;
  std::mt19937_64 rng(seed);
  for (const auto& y : sample_extreme_points(f.omega(), samples, rng, opts)) {
    ++c.combinations_checked;
    if (!certify_piece(f.combination(y))) {
      c.certified = false;
      break;
    }
  }
  return c;
}

SsaFunction from_max_of_polys(const std::vector<Polynomial>& pieces) {
  if (pieces.empty()) throw InvalidInput("max of an empty list");
  const int n = pieces.front().num_vars();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!certify_piece(pieces[i])) throw CertificationError("piece " + std::to_string(i) + " is not SOS-convex");
  }
  std::vector<Polynomial> h{Polynomial(n)};
  h.insert(h.end(), pieces.begin(), pieces.end());
  SsaFunction f(n, std::move(h), Spectrahedron::simplex(static_cast<int>(pieces.size())));
  f.set_certification({CertificationPolicy::kVertices, true, static_cast<int>(pieces.size())});
  return f;
}

namespace {

SsaFunction linear_over(int n, Spectrahedron omega) {
  std::vector<Polynomial> h{Polynomial(n)};
  for (int k = 0; k < n; ++k) h.push_back(Polynomial::variable(n, k));
  SsaFunction f(n, std::move(h), std::move(omega));
  f.set_certification({CertificationPolicy::kAffineIndex, true, 1});
  return f;
}

}  // namespace

SsaFunction euclidean_norm(int n) { return linear_over(n, Spectrahedron::l2_ball(n)); }

SsaFunction lambda_max(int k) {
  const int n = packed_size(k);
  return linear_over(n, Spectrahedron::psd_trace_one(k));
}

SsaFunction l1_norm(int n) {
  if (n < 1) throw InvalidInput("l1 norm needs at least one variable");
  std::optional<SsaFunction> acc;
  for (int k = 0; k < n; ++k) {
    const Polynomial xk = Polynomial::variable(n, k);
    SsaFunction abs_k(n, {Polynomial(n), xk, -xk}, Spectrahedron::simplex(2));
    abs_k.set_certification({CertificationPolicy::kAffineIndex, true, 1});
    acc = acc ? add(*acc, abs_k) : abs_k;
  }
  return *acc;
}

SsaFunction add(const SsaFunction& f, const SsaFunction& g) {
  if (f.n() != g.n()) throw DimensionError("adding functions of different variable counts");
  std::vector<Polynomial> h{f.h().front() + g.h().front()};
  h.insert(h.end(), f.h().begin() + 1, f.h().end());
  h.insert(h.end(), g.h().begin() + 1, g.h().end());
  const Spectrahedron omega = (f.m() == 0 && f.omega().t() == 0) ? g.omega()
                              : (g.m() == 0 && g.omega().t() == 0) ? f.omega()
                                                                   : product(f.omega(), g.omega());
  SsaFunction s(f.n(), std::move(h), omega, std::max(f.degree(), g.degree()));
  const auto& cf = f.certification();
  const auto& cg = g.certification();
  // an unchecked part leaves the sum unchecked so certify() can run on it
  if (cf.policy != CertificationPolicy::kNone && cg.policy != CertificationPolicy::kNone) {
    s.set_certification({CertificationPolicy::kCombined, cf.certified && cg.certified,
                         cf.combinations_checked + cg.combinations_checked});
  }
  return s;
}

SsaFunction scale(double c, const SsaFunction& f) {
  if (!(c >= 0.0)) throw InvalidInput("functions can only be scaled by nonnegative factors");
  std::vector<Polynomial> h;
  for (const auto& p : f.h()) h.push_back(c * p);
  SsaFunction s(f.n(), std::move(h), f.omega(), f.degree());
  s.set_certification(f.certification());
  return s;
}

namespace {

Polynomial squared_residual(const std::vector<std::vector<double>>& a, const std::vector<double>& b) {
  if (a.empty() || a.size() != b.size()) throw DimensionError("A and b have inconsistent sizes");
  const int n = static_cast<int>(a.front().size());
  Polynomial sum(n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (static_cast<int>(a[i].size()) != n) throw DimensionError("rows of A differ in length");
    Polynomial r = Polynomial::constant(n, -b[i]);
    for (int k = 0; k < n; ++k) r = r + a[i][static_cast<std::size_t>(k)] * Polynomial::variable(n, k);
    sum = sum + r * r;
  }
  return sum;
}

}  // namespace

SsaFunction least_squares_l1(const std::vector<std::vector<double>>& a, const std::vector<double>& b, double mu) {
  if (!(mu > 0.0)) throw InvalidInput("regularization weight must be positive");
  const Polynomial ls = squared_residual(a, b);
  SsaFunction f = SsaFunction::polynomial(ls);
  f.set_certification({CertificationPolicy::kAffineIndex, true, 1});
  return add(f, scale(mu, l1_norm(ls.num_vars())));
}

SsaFunction least_squares_elastic(const std::vector<std::vector<double>>& a, const std::vector<double>& b, double mu1,
                                  double mu2) {
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw InvalidInput("regularization weights must be positive");
  const int n = static_cast<int>(a.front().size());
  Polynomial ridge(n);
  for (int k = 0; k < n; ++k) ridge = ridge + mu2 * Polynomial::variable(n, k) * Polynomial::variable(n, k);
  SsaFunction f = SsaFunction::polynomial(squared_residual(a, b) + ridge);
  f.set_certification({CertificationPolicy::kAffineIndex, true, 1});
  return add(f, scale(mu1, l1_norm(n)));
}

int SsaProgram::degree() const {
  int d = std::max(2, objective.degree());
  for (const auto& c : constraints) d = std::max(d, c.degree());
  return d;
}

void SsaProgram::validate() const {
  for (const auto& c : constraints) {
    if (c.n() != objective.n()) throw DimensionError("constraint has a different variable count than the objective");
  }
  if (degree() > kMaxDegree) throw SizeLimitError("program degree exceeds the cap of 10");
}

std::optional<SlaterWitness> find_slater(const SsaProgram& prog, std::optional<std::vector<double>> hint,
                                         const SolverOptions& opts) {
  const int n = prog.n();
  auto margins_at = [&](const std::vector<double>& x) {
    std::vector<double> m;
    for (const auto& c : prog.constraints) m.push_back(eval(c, x, opts));
    return m;
  };
  auto accepted = [](const std::vector<double>& m) {
    return std::all_of(m.begin(), m.end(), [](double v) { return v < -1e-8; });
  };
  std::vector<std::vector<double>> starts;
  if (hint) {
    if (static_cast<int>(hint->size()) != n) throw DimensionError("Slater hint has the wrong dimension");
    starts.push_back(*hint);
  }
  starts.emplace_back(static_cast<std::size_t>(n), 0.0);
  for (const auto& x : starts) {
    auto m = margins_at(x);
    if (accepted(m)) return SlaterWitness{x, m};
  }
  // subgradient descent on max_i f_i, step 1/k along the normalized subgradient
  std::vector<double> x = starts.front();
  for (int k = 1; k <= 100; ++k) {
    const auto m = margins_at(x);
    if (accepted(m)) return SlaterWitness{x, m};
    const auto worst = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
    const auto g = subgradient(prog.constraints[worst], x, opts);
    double norm = 0.0;
    for (double v : g) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] -= g[static_cast<std::size_t>(i)] / (norm * k);
  }
  const auto m = margins_at(x);
  if (accepted(m)) return SlaterWitness{x, m};
  return std::nullopt;
}

}  // namespace sosrelax
