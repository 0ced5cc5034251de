#include "sosrelax/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

#include "sosrelax/errors.hpp"

namespace sosrelax {

int MultiIndex::degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw DimensionError("multi-index size mismatch");
  MultiIndex c = a;
  for (int k = 0; k < a.size(); ++k) c.exponents[static_cast<std::size_t>(k)] += b[k];
  return c;
}

int basis_size(int n, int d) {
  if (n < 1 || d < 0) throw InvalidInput("basis_size requires n >= 1 and d >= 0");
  // binomial(n + d, d) computed incrementally; every partial product is an
  // exact binomial coefficient, so the division is exact.
  unsigned long long count = 1;
  for (int k = 1; k <= d; ++k) {
    const unsigned long long next = count * static_cast<unsigned long long>(n + k);
    if (next / static_cast<unsigned long long>(n + k) != count) {
      throw SizeLimitError("monomial basis size overflows");
    }
    count = next / static_cast<unsigned long long>(k);
    if (count > static_cast<unsigned long long>(std::numeric_limits<int>::max())) {
      throw SizeLimitError("monomial basis size overflows");
    }
  }
  return static_cast<int>(count);
}

namespace {

// Appends all exponent vectors of exactly `degree` in lexicographic order
// with the first variable most significant.
void append_degree(int n, int degree, int var, std::vector<int>& current,
                   std::vector<MultiIndex>& out) {
  if (var == n - 1) {
    current[static_cast<std::size_t>(var)] = degree;
    out.emplace_back(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[static_cast<std::size_t>(var)] = e;
    append_degree(n, degree - e, var + 1, current, out);
  }
  current[static_cast<std::size_t>(var)] = 0;
}

void check_caps(int n, int d) {
  if (n < 1) throw InvalidInput("polynomials need at least one variable");
  if (d < 0) throw InvalidInput("negative degree");
  if (n > kMaxVariables) {
    throw SizeLimitError("variable count " + std::to_string(n) + " exceeds cap " +
                         std::to_string(kMaxVariables));
  }
  if (d > kMaxDegree) {
    throw SizeLimitError("degree " + std::to_string(d) + " exceeds cap " +
                         std::to_string(kMaxDegree));
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_basis(int n, int d) {
  const int size = basis_size(n, d);
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(size));
  std::vector<int> current(static_cast<std::size_t>(n), 0);
  for (int degree = 0; degree <= d; ++degree) append_degree(n, degree, 0, current, out);
  return out;
}

MonomialBasis::MonomialBasis(int n, int d) : n_(n), d_(d), monomials_(enumerate_basis(n, d)) {
  for (int pos = 0; pos < size(); ++pos) lookup_.emplace(monomials_[static_cast<std::size_t>(pos)], pos);
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(int n, int d) {
  check_caps(n, d);
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, d}];
  if (!slot) slot.reset(new MonomialBasis(n, d));
  return slot;
}

int MonomialBasis::position(const MultiIndex& m) const {
  if (m.size() != n_) throw DimensionError("monomial has wrong variable count");
  auto it = lookup_.find(m);
  return it == lookup_.end() ? -1 : it->second;
}

std::vector<double> MonomialBasis::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionError("point has wrong dimension");
  // powers[k][e] = x_k^e
  std::vector<std::vector<double>> powers(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) {
    auto& p = powers[static_cast<std::size_t>(k)];
    p.resize(static_cast<std::size_t>(d_ + 1));
    p[0] = 1.0;
    for (int e = 1; e <= d_; ++e) p[static_cast<std::size_t>(e)] = p[static_cast<std::size_t>(e - 1)] * x[static_cast<std::size_t>(k)];
  }
  std::vector<double> values(monomials_.size());
  for (std::size_t pos = 0; pos < monomials_.size(); ++pos) {
    double v = 1.0;
    for (int k = 0; k < n_; ++k) v *= powers[static_cast<std::size_t>(k)][static_cast<std::size_t>(monomials_[pos][k])];
    values[pos] = v;
  }
  return values;
}

PairingIndex::PairingIndex(int n, int r) : n_(n), r_(r) {
  auto half = MonomialBasis::get(n, r);
  auto full = MonomialBasis::get(n, 2 * r);
  half_size_ = half->size();
  pairs_.resize(static_cast<std::size_t>(full->size()));
  product_.resize(static_cast<std::size_t>(half_size_ * half_size_));
  for (int b = 0; b < half_size_; ++b) {
    for (int g = 0; g < half_size_; ++g) {
      const int a = full->position((*half)[b] + (*half)[g]);
      pairs_[static_cast<std::size_t>(a)].emplace_back(b, g);
      product_[static_cast<std::size_t>(b * half_size_ + g)] = a;
    }
  }
}

std::shared_ptr<const PairingIndex> PairingIndex::get(int n, int r) {
  check_caps(n, 2 * r);
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const PairingIndex>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, r}];
  if (!slot) slot.reset(new PairingIndex(n, r));
  return slot;
}

// ---------------------------------------------------------------------------

Polynomial::Polynomial(int n, int d) : basis_(MonomialBasis::get(n, d)) {
  coeffs_.assign(static_cast<std::size_t>(basis_->size()), 0.0);
}

Polynomial Polynomial::from_terms(int n, std::span<const Term> terms, int min_degree) {
  int d = min_degree;
  for (const auto& t : terms) {
    if (static_cast<int>(t.exps.size()) != n) {
      throw DimensionError("term has " + std::to_string(t.exps.size()) +
                           " exponents, expected " + std::to_string(n));
    }
    if (std::any_of(t.exps.begin(), t.exps.end(), [](int e) { return e < 0; })) {
      throw InvalidInput("negative exponent");
    }
    if (!std::isfinite(t.coef)) throw InvalidInput("non-finite coefficient");
    d = std::max(d, std::accumulate(t.exps.begin(), t.exps.end(), 0));
  }
  Polynomial p(n, d);
  for (const auto& t : terms) {
    p.coeffs_[static_cast<std::size_t>(p.basis_->position(MultiIndex(t.exps)))] += t.coef;
  }
  return p;
}

Polynomial Polynomial::from_coeffs(std::shared_ptr<const MonomialBasis> basis,
                                   std::vector<double> coeffs) {
  if (static_cast<int>(coeffs.size()) != basis->size()) {
    throw DimensionError("coefficient vector does not match basis size");
  }
  return Polynomial(std::move(basis), std::move(coeffs));
}

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n, 0);
  p.coeffs_[0] = c;
  return p;
}

Polynomial Polynomial::variable(int n, int k) {
  if (k < 0 || k >= n) throw DimensionError("variable index out of range");
  Polynomial p(n, 1);
  p.coeffs_[static_cast<std::size_t>(k + 1)] = 1.0;
  return p;
}

int Polynomial::degree() const {
  for (int pos = basis_->size() - 1; pos >= 0; --pos) {
    if (coeffs_[static_cast<std::size_t>(pos)] != 0.0) return (*basis_)[pos].degree();
  }
  return 0;
}

bool Polynomial::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

double Polynomial::coeff(const MultiIndex& m) const {
  const int pos = basis_->position(m);
  return pos < 0 ? 0.0 : coeffs_[static_cast<std::size_t>(pos)];
}

Polynomial Polynomial::with_storage_degree(int d) const {
  if (d == storage_degree()) return *this;
  if (d < degree()) throw InvalidInput("storage degree below polynomial degree");
  auto basis = MonomialBasis::get(num_vars(), d);
  std::vector<double> c(static_cast<std::size_t>(basis->size()), 0.0);
  // graded order makes the smaller basis a prefix of the larger one
  const std::size_t common = std::min(c.size(), coeffs_.size());
  std::copy_n(coeffs_.begin(), common, c.begin());
  return Polynomial(std::move(basis), std::move(c));
}

double Polynomial::evaluate(std::span<const double> x) const {
  const auto values = basis_->evaluate(x);
  double sum = 0.0;
  for (std::size_t pos = 0; pos < values.size(); ++pos) sum += coeffs_[pos] * values[pos];
  return sum;
}

Polynomial Polynomial::derivative(int k) const {
  const int n = num_vars();
  if (k < 0 || k >= n) throw DimensionError("variable index out of range");
  Polynomial out(n, std::max(0, storage_degree() - 1));
  for (int pos = 0; pos < basis_->size(); ++pos) {
    const double c = coeffs_[static_cast<std::size_t>(pos)];
    const MultiIndex& m = (*basis_)[pos];
    if (c == 0.0 || m[k] == 0) continue;
    MultiIndex lowered = m;
    lowered.exponents[static_cast<std::size_t>(k)] -= 1;
    out.coeffs_[static_cast<std::size_t>(out.basis_->position(lowered))] += c * m[k];
  }
  return out;
}

std::vector<Polynomial> Polynomial::gradient() const {
  std::vector<Polynomial> g;
  g.reserve(static_cast<std::size_t>(num_vars()));
  for (int k = 0; k < num_vars(); ++k) g.push_back(derivative(k));
  return g;
}

Polynomial Polynomial::lift_to_xy(VariableBlock block) const {
  const int n = num_vars();
  Polynomial out(2 * n, storage_degree());
  const int offset = block == VariableBlock::kX ? 0 : n;
  for (int pos = 0; pos < basis_->size(); ++pos) {
    const double c = coeffs_[static_cast<std::size_t>(pos)];
    if (c == 0.0) continue;
    std::vector<int> e(static_cast<std::size_t>(2 * n), 0);
    for (int k = 0; k < n; ++k) e[static_cast<std::size_t>(offset + k)] = (*basis_)[pos][k];
    out.coeffs_[static_cast<std::size_t>(out.basis_->position(MultiIndex(std::move(e))))] = c;
  }
  return out;
}

double Polynomial::coeff_norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return std::sqrt(s);
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

std::vector<Term> Polynomial::terms(double zero_threshold) const {
  std::vector<Term> out;
  for (int pos = 0; pos < basis_->size(); ++pos) {
    const double c = coeffs_[static_cast<std::size_t>(pos)];
    if (std::abs(c) > zero_threshold) out.push_back({(*basis_)[pos].exponents, c});
  }
  return out;
}

std::string Polynomial::to_string(double zero_threshold) const {
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& t : terms(zero_threshold)) {
    double c = t.coef;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    c = std::abs(c);
    const bool constant = std::all_of(t.exps.begin(), t.exps.end(), [](int e) { return e == 0; });
    bool need_star = false;
    if (constant || c != 1.0) {
      os << c;
      need_star = true;
    }
    for (std::size_t k = 0; k < t.exps.size(); ++k) {
      if (t.exps[k] == 0) continue;
      if (need_star) os << "*";
      os << "x" << k + 1;
      if (t.exps[k] > 1) os << "^" << t.exps[k];
      need_star = true;
    }
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

namespace {

void check_same_vars(const Polynomial& f, const Polynomial& g) {
  if (f.num_vars() != g.num_vars()) {
    throw DimensionError("polynomials have different variable counts (" +
                         std::to_string(f.num_vars()) + " vs " + std::to_string(g.num_vars()) + ")");
  }
}

}  // namespace

Polynomial Polynomial::operator-() const { return -1.0 * *this; }

Polynomial operator+(const Polynomial& f, const Polynomial& g) {
  check_same_vars(f, g);
  const int d = std::max(f.storage_degree(), g.storage_degree());
  Polynomial out = f.with_storage_degree(d);
  for (std::size_t pos = 0; pos < g.coeffs_.size(); ++pos) out.coeffs_[pos] += g.coeffs_[pos];
  return out;
}

Polynomial operator-(const Polynomial& f, const Polynomial& g) { return f + (-1.0) * g; }

Polynomial operator*(double a, const Polynomial& f) {
  Polynomial out = f;
  for (double& c : out.coeffs_) c *= a;
  return out;
}

Polynomial operator*(const Polynomial& f, const Polynomial& g) {
  check_same_vars(f, g);
  const int d = f.degree() + g.degree();
  Polynomial out(f.num_vars(), d);
  const auto& bf = f.basis();
  const auto& bg = g.basis();
  for (int i = 0; i < bf.size(); ++i) {
    const double fi = f.coeffs_[static_cast<std::size_t>(i)];
    if (fi == 0.0) continue;
    for (int j = 0; j < bg.size(); ++j) {
      const double gj = g.coeffs_[static_cast<std::size_t>(j)];
      if (gj == 0.0) continue;
      out.coeffs_[static_cast<std::size_t>(out.basis_->position(bf[i] + bg[j]))] += fi * gj;
    }
  }
  return out;
}

bool operator==(const Polynomial& f, const Polynomial& g) {
  if (f.num_vars() != g.num_vars()) return false;
  const int d = std::max(f.storage_degree(), g.storage_degree());
  const auto a = f.with_storage_degree(d);
  const auto b = g.with_storage_degree(d);
  return a.coeffs_ == b.coeffs_;
}

Polynomial add(const Polynomial& f, const Polynomial& g) { return f + g; }
Polynomial scale(double a, const Polynomial& f) { return a * f; }
Polynomial multiply(const Polynomial& f, const Polynomial& g) { return f * g; }

}  // namespace sosrelax
