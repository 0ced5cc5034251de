#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sosrelax {

inline constexpr int kMaxVariables = 8;
inline constexpr int kMaxDegree = 10;

// Exponent vector (i_1, ..., i_n) of a monomial x_1^{i_1} ... x_n^{i_n}.
struct MultiIndex {
  std::vector<int> exponents;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {}

  int size() const { return static_cast<int>(exponents.size()); }
  int degree() const;
  int operator[](int k) const { return exponents[static_cast<std::size_t>(k)]; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);

// Number of monomials of degree <= d in n variables, binomial(n + d, d).
// Throws SizeLimitError if the count does not fit in an int.
int basis_size(int n, int d);

// All exponent vectors of total degree <= d, graded by degree and ordered
// within a degree lexicographically with x_1 > x_2 > ... > x_n. Position 0 is
// the constant monomial, positions 1..n are x_1..x_n.
std::vector<MultiIndex> enumerate_basis(int n, int d);

// The graded canonical monomial basis x^(d) of R_d[x_1..x_n]. Instances are
// interned: get() returns the same object for the same (n, d). The basis for
// degree d is a prefix of the basis for any larger degree.
class MonomialBasis {
 public:
  static std::shared_ptr<const MonomialBasis> get(int n, int d);

  int num_vars() const { return n_; }
  int max_degree() const { return d_; }
  int size() const { return static_cast<int>(monomials_.size()); }
  const MultiIndex& operator[](int pos) const {
    return monomials_[static_cast<std::size_t>(pos)];
  }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }

  // Position of a monomial, or -1 when its degree exceeds d.
  int position(const MultiIndex& m) const;

  // x^(d) evaluated at a point.
  std::vector<double> evaluate(std::span<const double> x) const;

 private:
  MonomialBasis(int n, int d);

  int n_;
  int d_;
  std::vector<MultiIndex> monomials_;
  std::map<MultiIndex, int> lookup_;
};

// For the half-degree basis x^(r): every ordered pair (beta, gamma) of
// positions grouped by the position alpha of the product monomial
// x^(r)_beta * x^(r)_gamma in x^(2r). This is the map behind both the Gram
// equations sum_{i(b)+i(g)=i(a)} W_{bg} = f_a and the moment matrix M_r(y).
class PairingIndex {
 public:
  static std::shared_ptr<const PairingIndex> get(int n, int r);

  int num_vars() const { return n_; }
  int half_degree() const { return r_; }
  int half_size() const { return half_size_; }
  int full_size() const { return static_cast<int>(pairs_.size()); }

  // Ordered pairs (beta, gamma) whose product is monomial alpha.
  const std::vector<std::pair<int, int>>& pairs(int alpha) const {
    return pairs_[static_cast<std::size_t>(alpha)];
  }
  // Position alpha of x^(r)_beta * x^(r)_gamma.
  int product(int beta, int gamma) const {
    return product_[static_cast<std::size_t>(beta * half_size_ + gamma)];
  }

 private:
  PairingIndex(int n, int r);

  int n_;
  int r_;
  int half_size_;
  std::vector<std::vector<std::pair<int, int>>> pairs_;
  std::vector<int> product_;
};

struct Term {
  std::vector<int> exps;
  double coef = 0.0;
};

enum class VariableBlock { kX, kY };

// Real polynomial stored densely over x^(d).
class Polynomial {
 public:
  // Zero polynomial in n variables with room for degree d.
  explicit Polynomial(int n, int d = 0);

  // Sparse input; duplicate exponent vectors are summed. The storage degree is
  // the largest term degree (at least min_degree).
  static Polynomial from_terms(int n, std::span<const Term> terms, int min_degree = 0);
  static Polynomial from_coeffs(std::shared_ptr<const MonomialBasis> basis,
                                std::vector<double> coeffs);
  static Polynomial constant(int n, double c);
  // The coordinate polynomial x_k (k is zero based).
  static Polynomial variable(int n, int k);

  int num_vars() const { return basis_->num_vars(); }
  // Degree of the storage basis, an upper bound on degree().
  int storage_degree() const { return basis_->max_degree(); }
  // Largest degree with a nonzero coefficient; 0 for the zero polynomial.
  int degree() const;
  bool is_zero() const;

  const MonomialBasis& basis() const { return *basis_; }
  std::shared_ptr<const MonomialBasis> basis_ptr() const { return basis_; }
  std::span<const double> coeffs() const { return coeffs_; }
  double coeff(int pos) const { return coeffs_[static_cast<std::size_t>(pos)]; }
  double coeff(const MultiIndex& m) const;

  // Same polynomial stored over x^(d); d must be >= degree().
  Polynomial with_storage_degree(int d) const;

  double evaluate(std::span<const double> x) const;
  std::vector<Polynomial> gradient() const;
  Polynomial derivative(int k) const;

  // Embeds f into R^{2n} = (x_1..x_n, y_1..y_n), placing its variables in the
  // chosen block.
  Polynomial lift_to_xy(VariableBlock block) const;

  double coeff_norm() const;
  double max_abs_coeff() const;
  std::vector<Term> terms(double zero_threshold = 1e-12) const;
  std::string to_string(double zero_threshold = 1e-12) const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& f, const Polynomial& g);
  friend Polynomial operator-(const Polynomial& f, const Polynomial& g);
  friend Polynomial operator*(const Polynomial& f, const Polynomial& g);
  friend Polynomial operator*(double a, const Polynomial& f);
  friend Polynomial operator*(const Polynomial& f, double a) { return a * f; }

  // Coefficient-exact equality after padding to a common basis.
  friend bool operator==(const Polynomial& f, const Polynomial& g);

 private:
  Polynomial(std::shared_ptr<const MonomialBasis> basis, std::vector<double> coeffs)
      : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {}

  std::shared_ptr<const MonomialBasis> basis_;
  std::vector<double> coeffs_;
};

Polynomial add(const Polynomial& f, const Polynomial& g);
Polynomial scale(double a, const Polynomial& f);
Polynomial multiply(const Polynomial& f, const Polynomial& g);

}  // namespace sosrelax
