#pragma once

#include <random>
#include <span>
#include <vector>

#include "sosrelax/sdp.hpp"
#include "sosrelax/sdp_builder.hpp"
#include "sosrelax/sym_matrix.hpp"

namespace sosrelax {

// Omega = { y in R^m : exists z in R^p, A_0 + sum_j y_j A_j + sum_l z_l B_l >= 0 }.
class Spectrahedron {
 public:
  // Validates that the set is nonempty and bounded in y; throws InvalidInput
  // otherwise. `a` holds A_0..A_m.
  static Spectrahedron from_lmi(std::vector<SymMatrix> a, std::vector<SymMatrix> b = {},
                                const SolverOptions& opts = {});
  // Same data without the nonemptiness and boundedness checks.
  static Spectrahedron unchecked(std::vector<SymMatrix> a, std::vector<SymMatrix> b = {});

  // Built-in sets. Their nonemptiness and boundedness hold by construction.
  // Unit simplex {y >= 0, sum y = 1}: diag(y, 1 - sum y, sum y - 1).
  static Spectrahedron simplex(int m);
  // Unit Euclidean ball via the arrow matrix [[I, y], [y', 1]].
  static Spectrahedron l2_ball(int m);
  // Box lo <= y <= hi: diag(y - lo, hi - y).
  static Spectrahedron box(std::span<const double> lo, std::span<const double> hi);
  // {Y in S^k : Y >= 0, Tr Y = 1} in the coordinates y = svec(Y) (packed
  // lower triangle, off-diagonal entries scaled by sqrt 2), so that
  // Tr(X Y) = svec(X)' y.
  static Spectrahedron psd_trace_one(int k);
  // The singleton {ybar}; with ybar empty, the zero-dimensional set used by
  // plain polynomials.
  static Spectrahedron point(std::span<const double> ybar);

  int m() const { return static_cast<int>(a_.size()) - 1; }
  int p() const { return static_cast<int>(b_.size()); }
  int t() const { return a_.front().dim(); }
  const std::vector<SymMatrix>& a() const { return a_; }
  const std::vector<SymMatrix>& b() const { return b_; }
  const LmiStructure& structure() const { return structure_; }

  // A_0 + sum y_j A_j + sum z_l B_l.
  SymMatrix pencil(std::span<const double> y, std::span<const double> z = {}) const;

  friend bool operator==(const Spectrahedron& x, const Spectrahedron& y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }

 private:
  Spectrahedron(std::vector<SymMatrix> a, std::vector<SymMatrix> b);

  std::vector<SymMatrix> a_;
  std::vector<SymMatrix> b_;
  LmiStructure structure_;
};

// Convert svec coordinates to a symmetric matrix and back.
std::vector<double> svec(const SymMatrix& x);
SymMatrix smat(std::span<const double> v, int k);

struct Membership {
  bool contained = false;
  // Largest t with pencil(y, z) - t I >= 0 over witnesses z.
  double margin = 0.0;
  std::vector<double> z;
};

Membership contains(const Spectrahedron& omega, std::span<const double> y, const SolverOptions& opts = {});

struct LinearMax {
  double value = 0.0;
  std::vector<double> y;
  std::vector<double> z;
  // Multiplier of the LMI: Z >= 0 with Tr(Z A_j) = -c_j, Tr(Z B_l) = 0 and
  // value = Tr(Z A_0).
  SymMatrix dual;
};

// max c'y over Omega. Throws SolverFailure if the solve does not reach an
// optimal status.
LinearMax maximize_linear(const Spectrahedron& omega, std::span<const double> c, const SolverOptions& opts = {});

struct BoundednessResult {
  bool bounded = true;
  // recession direction in y when unbounded
  std::vector<double> direction;
  // coordinate ranges when bounded
  std::vector<double> lo, hi;
};

BoundednessResult assert_bounded(const Spectrahedron& omega, const SolverOptions& opts = {});

Spectrahedron product(const Spectrahedron& x, const Spectrahedron& y);

struct InteriorMargin {
  // max t with the pencil minus t I PSD outside pinned pairs (capped at 1)
  double margin = 0.0;
  bool strict = false;
  std::vector<double> y, z;
};

// Strict feasibility of the LMI. Pinned pairs encode equalities that can
// never hold strictly; they are kept as equalities and the margin is
// measured on the remaining components.
InteriorMargin interior_margin(const Spectrahedron& omega, const SolverOptions& opts = {});

// Points of Omega from maximize_linear along random directions.
std::vector<std::vector<double>> sample_extreme_points(const Spectrahedron& omega, int count, std::mt19937_64& rng,
                                                       const SolverOptions& opts = {});

}  // namespace sosrelax
