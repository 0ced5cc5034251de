#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sosrelax/poly.hpp"
#include "sosrelax/sdp.hpp"
#include "sosrelax/spectra.hpp"
#include "sosrelax/ssafunc.hpp"
#include "sosrelax/sym_matrix.hpp"

namespace sosrelax {

// g^(0)(x) + sum_j u_j g^(j)(x) <= 0 for every u in
//   U = { u : A^0 + sum_j u_j A^j >= 0, u_1..u_t >= 0 }.
// g^(0)..g^(t) must be SOS-convex and g^(t+1)..g^(s) affine.
struct UncertainConstraint {
  std::vector<Polynomial> g;  // g^(0)..g^(s)
  int t = 0;
  std::vector<SymMatrix> a;   // A^0..A^s

  int s() const { return static_cast<int>(g.size()) - 1; }
  double value(std::span<const double> x, std::span<const double> u) const;
  friend bool operator==(const UncertainConstraint&, const UncertainConstraint&) = default;
};

struct RobustProgram {
  Polynomial objective{1};
  std::vector<UncertainConstraint> constraints;

  int n() const { return objective.num_vars(); }
  friend bool operator==(const RobustProgram&, const RobustProgram&) = default;
};

// Checks the sign pattern and piece types; throws InvalidInput,
// DimensionError or CertificationError.
void validate(const UncertainConstraint& c, int n);

// U as a spectrahedron: blkdiag(0, A^0) + sum_{j<=t} u_j blkdiag(e_j e_j', A^j)
// + sum_{j>t} u_j blkdiag(0, A^j). Throws InvalidInput when U is empty or
// unbounded.
Spectrahedron embed_uncertainty(const UncertainConstraint& c, const SolverOptions& opts = {});

// Objective as a plain polynomial function, constraint i as the supremum of
// g_i over U_i.
SsaProgram to_ssa_program(const RobustProgram& rp, const SolverOptions& opts = {});

struct RobustCheck {
  // largest sampled g_i(x, u) per constraint
  std::vector<double> margins;
  std::vector<std::vector<double>> worst_u;
};

// Samples `k` points of each U_i (extreme points from random linear
// objectives plus random mixtures of them) and reports the worst values.
RobustCheck verify_robust(std::span<const double> x, const RobustProgram& rp, int k = 32, std::uint64_t seed = 1,
                          const SolverOptions& opts = {});

}  // namespace sosrelax
