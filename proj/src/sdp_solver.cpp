// Homogeneous self-dual primal-dual interior-point method for
//
//   minimize c'x  subject to  G x + s = h,  A x = b,  s in K,
//
// where K is a product of a nonnegative orthant and PSD cones (stored as
// scaled lower triangles, "svec"). An SdpProblem is mapped onto this form with
// every scalarized variable free in x: cone variables are tied to their slack
// by G = -I (-sqrt(2) on off-diagonal entries) and inequality rows become
// orthant slacks. Search directions use Nesterov-Todd scaling and a Mehrotra
// predictor-corrector; the Schur complement left after eliminating the
// cone-tied variables is factored densely.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "sosrelax/errors.hpp"
#include "sosrelax/sdp.hpp"

namespace sosrelax {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

const double kSqrt2 = std::sqrt(2.0);

// Converts between a dense symmetric matrix and its svec (packed lower
// triangle with off-diagonal entries scaled by sqrt 2).
Vec svec(const Mat& u) {
  const int t = static_cast<int>(u.rows());
  Vec v(packed_size(t));
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j <= i; ++j) v(packed_index(i, j)) = (i == j) ? u(i, i) : kSqrt2 * 0.5 * (u(i, j) + u(j, i));
  }
  return v;
}

Mat smat(const Eigen::Ref<const Vec>& v, int t) {
  Mat u(t, t);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double e = (i == j) ? v(packed_index(i, j)) : v(packed_index(i, j)) / kSqrt2;
      u(i, j) = e;
      u(j, i) = e;
    }
  }
  return u;
}

// Problem data in the internal standard form.
struct StandardForm {
  int nx = 0;    // columns of A and G
  int neq = 0;   // rows of A
  int nnonneg = 0;
  int nineq = 0;
  int nlin = 0;  // orthant part of K: nonneg variables then inequality slacks
  std::vector<int> psd_dims;
  std::vector<int> psd_xoff;  // first x column of each PSD block
  std::vector<int> psd_koff;  // first cone entry of each PSD block
  int kdim = 0;
  int nonneg_xoff = 0;

  Vec c;
  Mat A;
  Vec b;
  Mat Gineq;  // inequality rows in <= form
  Vec h;      // zero except on inequality slacks
  double sign = 1.0;
  std::vector<double> row_sign;  // +1 for <= rows, -1 for >= rows

  int degree() const {
    int nu = nlin;
    for (int t : psd_dims) nu += t;
    return nu;
  }
};

StandardForm standardize(const SdpProblem& p) {
  StandardForm sf;
  const ConeSpec& cone = p.cone;
  sf.nx = cone.var_count();
  sf.neq = static_cast<int>(p.equalities.size());
  sf.nnonneg = cone.nonneg_count;
  sf.nineq = static_cast<int>(p.inequalities.size());
  sf.nlin = sf.nnonneg + sf.nineq;
  sf.nonneg_xoff = cone.nonneg_offset();
  sf.psd_dims = cone.psd_blocks;
  int koff = sf.nlin;
  for (std::size_t b = 0; b < cone.psd_blocks.size(); ++b) {
    sf.psd_xoff.push_back(cone.psd_offset(static_cast<int>(b)));
    sf.psd_koff.push_back(koff);
    koff += packed_size(cone.psd_blocks[b]);
  }
  sf.kdim = koff;
  sf.sign = p.sense == ObjectiveSense::kMinimize ? 1.0 : -1.0;

  // scalarized coefficients pair with x through the trace inner product
  std::vector<double> weight(static_cast<std::size_t>(sf.nx), 1.0);
  for (std::size_t b = 0; b < cone.psd_blocks.size(); ++b) {
    for (int i = 0; i < cone.psd_blocks[b]; ++i) {
      for (int j = 0; j < i; ++j) weight[static_cast<std::size_t>(cone.psd_index(static_cast<int>(b), i, j))] = 2.0;
    }
  }
  auto dense_row = [&](const LinearFunctional& f, double scale) {
    Vec r = Vec::Zero(sf.nx);
    for (const auto& [idx, v] : f.raw_terms()) r(idx) += scale * weight[static_cast<std::size_t>(idx)] * v;
    return r;
  };

  sf.c = dense_row(p.objective, sf.sign);
  sf.A.resize(sf.neq, sf.nx);
  sf.b.resize(sf.neq);
  for (int i = 0; i < sf.neq; ++i) {
    sf.A.row(i) = dense_row(p.equalities[static_cast<std::size_t>(i)].a, 1.0).transpose();
    sf.b(i) = p.equalities[static_cast<std::size_t>(i)].rhs;
  }
  sf.Gineq.resize(sf.nineq, sf.nx);
  sf.h = Vec::Zero(sf.kdim);
  for (int k = 0; k < sf.nineq; ++k) {
    const auto& row = p.inequalities[static_cast<std::size_t>(k)];
    const double s = row.sense == RowSense::kLessEqual ? 1.0 : -1.0;
    sf.row_sign.push_back(s);
    sf.Gineq.row(k) = dense_row(row.a, s).transpose();
    sf.h(sf.nnonneg + k) = s * row.rhs;
  }
  return sf;
}

// Cone operations and Nesterov-Todd scaling.
class ConeScaling {
 public:
  explicit ConeScaling(const StandardForm& sf) : sf_(sf) {}

  // Scaling that maps both s and z to lambda; returns false when s or z is
  // not in the interior of K.
  bool compute(const Vec& s, const Vec& z) {
    const int nlin = sf_.nlin;
    d_.resize(nlin);
    lam_ = Vec::Zero(sf_.kdim);
    for (int k = 0; k < nlin; ++k) {
      if (!(s(k) > 0.0) || !(z(k) > 0.0)) return false;
      d_(k) = std::sqrt(s(k) / z(k));
      lam_(k) = std::sqrt(s(k) * z(k));
    }
    const std::size_t nb = sf_.psd_dims.size();
    R_.resize(nb);
    Rinv_.resize(nb);
    lam_psd_.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      const int t = sf_.psd_dims[b];
      const Mat S = smat(s.segment(sf_.psd_koff[b], packed_size(t)), t);
      const Mat Z = smat(z.segment(sf_.psd_koff[b], packed_size(t)), t);
      Mat r, rinv;
      Vec lam;
      if (!nt_pair(S, Z, r, rinv, lam)) return false;
      R_[b] = r;
      Rinv_[b] = rinv;
      lam_psd_[b] = lam;
      lam_.segment(sf_.psd_koff[b], packed_size(t)) = svec(lam.asDiagonal().toDenseMatrix());
    }
    return true;
  }

  // Moves the scaled points lambda + step * ds_scaled and
  // lambda + step * dz_scaled and composes the new scaling with the current
  // one. Returns false if either scaled point left the cone.
  bool update(const Vec& ds_scaled, const Vec& dz_scaled, double step) {
    for (int k = 0; k < sf_.nlin; ++k) {
      const double sn = lam_(k) + step * ds_scaled(k);
      const double zn = lam_(k) + step * dz_scaled(k);
      if (!(sn > 0.0) || !(zn > 0.0)) return false;
      d_(k) *= std::sqrt(sn / zn);
      lam_(k) = std::sqrt(sn * zn);
    }
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      const int t = sf_.psd_dims[b];
      const int off = sf_.psd_koff[b];
      const Mat L = lam_psd_[b].asDiagonal();
      const Mat S = L + step * smat(ds_scaled.segment(off, packed_size(t)), t);
      const Mat Z = L + step * smat(dz_scaled.segment(off, packed_size(t)), t);
      Mat r, rinv;
      Vec lam;
      if (!nt_pair(S, Z, r, rinv, lam)) return false;
      R_[b] = R_[b] * r;
      Rinv_[b] = rinv * Rinv_[b];
      lam_psd_[b] = lam;
      lam_.segment(off, packed_size(t)) = svec(lam.asDiagonal().toDenseMatrix());
    }
    return true;
  }

  const Vec& lambda() const { return lam_; }

  // W z
  Vec W(const Vec& z) const {
    Vec out(sf_.kdim);
    out.head(sf_.nlin) = d_.cwiseProduct(z.head(sf_.nlin));
    for_psd(z, out, [](const Mat& r, const Mat&, const Mat& u) -> Mat { return r.transpose() * u * r; });
    return out;
  }
  // W^{-T} s
  Vec WinvT(const Vec& s) const {
    Vec out(sf_.kdim);
    out.head(sf_.nlin) = s.head(sf_.nlin).cwiseQuotient(d_);
    for_psd(s, out, [](const Mat&, const Mat& ri, const Mat& u) -> Mat { return ri * u * ri.transpose(); });
    return out;
  }
  // W^T u
  Vec WT(const Vec& u) const {
    Vec out(sf_.kdim);
    out.head(sf_.nlin) = d_.cwiseProduct(u.head(sf_.nlin));
    for_psd(u, out, [](const Mat& r, const Mat&, const Mat& v) -> Mat { return r * v * r.transpose(); });
    return out;
  }
  // W^{-1} u
  Vec Winv(const Vec& u) const {
    Vec out(sf_.kdim);
    out.head(sf_.nlin) = u.head(sf_.nlin).cwiseQuotient(d_);
    for_psd(u, out, [](const Mat&, const Mat& ri, const Mat& v) -> Mat { return ri.transpose() * v * ri; });
    return out;
  }
  // W^T W u
  Vec WTW(const Vec& u) const { return WT(W(u)); }
  // (W^T W)^{-1} u
  Vec Q(const Vec& u) const { return Winv(WinvT(u)); }

  // W acts on PSD block b as Z -> R' Z R.
  const Mat& r(std::size_t b) const { return R_[b]; }
  const Vec& d() const { return d_; }

  // lambda o u (Jordan product with the diagonal scaled point)
  Vec lam_prod(const Vec& u) const { return jordan(lam_, u); }

  // lambda \ u, inverse of the Jordan product with lambda
  Vec lam_div(const Vec& u) const {
    Vec out(sf_.kdim);
    out.head(sf_.nlin) = u.head(sf_.nlin).cwiseQuotient(lam_.head(sf_.nlin));
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      const int t = sf_.psd_dims[b];
      const int off = sf_.psd_koff[b];
      const Vec& l = lam_psd_[b];
      for (int i = 0; i < t; ++i) {
        for (int j = 0; j <= i; ++j) out(off + packed_index(i, j)) = 2.0 * u(off + packed_index(i, j)) / (l(i) + l(j));
      }
    }
    return out;
  }

  Vec jordan(const Vec& a, const Vec& b) const {
    Vec out(sf_.kdim);
    out.head(sf_.nlin) = a.head(sf_.nlin).cwiseProduct(b.head(sf_.nlin));
    for (std::size_t k = 0; k < sf_.psd_dims.size(); ++k) {
      const int t = sf_.psd_dims[k];
      const int off = sf_.psd_koff[k];
      const Mat A = smat(a.segment(off, packed_size(t)), t);
      const Mat B = smat(b.segment(off, packed_size(t)), t);
      out.segment(off, packed_size(t)) = svec(0.5 * (A * B + B * A));
    }
    return out;
  }

  // Largest alpha with lambda + alpha * v in K (infinity when unbounded).
  double max_step(const Vec& v) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sf_.nlin; ++k) {
      if (v(k) < 0.0) alpha = std::min(alpha, -lam_(k) / v(k));
    }
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      const int t = sf_.psd_dims[b];
      const Vec isq = lam_psd_[b].cwiseSqrt().cwiseInverse();
      const Mat V = isq.asDiagonal() * smat(v.segment(sf_.psd_koff[b], packed_size(t)), t) * isq.asDiagonal();
      const double e = min_eig(V);
      if (e < 0.0) alpha = std::min(alpha, -1.0 / e);
    }
    return alpha;
  }

 private:
  template <typename F>
  void for_psd(const Vec& in, Vec& out, F&& f) const {
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      const int t = sf_.psd_dims[b];
      const int off = sf_.psd_koff[b];
      out.segment(off, packed_size(t)) = svec(f(R_[b], Rinv_[b], smat(in.segment(off, packed_size(t)), t)));
    }
  }

  // NT scaling for a pair of positive definite matrices: R with
  // R^T Z R = R^{-1} S R^{-T} = diag(lam).
  static bool nt_pair(const Mat& S, const Mat& Z, Mat& r, Mat& rinv, Vec& lam) {
    Eigen::LLT<Mat> ls(S), lz(Z);
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const Mat L1 = ls.matrixL();
    const Mat L2 = lz.matrixL();
    Eigen::JacobiSVD<Mat> svd(L2.transpose() * L1, Eigen::ComputeFullU | Eigen::ComputeFullV);
    lam = svd.singularValues();
    if (!(lam.minCoeff() > 0.0)) return false;
    const Vec isq = lam.cwiseSqrt().cwiseInverse();
    r = L1 * svd.matrixV() * isq.asDiagonal();
    rinv = isq.asDiagonal() * svd.matrixU().transpose() * L2.transpose();
    return true;
  }

  const StandardForm& sf_;
  Vec d_;
  Vec lam_;
  std::vector<Mat> R_, Rinv_;
  std::vector<Vec> lam_psd_;
};

class Solver {
 public:
  Solver(const StandardForm& sf, const SolverOptions& opts) : sf_(sf), opts_(opts), scaling_(sf) {
    nc_ = sf.nonneg_xoff + sf.nnonneg;
    const int nf = sf.nx - nc_;
    B_.resize(sf.neq + sf.nineq, nc_);
    C_.resize(sf.neq + sf.nineq, nf);
    B_.topRows(sf.neq) = sf.A.leftCols(nc_);
    C_.topRows(sf.neq) = sf.A.rightCols(nf);
    B_.bottomRows(sf.nineq) = sf.Gineq.leftCols(nc_);
    C_.bottomRows(sf.nineq) = sf.Gineq.rightCols(nf);
  }

  SdpSolution run();

 private:
  Vec G(const Vec& x) const {
    Vec out(sf_.kdim);
    for (int k = 0; k < sf_.nnonneg; ++k) out(k) = -x(sf_.nonneg_xoff + k);
    if (sf_.nineq > 0) out.segment(sf_.nnonneg, sf_.nineq) = sf_.Gineq * x;
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      const int np = packed_size(sf_.psd_dims[b]);
      for (int i = 0; i < sf_.psd_dims[b]; ++i) {
        for (int j = 0; j <= i; ++j) {
          const int e = packed_index(i, j);
          out(sf_.psd_koff[b] + e) = -(i == j ? 1.0 : kSqrt2) * x(sf_.psd_xoff[b] + e);
        }
      }
      (void)np;
    }
    return out;
  }

  Vec GT(const Vec& z) const {
    Vec out = Vec::Zero(sf_.nx);
    for (int k = 0; k < sf_.nnonneg; ++k) out(sf_.nonneg_xoff + k) -= z(k);
    if (sf_.nineq > 0) out += sf_.Gineq.transpose() * z.segment(sf_.nnonneg, sf_.nineq);
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      for (int i = 0; i < sf_.psd_dims[b]; ++i) {
        for (int j = 0; j <= i; ++j) {
          const int e = packed_index(i, j);
          out(sf_.psd_xoff[b] + e) -= (i == j ? 1.0 : kSqrt2) * z(sf_.psd_koff[b] + e);
        }
      }
    }
    return out;
  }

  Vec identity() const {
    Vec e = Vec::Zero(sf_.kdim);
    e.head(sf_.nlin).setOnes();
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      for (int i = 0; i < sf_.psd_dims[b]; ++i) e(sf_.psd_koff[b] + packed_index(i, i)) = 1.0;
    }
    return e;
  }

  // Smallest "eigenvalue" of a cone vector.
  double cone_min(const Vec& v) const {
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sf_.nlin; ++k) m = std::min(m, v(k));
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      const int t = sf_.psd_dims[b];
      m = std::min(m, min_eig(smat(v.segment(sf_.psd_koff[b], packed_size(t)), t)));
    }
    return m;
  }

  // Eliminates the cone-tied columns of x and factors the remaining saddle
  // system in (y, inequality duals, free columns); W = I when
  // `identity_scaling` is set.
  bool factor(bool identity_scaling);
  // Solves [0 A' G'; A 0 0; G 0 -W'W] (ux, uy, uz) = (bx, by, bz).
  void kkt_solve(const Vec& bx, const Vec& by, const Vec& bz, Vec& ux, Vec& uy, Vec& uz) const;
  void kkt_solve_once(const Vec& bx, const Vec& by, const Vec& bz, Vec& ux, Vec& uy, Vec& uz) const;
  // Inverse of the x_c block of G' (W'W)^{-1} G.
  Vec hc_inv(const Vec& u) const;
  Vec dinv_to_x(const Vec& zc) const;
  Vec dinv_to_cone(const Vec& xc) const;

  Vec apply_Q(const Vec& u) const { return identity_scaling_ ? u : scaling_.Q(u); }
  Vec apply_WTW(const Vec& u) const { return identity_scaling_ ? u : scaling_.WTW(u); }

  SdpSolution finish(SdpStatus status, const Vec& x, const Vec& y, const Vec& s, const Vec& z,
                     double tau, double kappa);

  const StandardForm& sf_;
  const SolverOptions& opts_;
  ConeScaling scaling_;
  bool identity_scaling_ = true;
  Eigen::PartialPivLU<Mat> lu_;
  double reg_ = 0.0;
  // x splits into cone-tied columns (PSD entries, nonnegatives) and free
  // columns; B and C are the rows of [A; Gineq] restricted to each part
  int nc_ = 0;
  Mat B_, C_;
  std::vector<Mat> rfac_, rrt_;
  Vec dsq_;
  std::vector<IterationInfo> history_;
  int iterations_ = 0;
  double last_pres_ = 0.0, last_dres_ = 0.0, last_gap_ = 0.0;
};

bool Solver::factor(bool identity_scaling) {
  identity_scaling_ = identity_scaling;
  rrt_.resize(sf_.psd_dims.size());
  rfac_.resize(sf_.psd_dims.size());
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
    const int t = sf_.psd_dims[b];
    rfac_[b] = identity_scaling ? Mat::Identity(t, t) : scaling_.r(b);
    rrt_[b] = rfac_[b] * rfac_[b].transpose();
  }
  dsq_ = identity_scaling ? Vec::Ones(sf_.nlin) : Vec(scaling_.d().array().square());
  if (!dsq_.allFinite()) return false;

  // S = B Hc^{-1} B' = Bs Bs' with row i of Bs the scaled image W D^{-1} B_i,
  // plus the scaling of the inequality slacks
  const int nb = static_cast<int>(B_.rows());
  const int nf = static_cast<int>(C_.cols());
  int ncone = sf_.nnonneg;
  for (int t : sf_.psd_dims) ncone += packed_size(t);
  Mat Bs(nb, ncone);
  for (int i = 0; i < nb; ++i) {
    int col = 0;
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      const int t = sf_.psd_dims[b];
      const int off = sf_.psd_xoff[b];
      Mat U(t, t);
      for (int r = 0; r < t; ++r) {
        for (int c = 0; c <= r; ++c) {
          const double v = (r == c) ? B_(i, off + packed_index(r, c)) : 0.5 * B_(i, off + packed_index(r, c));
          U(r, c) = v;
          U(c, r) = v;
        }
      }
      const Mat& R = rfac_[b];
      Bs.row(i).segment(col, packed_size(t)) = svec(R.transpose() * U * R).transpose();
      col += packed_size(t);
    }
    for (int k = 0; k < sf_.nnonneg; ++k) Bs(i, col + k) = std::sqrt(dsq_(k)) * B_(i, sf_.nonneg_xoff + k);
  }
  Mat S = Mat::Zero(nb, nb);
  S.selfadjointView<Eigen::Lower>().rankUpdate(Bs);
  S = S.selfadjointView<Eigen::Lower>();
  for (int k = 0; k < sf_.nineq; ++k) S(sf_.neq + k, sf_.neq + k) += dsq_(sf_.nnonneg + k);
  double scale = 1.0;
  if (nb > 0) scale = std::max(scale, S.diagonal().cwiseAbs().maxCoeff());
  reg_ = 1e-14 * scale;
  Mat K(nb + nf, nb + nf);
  K.topLeftCorner(nb, nb) = -S;
  K.topLeftCorner(nb, nb).diagonal().array() -= reg_;
  K.topRightCorner(nb, nf) = C_;
  K.bottomLeftCorner(nf, nb) = C_.transpose();
  K.bottomRightCorner(nf, nf) = reg_ * Mat::Identity(nf, nf);
  if (!K.allFinite()) return false;
  lu_.compute(K);
  return true;
}

Vec Solver::hc_inv(const Vec& u) const {
  Vec out(nc_);
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
    const int t = sf_.psd_dims[b];
    const int off = sf_.psd_xoff[b];
    Mat U(t, t);
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j <= i; ++j) {
        // x coordinates pair through D, which doubles off-diagonal weight
        const double v = (i == j) ? u(off + packed_index(i, j)) : 0.5 * u(off + packed_index(i, j));
        U(i, j) = v;
        U(j, i) = v;
      }
    }
    const Mat V = rrt_[b] * U * rrt_[b];
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j <= i; ++j) out(off + packed_index(i, j)) = (i == j) ? V(i, i) : V(i, j);
    }
  }
  for (int k = 0; k < sf_.nnonneg; ++k) out(sf_.nonneg_xoff + k) = dsq_(k) * u(sf_.nonneg_xoff + k);
  return out;
}

// Cone-space vector restricted to the cone-tied columns, mapped through
// D^{-1} into x coordinates (or the reverse, D being diagonal either way).
Vec Solver::dinv_to_x(const Vec& zc) const {
  Vec out(nc_);
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
    for (int i = 0; i < sf_.psd_dims[b]; ++i) {
      for (int j = 0; j <= i; ++j) {
        const int e = packed_index(i, j);
        out(sf_.psd_xoff[b] + e) = zc(sf_.psd_koff[b] + e) / (i == j ? 1.0 : kSqrt2);
      }
    }
  }
  for (int k = 0; k < sf_.nnonneg; ++k) out(sf_.nonneg_xoff + k) = zc(k);
  return out;
}

Vec Solver::dinv_to_cone(const Vec& xc) const {
  Vec out = Vec::Zero(sf_.kdim);
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
    for (int i = 0; i < sf_.psd_dims[b]; ++i) {
      for (int j = 0; j <= i; ++j) {
        const int e = packed_index(i, j);
        out(sf_.psd_koff[b] + e) = xc(sf_.psd_xoff[b] + e) / (i == j ? 1.0 : kSqrt2);
      }
    }
  }
  for (int k = 0; k < sf_.nnonneg; ++k) out(k) = xc(sf_.nonneg_xoff + k);
  return out;
}

void Solver::kkt_solve_once(const Vec& bx, const Vec& by, const Vec& bz, Vec& ux, Vec& uy,
                            Vec& uz) const {
  const int nf = static_cast<int>(C_.cols());
  const int nb = static_cast<int>(B_.rows());
  // With G_c = -D on the cone-tied columns the first and third block rows give
  //   uz_c = -D^{-1} (bx_c - B' v),  ux_c = -D^{-1} (bz_c + W'W uz_c),
  // so only v = (uy, uz_ineq) and the free columns need a factorization.
  const Vec bxc = bx.head(nc_);
  Vec rhs(nb + nf);
  rhs.head(sf_.neq) = by;
  if (sf_.nineq > 0) rhs.segment(sf_.neq, sf_.nineq) = bz.segment(sf_.nnonneg, sf_.nineq);
  rhs.head(nb) -= B_ * (hc_inv(bxc) - dinv_to_x(bz));
  rhs.tail(nf) = bx.tail(nf);
  const Vec sol = lu_.solve(rhs);
  const Vec v = sol.head(nb);
  uz = -dinv_to_cone(bxc - B_.transpose() * v);
  const Vec wz = apply_WTW(uz);
  Vec t = bz + wz;
  if (sf_.nineq > 0) t.segment(sf_.nnonneg, sf_.nineq).setZero();
  ux.resize(sf_.nx);
  ux.head(nc_) = -dinv_to_x(t);
  ux.tail(nf) = sol.tail(nf);
  uy = v.head(sf_.neq);
  if (sf_.nineq > 0) uz.segment(sf_.nnonneg, sf_.nineq) = v.tail(sf_.nineq);
}

void Solver::kkt_solve(const Vec& bx, const Vec& by, const Vec& bz, Vec& ux, Vec& uy, Vec& uz) const {
  kkt_solve_once(bx, by, bz, ux, uy, uz);
  // the regularized factorization is only a preconditioner near the end;
  // keep refining while the residual still halves
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < std::max(opts_.refinement_steps, 20); ++it) {
    const Vec ex = bx - sf_.A.transpose() * uy - GT(uz);
    const Vec ey = by - sf_.A * ux;
    const Vec ez = bz - G(ux) + apply_WTW(uz);
    const double r = std::sqrt(ex.squaredNorm() + ey.squaredNorm() + ez.squaredNorm());
    if (r == 0.0 || (it >= opts_.refinement_steps && r > 0.5 * prev)) break;
    prev = r;
    Vec cx, cy, cz;
    kkt_solve_once(ex, ey, ez, cx, cy, cz);
    ux += cx;
    uy += cy;
    uz += cz;
  }
}

SdpSolution Solver::finish(SdpStatus status, const Vec& x, const Vec& y, const Vec& s, const Vec& z,
                           double tau, double kappa) {
  (void)s;
  (void)kappa;
  SdpSolution sol;
  sol.status = status;
  sol.iterations = iterations_;
  sol.history = history_;
  sol.primal_residual = last_pres_;
  sol.dual_residual = last_dres_;
  sol.gap = last_gap_;

  const double sign = sf_.sign;
  auto to_packed_cone = [&](const Vec& zc, double scale) {
    // cone vector -> scalarized layout (PSD packed unscaled, then nonneg)
    std::vector<double> out(static_cast<std::size_t>(sf_.nonneg_xoff + sf_.nnonneg), 0.0);
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      for (int i = 0; i < sf_.psd_dims[b]; ++i) {
        for (int j = 0; j <= i; ++j) {
          const int e = packed_index(i, j);
          out[static_cast<std::size_t>(sf_.psd_xoff[b] + e)] = scale * zc(sf_.psd_koff[b] + e) / (i == j ? 1.0 : kSqrt2);
        }
      }
    }
    for (int k = 0; k < sf_.nnonneg; ++k) out[static_cast<std::size_t>(sf_.nonneg_xoff + k)] = scale * zc(k);
    return out;
  };

  if (status == SdpStatus::kPrimalInfeasible) {
    const double denom = -(sf_.b.dot(y) + sf_.h.dot(z));
    const double scale = denom > 0.0 ? 1.0 / denom : 1.0;
    sol.farkas_eq.assign(y.data(), y.data() + y.size());
    for (double& v : sol.farkas_eq) v *= scale;
    for (int k = 0; k < sf_.nineq; ++k) sol.farkas_ineq.push_back(scale * z(sf_.nnonneg + k));
    sol.dual_slack = to_packed_cone(z, scale);
    sol.x.assign(static_cast<std::size_t>(sf_.nx), 0.0);
    return sol;
  }
  if (status == SdpStatus::kDualInfeasible) {
    const double denom = -sf_.c.dot(x);
    const double scale = denom > 0.0 ? 1.0 / denom : 1.0;
    sol.ray.resize(static_cast<std::size_t>(sf_.nx));
    for (int i = 0; i < sf_.nx; ++i) sol.ray[static_cast<std::size_t>(i)] = scale * x(i);
    sol.x.assign(static_cast<std::size_t>(sf_.nx), 0.0);
    return sol;
  }

  const Vec xs = x / tau;
  sol.x.assign(xs.data(), xs.data() + xs.size());
  sol.primal_value = sign * sf_.c.dot(xs);
  sol.dual_value = sign * (-(sf_.b.dot(y) + sf_.h.dot(z)) / tau);
  sol.eq_multipliers.resize(static_cast<std::size_t>(sf_.neq));
  for (int i = 0; i < sf_.neq; ++i) sol.eq_multipliers[static_cast<std::size_t>(i)] = -sign * y(i) / tau;
  for (int k = 0; k < sf_.nineq; ++k) {
    sol.ineq_multipliers.push_back(-sign * sf_.row_sign[static_cast<std::size_t>(k)] * z(sf_.nnonneg + k) / tau);
  }
  sol.dual_slack = to_packed_cone(z, 1.0 / tau);
  return sol;
}

SdpSolution Solver::run() {
  const int nx = sf_.nx;
  const int neq = sf_.neq;
  const int kdim = sf_.kdim;
  const double nu = sf_.degree();
  const Vec e = identity();

  const double resx0 = std::max(1.0, sf_.c.norm());
  const double resy0 = std::max(1.0, sf_.b.norm());
  const double resz0 = std::max(1.0, sf_.h.norm());

  // Starting point from two least-norm problems with W = I.
  Vec x, y, s, z;
  {
    if (!factor(true)) return finish(SdpStatus::kNumericalFailure, Vec::Zero(nx), Vec::Zero(neq), e, e, 1.0, 1.0);
    Vec ux, uy, uz;
    kkt_solve(Vec::Zero(nx), sf_.b, sf_.h, ux, uy, uz);
    x = ux;
    s = -uz;
    kkt_solve(-sf_.c, Vec::Zero(neq), Vec::Zero(kdim), ux, uy, uz);
    y = uy;
    z = uz;
    if (kdim > 0) {
      const double ts = -cone_min(s);
      if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
      const double tz = -cone_min(z);
      if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
    }
  }
  double tau = 1.0, kappa = 1.0;
  if (!scaling_.compute(s, z)) return finish(SdpStatus::kNumericalFailure, x, y, s, z, tau, kappa);

  int stalled = 0;
  // last iterate within the regular tolerances while chasing target_gap_tol
  struct Snapshot {
    Vec x, y, s, z;
    double tau, kappa;
    int iteration;
  };
  std::optional<Snapshot> good;
  int first_good = -1;
  const bool polishing = opts_.target_gap_tol > 0.0 && opts_.target_gap_tol < opts_.gap_tol;
  // best iterate by its worst tolerance ratio, returned on failure so the
  // caller can judge how far short it fell
  std::optional<Snapshot> best;
  double best_merit = std::numeric_limits<double>::infinity();
  double best_pres = 0.0, best_dres = 0.0, best_gap = 0.0;
  auto fail = [&]() {
    if (!best) return finish(SdpStatus::kNumericalFailure, x, y, s, z, tau, kappa);
    last_pres_ = best_pres;
    last_dres_ = best_dres;
    last_gap_ = best_gap;
    return finish(SdpStatus::kNumericalFailure, best->x, best->y, best->s, best->z, best->tau, best->kappa);
  };
  auto fallback = [&]() {
    iterations_ = good->iteration;
    return finish(SdpStatus::kOptimal, good->x, good->y, good->s, good->z, good->tau, good->kappa);
  };
  for (iterations_ = 0; iterations_ <= opts_.max_iter; ++iterations_) {
    const Vec hrx = sf_.A.transpose() * y + GT(z);
    const Vec rx = hrx + tau * sf_.c;
    const Vec hry = sf_.A * x;
    const Vec ry = hry - tau * sf_.b;
    const Vec hrz = G(x) + s;
    const Vec rz = hrz - tau * sf_.h;
    const double cx = sf_.c.dot(x);
    const double by_hz = sf_.b.dot(y) + sf_.h.dot(z);
    const double rt = kappa + cx + by_hz;
    const double sz = s.dot(z);
    const double mu = (sz + tau * kappa) / (nu + 1.0);

    const double pcost = cx / tau;
    const double dcost = -by_hz / tau;
    const double gap = sz / (tau * tau);
    const double pres = std::max(ry.norm() / resy0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;
    const double relgap = std::max(gap, std::abs(pcost - dcost)) / std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
    const double absgap = std::max(gap, std::abs(pcost - dcost));
    last_pres_ = pres;
    last_dres_ = dres;
    last_gap_ = absgap;

    IterationInfo info;
    info.primal_value = sf_.sign * pcost;
    info.dual_value = sf_.sign * dcost;
    info.primal_residual = pres;
    info.dual_residual = dres;
    info.gap = absgap;
    info.tau = tau;
    info.kappa = kappa;

    if (opts_.verbose) {
      std::cerr << std::setw(3) << iterations_ << std::scientific << std::setprecision(3) << "  p " << pcost << "  d "
                << dcost << "  gap " << absgap << "  pres " << pres << "  dres " << dres << "  tau " << tau
                << "  kappa " << kappa << std::defaultfloat << "\n";
    }

    const double merit = std::max({pres / opts_.feas_tol, dres / opts_.feas_tol, std::min(relgap / opts_.gap_tol, absgap / opts_.abs_gap_tol)});
    if (merit < best_merit && kappa <= tau) {
      best_merit = merit;
      best = Snapshot{x, y, s, z, tau, kappa, iterations_};
      best_pres = pres;
      best_dres = dres;
      best_gap = absgap;
    }
    if (pres <= opts_.feas_tol && dres <= opts_.feas_tol && (absgap <= opts_.abs_gap_tol || relgap <= opts_.gap_tol)) {
      if (!polishing || relgap <= opts_.target_gap_tol || absgap <= opts_.abs_gap_tol * opts_.target_gap_tol / opts_.gap_tol) {
        history_.push_back(info);
        return finish(SdpStatus::kOptimal, x, y, s, z, tau, kappa);
      }
      // a few extra iterations at most
      if (first_good < 0) first_good = iterations_;
      if (iterations_ - first_good >= 8) {
        history_.push_back(info);
        return finish(SdpStatus::kOptimal, x, y, s, z, tau, kappa);
      }
      good = Snapshot{x, y, s, z, tau, kappa, iterations_};
    }
    // infeasibility certificates; only trusted once kappa dominates tau
    if (kappa > tau) {
      if (by_hz < 0.0) {
        const double pinf = hrx.norm() / resx0 / (-by_hz);
        if (pinf <= opts_.feas_tol) {
          history_.push_back(info);
          return finish(SdpStatus::kPrimalInfeasible, x, y, s, z, tau, kappa);
        }
      }
      if (cx < 0.0) {
        const double dinf = std::max(hry.norm() / resy0, hrz.norm() / resz0) / (-cx);
        if (dinf <= opts_.feas_tol) {
          history_.push_back(info);
          return finish(SdpStatus::kDualInfeasible, x, y, s, z, tau, kappa);
        }
      }
    }
    if (iterations_ == opts_.max_iter) {
      history_.push_back(info);
      break;
    }

    if (!factor(false)) {
      history_.push_back(info);
      break;
    }
    const Vec& lam = scaling_.lambda();

    // direction for the homogenizing column
    Vec v1x, v1y, v1z;
    kkt_solve(-sf_.c, sf_.b, sf_.h, v1x, v1y, v1z);
    const double v1dot = sf_.c.dot(v1x) + sf_.b.dot(v1y) + sf_.h.dot(v1z);

    struct Direction {
      Vec dx, dy, dz, ds_scaled, dz_scaled;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto direction = [&](double eta, const Vec& rc, double rtc) {
      Direction dir;
      const Vec xi = scaling_.lam_div(rc);
      Vec v0x, v0y, v0z;
      kkt_solve(-eta * rx, -eta * ry, -eta * rz - scaling_.WT(xi), v0x, v0y, v0z);
      const double v0dot = sf_.c.dot(v0x) + sf_.b.dot(v0y) + sf_.h.dot(v0z);
      dir.dtau = (-eta * rt - rtc / tau - v0dot) / (v1dot - kappa / tau);
      dir.dx = v0x + dir.dtau * v1x;
      dir.dy = v0y + dir.dtau * v1y;
      dir.dz = v0z + dir.dtau * v1z;
      dir.dkappa = (rtc - kappa * dir.dtau) / tau;
      dir.dz_scaled = scaling_.W(dir.dz);
      dir.ds_scaled = xi - dir.dz_scaled;
      return dir;
    };
    auto step_to_boundary = [&](const Direction& dir) {
      double a = std::min(scaling_.max_step(dir.ds_scaled), scaling_.max_step(dir.dz_scaled));
      if (dir.dtau < 0.0) a = std::min(a, -tau / dir.dtau);
      if (dir.dkappa < 0.0) a = std::min(a, -kappa / dir.dkappa);
      return a;
    };

    // predictor
    const Vec lamsq = scaling_.lam_prod(lam);
    const Direction aff = direction(1.0, -lamsq, -tau * kappa);
    const double alpha_aff = std::min(1.0, step_to_boundary(aff));
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    // corrector
    const Vec rc = -lamsq - scaling_.jordan(aff.ds_scaled, aff.dz_scaled) + sigma * mu * e;
    const double rtc = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Direction dir = direction(1.0 - sigma, rc, rtc);
    const double alpha = std::min(1.0, opts_.step_fraction * step_to_boundary(dir));
    info.step = alpha;
    history_.push_back(info);
    if (!std::isfinite(alpha) || !dir.dx.allFinite() || !dir.dz.allFinite()) break;

    const Vec ds = scaling_.WT(dir.ds_scaled);
    x += alpha * dir.dx;
    y += alpha * dir.dy;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
    // step s and z directly so rounding in the scaling does not leak into the
    // residuals; the incremental update is only a fallback
    const Vec s_next = s + alpha * ds;
    const Vec z_next = z + alpha * dir.dz;
    if (scaling_.compute(s_next, z_next)) {
      s = s_next;
      z = z_next;
    } else {
      if (!scaling_.compute(s, z) || !scaling_.update(dir.ds_scaled, dir.dz_scaled, alpha)) break;
      s = scaling_.WT(scaling_.lambda());
      z = scaling_.Winv(scaling_.lambda());
    }

    stalled = alpha < 1e-9 ? stalled + 1 : 0;
    if (stalled >= 5) break;
    if (good && alpha < 1e-3) break;
  }
  if (good) return fallback();
  return fail();
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  problem.validate();
  const StandardForm sf = standardize(problem);
  Solver solver(sf, options);
  SdpSolution sol = solver.run();
  if (sol.status == SdpStatus::kOptimal || sol.status == SdpStatus::kNumericalFailure) {
    sol.primal_value += problem.objective_offset;
    sol.dual_value += problem.objective_offset;
  }
  for (auto& h : sol.history) {
    h.primal_value += problem.objective_offset;
    h.dual_value += problem.objective_offset;
  }
  return sol;
}

}  // namespace sosrelax
