#include "sosrelax/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sosrelax/errors.hpp"

namespace sosrelax {

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.dim(); ++i) m.at(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  SymMatrix s(static_cast<int>(m.rows()));
  for (int i = 0; i < s.dim(); ++i) {
    for (int j = 0; j <= i; ++j) s.at(i, j) = m(i, j);
  }
  return s;
}

SymMatrix SymMatrix::from_packed(int dim, std::vector<double> packed) {
  if (static_cast<int>(packed.size()) != packed_size(dim)) {
    throw DimensionError("packed lower triangle has wrong length");
  }
  SymMatrix s;
  s.dim_ = dim;
  s.data_ = std::move(packed);
  return s;
}

SymMatrix SymMatrix::unit(int dim, int i, int j) {
  SymMatrix m(dim);
  m.at(i, j) = 1.0;
  return m;
}

bool SymMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

bool SymMatrix::is_diagonal() const {
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < i; ++j) {
      if ((*this)(i, j) != 0.0) return false;
    }
  }
  return true;
}

Eigen::MatrixXd SymMatrix::to_dense() const {
  Eigen::MatrixXd m(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j <= i; ++j) {
      m(i, j) = (*this)(i, j);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = (*this)(i, j);
      s += (i == j ? 1.0 : 2.0) * v * v;
    }
  }
  return std::sqrt(s);
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.dim_ != dim_) throw DimensionError("adding matrices of different size");
  std::transform(data_.begin(), data_.end(), o.data_.begin(), data_.begin(), std::plus<>());
  return *this;
}

SymMatrix& SymMatrix::operator*=(double a) {
  for (double& v : data_) v *= a;
  return *this;
}

double trace_inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("trace pairing of matrices of different size");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j <= i; ++j) s += (i == j ? 1.0 : 2.0) * a(i, j) * b(i, j);
  }
  return s;
}

SymMatrix block_diag(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix m(a.dim() + b.dim());
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j <= i; ++j) m.at(i, j) = a(i, j);
  }
  for (int i = 0; i < b.dim(); ++i) {
    for (int j = 0; j <= i; ++j) m.at(a.dim() + i, a.dim() + j) = b(i, j);
  }
  return m;
}

std::vector<double> eigenvalues(const SymMatrix& m) {
  if (m.dim() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.to_dense(), Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + m.dim());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

double min_eig(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double min_eig(const SymMatrix& m) {
  for (double v : m.packed()) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite matrix entry");
  }
  return min_eig(m.to_dense());
}

double max_eig(const SymMatrix& m) { return -min_eig(-1.0 * m); }

}  // namespace sosrelax
