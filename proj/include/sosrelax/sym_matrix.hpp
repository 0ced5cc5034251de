#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sosrelax {

// Position of entry (i, j), i >= j, in row-major lower-triangle packing:
// (0,0), (1,0), (1,1), (2,0), ...
inline int packed_index(int i, int j) {
  if (i < j) std::swap(i, j);
  return i * (i + 1) / 2 + j;
}

inline int packed_size(int dim) { return dim * (dim + 1) / 2; }

// Real symmetric matrix; only the lower triangle is stored.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim) : dim_(dim), data_(static_cast<std::size_t>(packed_size(dim)), 0.0) {}

  static SymMatrix identity(int dim);
  static SymMatrix diagonal(std::span<const double> d);
  // Reads the lower triangle of `m`.
  static SymMatrix from_dense(const Eigen::MatrixXd& m);
  static SymMatrix from_packed(int dim, std::vector<double> packed);
  // Symmetric matrix with ones at (i, j) and (j, i).
  static SymMatrix unit(int dim, int i, int j);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(packed_index(i, j))]; }
  double& at(int i, int j) { return data_[static_cast<std::size_t>(packed_index(i, j))]; }
  std::span<const double> packed() const { return data_; }

  bool is_zero() const;
  bool is_diagonal() const;
  Eigen::MatrixXd to_dense() const;
  double frobenius_norm() const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator*=(double a);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator*(double a, SymMatrix m) { return m *= a; }
  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

// Tr(A B) for symmetric A and B.
double trace_inner(const SymMatrix& a, const SymMatrix& b);

SymMatrix block_diag(const SymMatrix& a, const SymMatrix& b);

// Eigenvalues sorted in descending order.
std::vector<double> eigenvalues(const SymMatrix& m);
double min_eig(const SymMatrix& m);
double min_eig(const Eigen::MatrixXd& m);
double max_eig(const SymMatrix& m);

}  // namespace sosrelax
