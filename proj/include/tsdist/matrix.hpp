#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tsdist::linalg {

// Dense row-major matrix of doubles. Factories validate that every entry is
// finite; in-place mutation through operator() is trusted to internal code.
class Matrix {
 public:
  Matrix() = default;  // empty sentinel (0x0); real matrices are >= 1x1
  Matrix(std::size_t rows, std::size_t cols);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_data(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }
  bool is_square() const { return rows_ == cols_ && rows_ > 0; }

  double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

  double* row(std::size_t i) { return v_.data() + i * cols_; }
  const double* row(std::size_t i) const { return v_.data() + i * cols_; }

  std::span<const double> data() const { return v_; }
  std::vector<double> take_data() && { return std::move(v_); }

  double max_abs_diff(const Matrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> v_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // columns are eigenvectors
};

// Symmetric eigendecomposition by cyclic Jacobi rotations. The input is
// symmetrized as (A + A^T)/2 first; asymmetry beyond 1e-8 max-abs is an
// error. Converges when the off-diagonal Frobenius norm falls below
// 1e-12 * max(||A||_F, 1); capped at 100 sweeps.
EigenDecomposition sym_eigen(const Matrix& a);

// Eigenvalues only (descending), via Householder tridiagonalization and
// implicit-shift QL. Same preconditions as sym_eigen; used on hot paths
// where eigenvectors are not needed.
std::vector<double> sym_eigenvalues(const Matrix& a);

namespace detail {
// Tridiagonalization + QL engines over an already-symmetric matrix (the
// argument is consumed). These skip the symmetrization copy and asymmetry
// check; callers guarantee exact symmetry. Same ordering and sign
// conventions as sym_eigen.
std::vector<double> eigenvalues_of_symmetric(Matrix a);
EigenDecomposition eigen_of_symmetric(Matrix a);
}  // namespace detail

// Symmetric PSD square root: S with S*S ~= a. Eigenvalues in
// [-1e-8 * lambda_max, 0) are clamped to zero; anything lower is NotPSD.
Matrix psd_sqrt(const Matrix& a);

Matrix matmul(const Matrix& a, const Matrix& b);

double trace(const Matrix& a);

}  // namespace tsdist::linalg
