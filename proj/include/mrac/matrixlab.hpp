#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "mrac/errors.hpp"

namespace mrac {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Everything in this project is small
/// (a few hundred entries per dimension at most), so the kernel favours
/// clarity and determinism over asymptotic tricks.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  Matrix transpose() const;

  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator*(double s) const;
  Matrix& operator+=(const Matrix& rhs);

  Vector operator*(const Vector& v) const;

  bool same_shape(const Matrix& rhs) const { return rows_ == rhs.rows_ && cols_ == rhs.cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

// ---- vector helpers -------------------------------------------------------

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double inf_norm(const Vector& v);
Vector vadd(const Vector& a, const Vector& b);
Vector vsub(const Vector& a, const Vector& b);
Vector vscale(const Vector& a, double s);
bool all_finite(const Vector& v);

// ---- flattening -----------------------------------------------------------

/// Column-stacking vectorization (classic vec operator).
Vector vec_cols(const Matrix& m);
/// Row-major flattening; equals vec_cols of the transpose.
Vector vec_rows(const Matrix& m);
Matrix unvec_cols(const Vector& v, std::size_t rows, std::size_t cols);

// ---- norms and tolerances -------------------------------------------------

double inf_norm(const Matrix& m);
double frobenius_norm(const Matrix& m);
/// Largest singular value, via the Gram eigenproblem.
double spectral_norm(const Matrix& m);
/// Scale-relative threshold below which a singular value counts as zero.
double rank_tolerance(const Matrix& m);

// ---- kernels --------------------------------------------------------------

/// Kronecker product; block (i,j) of the result equals a(i,j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi rotations;
/// the input is symmetrized first so callers may pass results of sums that
/// are symmetric only up to roundoff.
Vector symmetric_eigenvalues(Matrix s);

/// Smallest singular value; 0 within tolerance iff the matrix is
/// rank-deficient. Computed from the smaller Gram matrix.
double min_singular_value(const Matrix& m);

/// Solve A x = b by Gaussian elimination with partial pivoting.
Vector solve_linear(Matrix a, Vector b);

/// Dense inverse (Gauss-Jordan with partial pivoting).
Matrix invert(const Matrix& a);

/// Solve A_m^T P + P A_m + Q = 0 for symmetric positive definite P via the
/// vectorized linear system (I (x) A_m^T + A_m^T (x) I) vec(P) = -vec(Q).
/// Throws NotHurwitz when the system is singular or P fails the PD check.
Matrix solve_lyapunov(const Matrix& a_m, const Matrix& q);

/// (M^T M)^{-1} M^T g for a tall full-column-rank M.
Vector least_squares_solve(const Matrix& m, const Vector& g);

/// (B^T B)^{-1} B^T v.
Vector pseudo_inverse_apply(const Matrix& b, const Vector& v);
/// Column-wise variant: (B^T B)^{-1} B^T V.
Matrix pseudo_inverse_apply(const Matrix& b, const Matrix& v);

/// True iff all eigenvalues are strictly positive. Throws NotSymmetric when
/// the asymmetry exceeds tolerance.
bool is_positive_definite(const Matrix& p);

/// Fraction of entries with |entry| > tol.
double nonzero_fraction(const Matrix& m, double tol);

}  // namespace mrac
