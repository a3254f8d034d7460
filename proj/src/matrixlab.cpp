#include "mrac/matrixlab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mrac {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
  rows_ = init.size();
  cols_ = rows_ ? init.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& row : init) {
    if (row.size() != cols_) throw DimensionMismatch("ragged initializer list");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  if (!same_shape(rhs)) throw DimensionMismatch("add " + shape_str(rows_, cols_) + " and " + shape_str(rhs.rows_, rhs.cols_));
  Matrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] += rhs.data_[k];
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  if (!same_shape(rhs)) throw DimensionMismatch("sub " + shape_str(rows_, cols_) + " and " + shape_str(rhs.rows_, rhs.cols_));
  Matrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] -= rhs.data_[k];
  return out;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  if (!same_shape(rhs)) throw DimensionMismatch("add-assign shapes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
  return *this;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw DimensionMismatch("multiply " + shape_str(rows_, cols_) + " by " + shape_str(rhs.rows_, rhs.cols_));
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

Matrix Matrix::operator*(double s) const {
  Matrix out = *this;
  for (double& v : out.data_) v *= s;
  return out;
}

Vector Matrix::operator*(const Vector& v) const {
  if (cols_ != v.size())
    throw DimensionMismatch("matvec " + shape_str(rows_, cols_) + " by vector of size " + std::to_string(v.size()));
  Vector out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot of different sizes");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double inf_norm(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Vector vadd(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vadd of different sizes");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector vsub(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vsub of different sizes");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector vscale(const Vector& a, double s) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

Vector vec_cols(const Matrix& m) {
  Vector out;
  out.reserve(m.rows() * m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(m(i, j));
  return out;
}

Vector vec_rows(const Matrix& m) { return m.data(); }

Matrix unvec_cols(const Vector& v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) throw DimensionMismatch("unvec size");
  Matrix out(rows, cols);
  std::size_t k = 0;
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) out(i, j) = v[k++];
  return out;
}

double inf_norm(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) row += std::abs(m(i, j));
    best = std::max(best, row);
  }
  return best;
}

double frobenius_norm(const Matrix& m) {
  double acc = 0.0;
  for (double v : m.data()) acc += v * v;
  return std::sqrt(acc);
}

double rank_tolerance(const Matrix& m) { return 1e-8 * std::max(1.0, inf_norm(m)); }

Matrix kron(const Matrix& a, const Matrix& b) {
  if (a.empty() || b.empty()) throw DimensionMismatch("kron of empty operand");
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = a(i, j);
      if (s == 0.0) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          out(i * b.rows() + p, j * b.cols() + q) = s * b(p, q);
    }
  return out;
}

Vector symmetric_eigenvalues(Matrix s) {
  if (s.rows() != s.cols()) throw DimensionMismatch("eigenvalues of non-square matrix");
  const std::size_t n = s.rows();
  // symmetrize; callers often pass Gram sums with roundoff asymmetry
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }

  const double scale = frobenius_norm(s);
  const double stop = 1e-15 * std::max(1.0, scale);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
    if (std::sqrt(2.0 * off) <= stop) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p);
          const double skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k);
          const double sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
    }
  }
  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = s(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double spectral_norm(const Matrix& m) {
  if (m.empty()) return 0.0;
  const Matrix gram = (m.rows() >= m.cols()) ? m.transpose() * m : m * m.transpose();
  const Vector eig = symmetric_eigenvalues(gram);
  return std::sqrt(std::max(0.0, eig.back()));
}

double min_singular_value(const Matrix& m) {
  if (m.empty()) throw DimensionMismatch("min_singular_value of empty matrix");
  const Matrix gram = (m.rows() >= m.cols()) ? m.transpose() * m : m * m.transpose();
  const Vector eig = symmetric_eigenvalues(gram);
  return std::sqrt(std::max(0.0, eig.front()));
}

Vector solve_linear(Matrix a, Vector b) {
  if (a.rows() != a.cols()) throw DimensionMismatch("solve_linear needs a square matrix");
  if (a.rows() != b.size()) throw DimensionMismatch("solve_linear rhs size");
  const std::size_t n = a.rows();
  const double tol = 1e-13 * std::max(1.0, inf_norm(a));

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) <= tol) throw RankDeficient("singular pivot in solve_linear");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) * inv;
      if (f == 0.0) continue;
      a(r, col) = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  Vector x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
    x[i] = acc / a(i, i);
  }
  return x;
}

Matrix invert(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("invert needs a square matrix");
  const std::size_t n = a.rows();
  Matrix work = a;
  Matrix inv = Matrix::identity(n);
  const double tol = 1e-13 * std::max(1.0, inf_norm(a));

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
    if (std::abs(work(pivot, col)) <= tol) throw RankDeficient("singular pivot in invert");
    if (pivot != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(col, j), work(pivot, j));
        std::swap(inv(col, j), inv(pivot, j));
      }
    const double d = 1.0 / work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) *= d;
      inv(col, j) *= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = work(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= f * work(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

Matrix solve_lyapunov(const Matrix& a_m, const Matrix& q) {
  if (a_m.rows() != a_m.cols()) throw DimensionMismatch("Lyapunov state matrix must be square");
  if (!q.same_shape(a_m)) throw DimensionMismatch("Lyapunov Q shape");
  const std::size_t n = a_m.rows();
  const Matrix at = a_m.transpose();
  const Matrix sys = kron(Matrix::identity(n), at) + kron(at, Matrix::identity(n));

  Vector rhs = vec_cols(q);
  for (double& v : rhs) v = -v;

  Vector vec_p;
  try {
    vec_p = solve_linear(sys, rhs);
  } catch (const RankDeficient&) {
    throw NotHurwitz("vectorized Lyapunov system is singular");
  }

  Matrix p = unvec_cols(vec_p, n, n);
  // exact symmetrization: the continuous Lyapunov solution is symmetric
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (p(i, j) + p(j, i));
      p(i, j) = v;
      p(j, i) = v;
    }
  if (!is_positive_definite(p)) throw NotHurwitz("Lyapunov solution is not positive definite");
  return p;
}

Vector least_squares_solve(const Matrix& m, const Vector& g) {
  if (m.rows() < m.cols()) throw DimensionMismatch("least squares needs rows >= cols");
  if (m.rows() != g.size()) throw DimensionMismatch("least squares rhs size");
  if (min_singular_value(m) < rank_tolerance(m)) throw RankDeficient("least squares matrix below rank tolerance");
  const Matrix mt = m.transpose();
  return solve_linear(mt * m, mt * g);
}

Vector pseudo_inverse_apply(const Matrix& b, const Vector& v) {
  if (b.rows() != v.size()) throw DimensionMismatch("pseudo inverse operand size");
  if (min_singular_value(b) < rank_tolerance(b)) throw RankDeficient("pseudo inverse of rank-deficient matrix");
  const Matrix bt = b.transpose();
  return solve_linear(bt * b, bt * v);
}

Matrix pseudo_inverse_apply(const Matrix& b, const Matrix& v) {
  if (b.rows() != v.rows()) throw DimensionMismatch("pseudo inverse operand rows");
  Matrix out(b.cols(), v.cols());
  for (std::size_t j = 0; j < v.cols(); ++j) {
    Vector col(v.rows());
    for (std::size_t i = 0; i < v.rows(); ++i) col[i] = v(i, j);
    const Vector sol = pseudo_inverse_apply(b, col);
    for (std::size_t i = 0; i < sol.size(); ++i) out(i, j) = sol[i];
  }
  return out;
}

bool is_positive_definite(const Matrix& p) {
  if (p.rows() != p.cols()) throw DimensionMismatch("PD check needs a square matrix");
  double asym = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = i + 1; j < p.cols(); ++j) asym = std::max(asym, std::abs(p(i, j) - p(j, i)));
  if (asym > 1e-9 * std::max(1.0, inf_norm(p))) throw NotSymmetric("asymmetry exceeds tolerance");
  const Vector eig = symmetric_eigenvalues(p);
  return eig.front() > 0.0;
}

double nonzero_fraction(const Matrix& m, double tol) {
  if (tol < 0.0) throw Error("nonzero_fraction tolerance must be >= 0");
  if (m.empty()) return 0.0;
  std::size_t count = 0;
  for (double v : m.data())
    if (std::abs(v) > tol) ++count;
  return static_cast<double>(count) / static_cast<double>(m.data().size());
}

}  // namespace mrac
