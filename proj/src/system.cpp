#include "mrac/system.hpp"

#include <cmath>

namespace mrac {

std::size_t ReferenceSignal::dim() const {
  switch (kind) {
    case Kind::constant:
    case Kind::step:
    case Kind::exp_decay:
      return value.size();
    case Kind::sinusoids:
      return amplitudes.size();
  }
  return 0;
}

Vector ReferenceSignal::eval(double t) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::step: {
      if (t < step_time) return Vector(value.size(), 0.0);
      return value;
    }
    case Kind::exp_decay: {
      Vector out(value.size());
      for (std::size_t i = 0; i < value.size(); ++i) out[i] = value[i] * std::exp(-rate[i] * t);
      return out;
    }
    case Kind::sinusoids: {
      Vector out(amplitudes.size(), 0.0);
      for (std::size_t i = 0; i < amplitudes.size(); ++i)
        for (std::size_t k = 0; k < amplitudes[i].size(); ++k)
          out[i] += amplitudes[i][k] * std::sin(frequencies[i][k] * t + phases[i][k]);
      return out;
    }
  }
  return {};
}

void validate(const PlantModel& plant) {
  if (plant.A.rows() != plant.A.cols()) throw DimensionMismatch("plant A must be square");
  if (plant.B.rows() != plant.A.rows()) throw DimensionMismatch("plant B row count must match A");
  if (plant.B.cols() < 1 || plant.B.cols() > plant.B.rows())
    throw DimensionMismatch("plant requires n >= d >= 1");
  if (min_singular_value(plant.B) < rank_tolerance(plant.B))
    throw RankDeficient("plant B must have full column rank");
}

void validate(const ReferenceModel& ref) {
  if (ref.A_m.rows() != ref.A_m.cols()) throw DimensionMismatch("reference A_m must be square");
  if (ref.B_m.rows() != ref.A_m.rows()) throw DimensionMismatch("reference B_m row count must match A_m");
  if (ref.r.dim() != ref.B_m.cols()) throw DimensionMismatch("reference signal dimension must match B_m columns");
  // Hurwitz probe: A_m is Hurwitz iff the Lyapunov equation with Q = I has a
  // unique positive definite solution. solve_lyapunov throws otherwise.
  solve_lyapunov(ref.A_m, Matrix::identity(ref.A_m.rows()));
}

Vector theta_of(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows()) throw DimensionMismatch("theta_of row mismatch");
  Vector theta = vec_rows(A);
  const Vector tail = vec_rows(B);
  theta.insert(theta.end(), tail.begin(), tail.end());
  return theta;
}

Matrix A_of_theta(const Vector& theta, std::size_t n, std::size_t d) {
  if (theta.size() != n * (n + d)) throw DimensionMismatch("theta size");
  Matrix A(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) A(i, k) = theta[i * n + k];
  return A;
}

Matrix B_of_theta(const Vector& theta, std::size_t n, std::size_t d) {
  if (theta.size() != n * (n + d)) throw DimensionMismatch("theta size");
  Matrix B(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) B(i, j) = theta[n * n + i * d + j];
  return B;
}

Vector phi_of(const Matrix& Kx, const Matrix& Kr) {
  Vector phi = vec_cols(Kx);
  const Vector tail = vec_cols(Kr);
  phi.insert(phi.end(), tail.begin(), tail.end());
  return phi;
}

Matrix Kx_of_phi(const Vector& phi, std::size_t n, std::size_t d) {
  if (phi.size() != d * (n + d)) throw DimensionMismatch("phi size");
  Matrix Kx(n, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i) Kx(i, j) = phi[j * n + i];
  return Kx;
}

Matrix Kr_of_phi(const Vector& phi, std::size_t n, std::size_t d) {
  if (phi.size() != d * (n + d)) throw DimensionMismatch("phi size");
  Matrix Kr(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) Kr(i, j) = phi[n * d + j * d + i];
  return Kr;
}

Matrix build_regressor_Y(const Vector& x, const Vector& u) {
  const std::size_t n = x.size();
  const std::size_t d = u.size();
  Matrix Y(n, n * (n + d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) Y(i, i * n + k) = x[k];
    for (std::size_t j = 0; j < d; ++j) Y(i, n * n + i * d + j) = u[j];
  }
  return Y;
}

Matrix build_regressor_z(const Vector& x, const Vector& r) {
  const std::size_t n = x.size();
  const std::size_t d = r.size();
  Matrix z(d, d * (n + d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < n; ++k) z(i, i * n + k) = x[k];
    for (std::size_t j = 0; j < d; ++j) z(i, n * d + i * d + j) = r[j];
  }
  return z;
}

MatchedGains solve_matching(const PlantModel& plant, const ReferenceModel& ref) {
  if (ref.A_m.rows() != plant.A.rows() || ref.B_m.cols() != plant.B.cols())
    throw DimensionMismatch("plant and reference model dimensions differ");

  const Matrix KxT = pseudo_inverse_apply(plant.B, ref.A_m - plant.A);  // d x n
  const Matrix KrT = pseudo_inverse_apply(plant.B, ref.B_m);            // d x d

  const Matrix res1 = plant.A + plant.B * KxT - ref.A_m;
  const Matrix res2 = plant.B * KrT - ref.B_m;
  const double scale = std::max({1.0, inf_norm(ref.A_m), inf_norm(ref.B_m)});
  if (inf_norm(res1) > 1e-10 * scale || inf_norm(res2) > 1e-10 * scale)
    throw MatchingInfeasible("A_m - A or B_m is not in the column space of B");

  return MatchedGains{KxT.transpose(), KrT.transpose()};
}

Vector plant_derivative(const PlantModel& plant, const Vector& x, const Vector& u) {
  if (x.size() != plant.n() || u.size() != plant.d()) throw DimensionMismatch("plant derivative operand sizes");
  return vadd(plant.A * x, plant.B * u);
}

Vector reference_derivative(const ReferenceModel& ref, const Vector& x_m, double t) {
  return vadd(ref.A_m * x_m, ref.B_m * ref.r.eval(t));
}

}  // namespace mrac
