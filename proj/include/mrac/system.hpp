#pragma once

#include <cstddef>
#include <vector>

#include "mrac/matrixlab.hpp"

namespace mrac {

/// xdot = A x + B u with full-column-rank B, n >= d >= 1.
struct PlantModel {
  Matrix A;
  Matrix B;

  std::size_t n() const { return A.rows(); }
  std::size_t d() const { return B.cols(); }
};

/// Bounded, piecewise-continuous reference input selected from a small
/// closed-form catalog so scenarios stay reproducible.
struct ReferenceSignal {
  enum class Kind { constant, step, exp_decay, sinusoids };

  Kind kind = Kind::constant;
  Vector value;       // constant/step level, exp_decay amplitude
  Vector rate;        // exp_decay per-channel decay rate
  double step_time = 0.0;
  // per-channel lists of sinusoid terms
  std::vector<Vector> amplitudes;
  std::vector<Vector> frequencies;
  std::vector<Vector> phases;

  std::size_t dim() const;
  Vector eval(double t) const;
};

/// xm_dot = A_m xm + B_m r(t) with Hurwitz A_m.
struct ReferenceModel {
  Matrix A_m;
  Matrix B_m;
  ReferenceSignal r;

  std::size_t n() const { return A_m.rows(); }
  std::size_t d() const { return B_m.cols(); }
};

/// Gains satisfying A + B Kx*^T = A_m and B Kr*^T = B_m.
struct MatchedGains {
  Matrix Kx_star;  // n x d
  Matrix Kr_star;  // d x d
};

void validate(const PlantModel& plant);
void validate(const ReferenceModel& ref);

// theta = [vec(A^T); vec(B^T)], i.e. the rows of A then the rows of B.
Vector theta_of(const Matrix& A, const Matrix& B);
Matrix A_of_theta(const Vector& theta, std::size_t n, std::size_t d);
Matrix B_of_theta(const Vector& theta, std::size_t n, std::size_t d);

// phi = [vec(Kx); vec(Kr)] (column stacking).
Vector phi_of(const Matrix& Kx, const Matrix& Kr);
Matrix Kx_of_phi(const Vector& phi, std::size_t n, std::size_t d);
Matrix Kr_of_phi(const Vector& phi, std::size_t n, std::size_t d);

/// Y(x,u) = [I_n (x) x^T | I_n (x) u^T]; satisfies Y(x,u) theta = A x + B u.
Matrix build_regressor_Y(const Vector& x, const Vector& u);

/// z(x,r) = [I_d (x) x^T | I_d (x) r^T]; satisfies z(x,r) phi = Kx^T x + Kr^T r.
Matrix build_regressor_z(const Vector& x, const Vector& r);

/// Kx*^T = B^+ (A_m - A), Kr*^T = B^+ B_m, verified against the matching
/// identities. Throws MatchingInfeasible when the residual exceeds tolerance.
MatchedGains solve_matching(const PlantModel& plant, const ReferenceModel& ref);

Vector plant_derivative(const PlantModel& plant, const Vector& x, const Vector& u);
Vector reference_derivative(const ReferenceModel& ref, const Vector& x_m, double t);

}  // namespace mrac
