#pragma once

#include "mrac/matrixlab.hpp"
#include "mrac/memory.hpp"
#include "mrac/system.hpp"

namespace mrac {

/// Update-law phases: projected gradient until the identification stack is
/// satisfied at t_c, plain gradient on (t_c, t_m), gradient plus the stored
/// data term for t >= t_m.
enum class Phase { proj_gradient = 1, gradient = 2, memory = 3 };

/// Smooth ball projection: radius bounds ||phi||, the band is the width of
/// the transition zone where outward-pointing updates are scaled down.
struct ProjectionSpec {
  double radius = 20.0;
  double band = 2.0;
};

struct ControllerGains {
  Matrix Gamma_phi;  // d(n+d) PD learning rate
  double k_phi = 40.0;
  Matrix P;        // n x n, Lyapunov solution
  Matrix Gamma_x;  // n x n, classical baseline
  Matrix Gamma_r;  // d x d, classical baseline
};

/// One stack entry of the controller stack H. u is the input applied at the
/// storage instant; kept for the record, while the update law re-evaluates
/// stored points with the current parameters.
struct HPayload {
  Vector x;
  Vector r;
  Vector u;
};

/// u = z(x, r) phi.
Vector control_input(const Vector& phi, const Vector& x, const Vector& r);

/// Per-entry error variable eps_K = eps_Kx + eps_Kr built from a stored data
/// point, the reference model, the current Kr and the finite-time parameter
/// estimate. With exact B_hat and theta and u_j evaluated at the current
/// parameters this equals z_j (phi - phi*).
Vector epsilon_K(const Vector& x_j, const Vector& r_j, const Vector& u_j, const Matrix& B_hat,
                 const Matrix& B_m, const Matrix& A_m, const Matrix& Kr_now, const Vector& theta_ft_vec);

/// Smooth ball projection of a nominal update direction.
Vector project(const Vector& nominal, const Vector& phi, const ProjectionSpec& spec);

/// Right-hand side of the switched phi update law.
Vector phi_derivative(Phase phase, const Vector& phi, const Vector& e, const Matrix& z,
                      const Matrix& B_hat, const DataStack<HPayload>& H, const ControllerGains& gains,
                      const ProjectionSpec& spec, const Matrix& A_m, const Matrix& B_m,
                      const Vector& theta_ft_vec);

struct ClassicalDerivatives {
  Matrix dKx;
  Matrix dKr;
};

/// Classical MRAC update laws (comparison baseline; uses the true B).
ClassicalDerivatives classical_gain_derivatives(const Vector& x, const Vector& r, const Vector& e,
                                                const Matrix& P, const Matrix& B, const Matrix& Gamma_x,
                                                const Matrix& Gamma_r);

inline Matrix extract_h_block(const HPayload& p) { return build_regressor_z(p.x, p.r); }

}  // namespace mrac
