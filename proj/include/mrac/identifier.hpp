#pragma once

#include <optional>

#include "mrac/matrixlab.hpp"
#include "mrac/memory.hpp"

namespace mrac {

struct IdentifierGains {
  double k_theta = 80.0;
  double k_m = 10.0;
};

/// State of the derivative-free identifier: state estimate, online parameter
/// estimate and the filtered regressor m with m(t0) = 0.
struct IdentifierState {
  Vector x_hat;      // n
  Vector theta_hat;  // n(n+d)
  Matrix m;          // n x n(n+d)
};

struct IdentifierDerivatives {
  Vector dx_hat;
  Vector dtheta_hat;
  Matrix dm;
};

/// gamma(t) = gamma(t0) e^{-k_m (t - t0)}, evaluated in closed form.
Vector gamma_value(const Vector& gamma0, double t0, double t, double k_m);

/// Identifier update equations. The theta_hat derivative is computed first;
/// the x_hat equation consumes it, so the system stays explicit.
IdentifierDerivatives identifier_derivatives(const IdentifierState& state, const IdentifierGains& gains,
                                             const Matrix& Y, const Vector& x, const Vector& gamma);

/// g = m theta_hat + (x - x_hat) - gamma; satisfies g = m theta identically.
Vector auxiliary_g(const IdentifierState& state, const Vector& x, const Vector& gamma);

/// One stack entry of the identification stack W.
struct WPayload {
  Matrix m;  // n x n(n+d)
  Vector g;  // n
};

/// Switched finite-time estimate: the online theta_hat until the stack rank
/// condition is met, then a value locked by the least-squares finalization.
struct FtEstimate {
  std::optional<Vector> theta_locked;
  std::optional<double> t_c;

  bool locked() const { return theta_locked.has_value(); }
};

Vector theta_ft(const FtEstimate& est, const IdentifierState& state);

/// theta = (M^T M)^{-1} M^T G from the frozen stack. Requires the rank
/// condition; throws RankDeficient otherwise.
Vector finalize_ft(const DataStack<WPayload>& stack);

/// (M^T M)^{-1} computed by exploiting the structure of m: M^T M is a
/// row/column permutation of I_n (x) S with S the (n+d)-dimensional Gram of
/// the filtered state/input channels, so only S is inverted.
Matrix structured_gram_inverse(const DataStack<WPayload>& stack);

inline Matrix extract_w_block(const WPayload& p) { return p.m; }

}  // namespace mrac
