#include "mrac/controller.hpp"

#include <cmath>

namespace mrac {

Vector control_input(const Vector& phi, const Vector& x, const Vector& r) {
  return build_regressor_z(x, r) * phi;
}

Vector epsilon_K(const Vector& x_j, const Vector& r_j, const Vector& u_j, const Matrix& B_hat,
                 const Matrix& B_m, const Matrix& A_m, const Matrix& Kr_now, const Vector& theta_ft_vec) {
  const Vector Bm_r = B_m * r_j;
  const Vector eps_r = vsub(Kr_now.transpose() * r_j, pseudo_inverse_apply(B_hat, Bm_r));

  const Vector xdot_j = build_regressor_Y(x_j, u_j) * theta_ft_vec;
  Vector resid = vsub(xdot_j, A_m * x_j);
  resid = vsub(resid, Bm_r);
  resid = vsub(resid, B_hat * eps_r);
  const Vector eps_x = pseudo_inverse_apply(B_hat, resid);

  return vadd(eps_x, eps_r);
}

Vector project(const Vector& nominal, const Vector& phi, const ProjectionSpec& spec) {
  const double norm_phi = norm2(phi);
  if (norm_phi > spec.radius * (1.0 + 1e-9)) throw OutsideRegion("||phi|| exceeds the projection radius");

  const double inner = spec.radius - spec.band;
  if (norm_phi < inner) return nominal;
  const double outward = dot(phi, nominal);
  if (outward <= 0.0) return nominal;

  // scale factor ramps 0 -> 1 across the band; at the boundary the radial
  // component is removed entirely
  const double f = std::min(1.0, (norm_phi * norm_phi - inner * inner) / (spec.radius * spec.radius - inner * inner));
  const double coeff = f * outward / (norm_phi * norm_phi);
  Vector out(nominal.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = nominal[i] - coeff * phi[i];
  return out;
}

Vector phi_derivative(Phase phase, const Vector& phi, const Vector& e, const Matrix& z,
                      const Matrix& B_hat, const DataStack<HPayload>& H, const ControllerGains& gains,
                      const ProjectionSpec& spec, const Matrix& A_m, const Matrix& B_m,
                      const Vector& theta_ft_vec) {
  if (e.size() != gains.P.rows()) throw DimensionMismatch("phi_derivative error size");

  const Vector BtPe = B_hat.transpose() * (gains.P * e);
  Vector grad = z.transpose() * BtPe;  // d(n+d)

  if (phase == Phase::memory) {
    const std::size_t n = e.size();
    const std::size_t d = z.rows();
    const Matrix Kr_now = Kr_of_phi(phi, n, d);
    Vector sum(phi.size(), 0.0);
    for (const auto& entry : H.entries()) {
      const Matrix z_j = build_regressor_z(entry.payload.x, entry.payload.r);
      // the stored point is replayed through the current parameters
      const Vector u_j = z_j * phi;
      const Vector eps = epsilon_K(entry.payload.x, entry.payload.r, u_j, B_hat, B_m, A_m, Kr_now, theta_ft_vec);
      const Vector term = z_j.transpose() * eps;
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += term[i];
    }
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += gains.k_phi * sum[i];
  }

  Vector nominal = vscale(gains.Gamma_phi * grad, -1.0);
  if (phase == Phase::proj_gradient) return project(nominal, phi, spec);
  return nominal;
}

ClassicalDerivatives classical_gain_derivatives(const Vector& x, const Vector& r, const Vector& e,
                                                const Matrix& P, const Matrix& B, const Matrix& Gamma_x,
                                                const Matrix& Gamma_r) {
  if (x.size() != P.rows() || e.size() != P.rows()) throw DimensionMismatch("classical update operand sizes");
  const Vector PtB_e = B.transpose() * (P.transpose() * e);  // = (e^T P B)^T, d entries

  const Vector gx = Gamma_x * x;
  Matrix dKx(x.size(), PtB_e.size());
  for (std::size_t i = 0; i < dKx.rows(); ++i)
    for (std::size_t j = 0; j < dKx.cols(); ++j) dKx(i, j) = -gx[i] * PtB_e[j];

  const Vector gr = Gamma_r * r;
  Matrix dKr(r.size(), PtB_e.size());
  for (std::size_t i = 0; i < dKr.rows(); ++i)
    for (std::size_t j = 0; j < dKr.cols(); ++j) dKr(i, j) = -gr[i] * PtB_e[j];

  return ClassicalDerivatives{std::move(dKx), std::move(dKr)};
}

}  // namespace mrac
