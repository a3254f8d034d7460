#include "mrac/identifier.hpp"

#include <cmath>

namespace mrac {

Vector gamma_value(const Vector& gamma0, double t0, double t, double k_m) {
  if (t < t0) throw Error("gamma_value requires t >= t0");
  return vscale(gamma0, std::exp(-k_m * (t - t0)));
}

IdentifierDerivatives identifier_derivatives(const IdentifierState& state, const IdentifierGains& gains,
                                             const Matrix& Y, const Vector& x, const Vector& gamma) {
  const std::size_t n = x.size();
  if (state.x_hat.size() != n || gamma.size() != n) throw DimensionMismatch("identifier state sizes");
  if (Y.rows() != n || Y.cols() != state.theta_hat.size()) throw DimensionMismatch("identifier regressor shape");
  if (!state.m.same_shape(Y)) throw DimensionMismatch("identifier filter shape");

  const Vector x_tilde = vsub(x, state.x_hat);
  const Vector dtheta = vscale(state.m.transpose() * vsub(x_tilde, gamma), gains.k_theta);

  Matrix dm = Y;
  for (std::size_t k = 0; k < dm.data().size(); ++k) dm.data()[k] -= gains.k_m * state.m.data()[k];

  Vector dx_hat = Y * state.theta_hat;
  const Vector correction = state.m * dtheta;
  for (std::size_t i = 0; i < n; ++i) dx_hat[i] += gains.k_m * x_tilde[i] + correction[i];

  return IdentifierDerivatives{std::move(dx_hat), dtheta, std::move(dm)};
}

Vector auxiliary_g(const IdentifierState& state, const Vector& x, const Vector& gamma) {
  Vector g = state.m * state.theta_hat;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += (x[i] - state.x_hat[i]) - gamma[i];
  return g;
}

Vector theta_ft(const FtEstimate& est, const IdentifierState& state) {
  if (est.locked()) return *est.theta_locked;
  return state.theta_hat;
}

Vector finalize_ft(const DataStack<WPayload>& stack) {
  if (stack.empty()) throw RankDeficient("finalize_ft on empty stack");
  const Matrix M = stack.stacked_matrix(extract_w_block);
  Vector G;
  G.reserve(M.rows());
  for (const auto& entry : stack.entries()) G.insert(G.end(), entry.payload.g.begin(), entry.payload.g.end());
  return least_squares_solve(M, G);
}

Matrix structured_gram_inverse(const DataStack<WPayload>& stack) {
  if (stack.empty()) throw RankDeficient("structured_gram_inverse on empty stack");
  const Matrix& first = stack.entries().front().payload.m;
  const std::size_t n = first.rows();
  if (first.cols() % n != 0 || first.cols() / n < n) throw DimensionMismatch("m block shape");
  const std::size_t d = first.cols() / n - n;

  // Each stored m is [I_n (x) a^T | I_n (x) b^T]; row 0 carries a at columns
  // [0, n) and b at columns [n^2, n^2 + d).
  Matrix S(n + d, n + d);
  for (const auto& entry : stack.entries()) {
    const Matrix& m = entry.payload.m;
    Vector mu(n + d);
    for (std::size_t k = 0; k < n; ++k) mu[k] = m(0, k);
    for (std::size_t j = 0; j < d; ++j) mu[n + j] = m(0, n * n + j);
    for (std::size_t i = 0; i < n + d; ++i)
      for (std::size_t j = 0; j < n + d; ++j) S(i, j) += mu[i] * mu[j];
  }

  if (min_singular_value(S) < rank_tolerance(S)) throw RankDeficient("channel Gram is singular");
  const Matrix S_inv = invert(S);

  // Expand I_n (x) S^{-1} through the permutation that maps the interleaved
  // per-row index (i, k) to the [vec(A^T); vec(B^T)] ordering.
  const std::size_t dim = n * (n + d);
  const auto perm = [&](std::size_t i, std::size_t k) {
    return k < n ? i * n + k : n * n + i * d + (k - n);
  };
  Matrix out(dim, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n + d; ++k)
      for (std::size_t l = 0; l < n + d; ++l) out(perm(i, k), perm(i, l)) = S_inv(k, l);
  return out;
}

}  // namespace mrac
