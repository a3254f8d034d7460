#include "mrac/simengine.hpp"

#include <cmath>
#include <string>

namespace mrac {

StateLayout StateLayout::proposed(std::size_t n, std::size_t d) {
  StateLayout l;
  l.mode = Mode::proposed;
  l.n = n;
  l.d = d;
  l.ntheta = n * (n + d);
  l.nphi = d * (n + d);
  l.off_x = 0;
  l.off_xm = n;
  l.off_xhat = 2 * n;
  l.off_theta = 3 * n;
  l.off_m = l.off_theta + l.ntheta;
  l.off_phi = l.off_m + n * l.ntheta;
  l.total = l.off_phi + l.nphi;
  return l;
}

StateLayout StateLayout::classical(std::size_t n, std::size_t d) {
  StateLayout l;
  l.mode = Mode::classical_baseline;
  l.n = n;
  l.d = d;
  l.nphi = d * (n + d);
  l.off_x = 0;
  l.off_xm = n;
  l.off_kx = 2 * n;
  l.off_kr = 2 * n + n * d;
  l.total = l.off_kr + d * d;
  return l;
}

Vector StateLayout::slice(const Vector& s, std::size_t off, std::size_t len) const {
  return Vector(s.begin() + static_cast<std::ptrdiff_t>(off), s.begin() + static_cast<std::ptrdiff_t>(off + len));
}

Matrix StateLayout::m_of(const Vector& s) const {
  Matrix m(n, ntheta);
  for (std::size_t k = 0; k < n * ntheta; ++k) m.data()[k] = s[off_m + k];
  return m;
}

Matrix StateLayout::kx_of(const Vector& s) const {
  Matrix kx(n, d);
  for (std::size_t k = 0; k < n * d; ++k) kx.data()[k] = s[off_kx + k];
  return kx;
}

Matrix StateLayout::kr_of(const Vector& s) const {
  Matrix kr(d, d);
  for (std::size_t k = 0; k < d * d; ++k) kr.data()[k] = s[off_kr + k];
  return kr;
}

std::optional<std::size_t> RunLog::step_of(double time) const {
  if (t.empty()) return std::nullopt;
  const double idx = (time - t0) / dt;
  const auto k = static_cast<std::size_t>(std::llround(idx));
  if (k >= t.size()) return std::nullopt;
  return k;
}

Vector RunLog::phi_at(std::size_t k) const {
  if (mode == Mode::proposed) return layout.slice(state[k], layout.off_phi, layout.nphi);
  return phi_of(layout.kx_of(state[k]), layout.kr_of(state[k]));
}

Vector RunLog::theta_ft_at(std::size_t k) const {
  if (events.t_c && t[k] >= *events.t_c && theta_ft_locked) return *theta_ft_locked;
  return theta_hat_at(k);
}

Vector RunLog::u_at(std::size_t k, const ReferenceSignal& r) const {
  return control_input(phi_at(k), x_at(k), r.eval(t[k]));
}

Vector rk4_step(const DerivFn& f, double t, const Vector& y, double dt) {
  const Vector k1 = f(t, y);
  Vector stage(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) stage[i] = y[i] + 0.5 * dt * k1[i];
  const Vector k2 = f(t + 0.5 * dt, stage);
  for (std::size_t i = 0; i < y.size(); ++i) stage[i] = y[i] + 0.5 * dt * k2[i];
  const Vector k3 = f(t + 0.5 * dt, stage);
  for (std::size_t i = 0; i < y.size(); ++i) stage[i] = y[i] + dt * k3[i];
  const Vector k4 = f(t + dt, stage);

  Vector out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  if (!all_finite(out)) throw NonFiniteState("rk4 step produced a non-finite component at t = " + std::to_string(t));
  return out;
}

EventTimes detect_events(DataStack<WPayload>& W, DataStack<HPayload>& H, double t, const EventTimes& prior) {
  EventTimes next = prior;
  if (!next.t_c && W.rank_condition_met(t, extract_w_block)) next.t_c = *W.satisfied_at();
  if (!next.t_s && H.rank_condition_met(t, extract_h_block)) next.t_s = *H.satisfied_at();
  if (next.t_c && next.t_s && !next.t_m) next.t_m = std::max(*next.t_c, *next.t_s);
  return next;
}

namespace {

Vector resolve_ic(const Vector& given, std::size_t len, const char* name) {
  if (given.empty()) return Vector(len, 0.0);
  if (given.size() != len) throw DimensionMismatch(std::string("initial condition ") + name);
  return given;
}

void guard_finite(const Vector& s, double t) {
  if (!all_finite(s) || inf_norm(s) > 1e12)
    throw NonFiniteState("state escaped at t = " + std::to_string(t));
}

struct EngineContext {
  Phase phase = Phase::proj_gradient;
  bool identifier_active = true;
  std::optional<Vector> theta_locked;
};

}  // namespace

RunLog run_closed_loop(const SimConfig& config) {
  validate(config.plant);
  validate(config.ref);
  if (config.dt <= 0.0) throw Error("dt must be positive");
  if (config.t_end <= config.t0) throw Error("t_end must exceed t0");
  if (!is_positive_definite(config.Q)) throw Error("Q must be positive definite");

  const std::size_t n = config.plant.n();
  const std::size_t d = config.plant.d();
  if (config.ref.n() != n || config.ref.d() != d) throw DimensionMismatch("plant and reference dimensions differ");

  const Matrix P = solve_lyapunov(config.ref.A_m, config.Q);
  const MatchedGains matched = solve_matching(config.plant, config.ref);
  const Vector theta_true = theta_of(config.plant.A, config.plant.B);
  const Vector phi_star = phi_of(matched.Kx_star, matched.Kr_star);

  ControllerGains gains;
  gains.Gamma_phi = config.Gamma_phi;
  gains.k_phi = config.k_phi;
  gains.P = P;
  gains.Gamma_x = config.Gamma_x;
  gains.Gamma_r = config.Gamma_r;
  const Matrix Gamma_phi_inv = invert(config.Gamma_phi);
  const Matrix Gamma_x_inv = invert(config.Gamma_x);
  const Matrix Gamma_r_inv = invert(config.Gamma_r);

  const double dt = config.dt;
  const double t0 = config.t0;
  const auto n_steps = static_cast<std::size_t>(std::llround((config.t_end - t0) / dt));

  RecordingPolicy policy;
  policy.eps_store = config.stack.eps_store;
  policy.min_dwell = config.stack.min_dwell < 0.0 ? 10.0 * dt : config.stack.min_dwell;
  policy.floor = config.stack.floor;
  const std::size_t capacity = config.stack.capacity > 0 ? config.stack.capacity : 4 * (n + d);

  const StateLayout layout = config.mode == Mode::proposed ? StateLayout::proposed(n, d)
                                                           : StateLayout::classical(n, d);

  RunLog log;
  log.mode = config.mode;
  log.n = n;
  log.d = d;
  log.dt = dt;
  log.t0 = t0;
  log.layout = layout;
  log.theta_true = theta_true;
  log.phi_star = phi_star;
  log.Kx_star = matched.Kx_star;
  log.Kr_star = matched.Kr_star;
  log.P = P;
  log.Gamma_phi_inv = Gamma_phi_inv;
  log.W = DataStack<WPayload>(capacity, n * (n + d), n + d, policy);
  log.H = DataStack<HPayload>(capacity, d * (n + d), n + d, policy);
  log.t.reserve(n_steps + 1);
  log.state.reserve(n_steps + 1);

  // initial state
  Vector s(layout.total, 0.0);
  const Vector x0 = resolve_ic(config.init.x, n, "x");
  const Vector xm0 = resolve_ic(config.init.x_m, n, "x_m");
  for (std::size_t i = 0; i < n; ++i) {
    s[layout.off_x + i] = x0[i];
    s[layout.off_xm + i] = xm0[i];
  }
  Vector gamma0(n, 0.0);
  if (config.mode == Mode::proposed) {
    const Vector xhat0 = resolve_ic(config.init.x_hat, n, "x_hat");
    const Vector th0 = resolve_ic(config.init.theta_hat, layout.ntheta, "theta_hat");
    const Vector phi0 = resolve_ic(config.init.phi, layout.nphi, "phi");
    for (std::size_t i = 0; i < n; ++i) s[layout.off_xhat + i] = xhat0[i];
    for (std::size_t i = 0; i < layout.ntheta; ++i) s[layout.off_theta + i] = th0[i];
    for (std::size_t i = 0; i < layout.nphi; ++i) s[layout.off_phi + i] = phi0[i];
    gamma0 = vsub(x0, xhat0);
    if (norm2(phi0) > config.projection.radius)
      throw OutsideRegion("initial phi lies outside the projection region");
  } else {
    const Vector phi0 = resolve_ic(config.init.phi, layout.nphi, "phi");
    const Matrix kx0 = Kx_of_phi(phi0, n, d);
    const Matrix kr0 = Kr_of_phi(phi0, n, d);
    for (std::size_t k = 0; k < n * d; ++k) s[layout.off_kx + k] = kx0.data()[k];
    for (std::size_t k = 0; k < d * d; ++k) s[layout.off_kr + k] = kr0.data()[k];
  }

  EngineContext ctx;
  const double k_m = config.identifier.k_m;

  const auto deriv_proposed = [&](double t, const Vector& y) -> Vector {
    const Vector x = layout.slice(y, layout.off_x, n);
    const Vector xm = layout.slice(y, layout.off_xm, n);
    const Vector phi = layout.slice(y, layout.off_phi, layout.nphi);
    const Vector r = config.ref.r.eval(t);
    const Vector u = control_input(phi, x, r);

    Vector dy(layout.total, 0.0);
    const Vector dx = plant_derivative(config.plant, x, u);
    const Vector dxm = vadd(config.ref.A_m * xm, config.ref.B_m * r);
    for (std::size_t i = 0; i < n; ++i) {
      dy[layout.off_x + i] = dx[i];
      dy[layout.off_xm + i] = dxm[i];
    }

    IdentifierState id{layout.slice(y, layout.off_xhat, n), layout.slice(y, layout.off_theta, layout.ntheta),
                       layout.m_of(y)};
    if (ctx.identifier_active) {
      const Matrix Y = build_regressor_Y(x, u);
      const Vector gamma = gamma_value(gamma0, t0, t, k_m);
      const IdentifierDerivatives idd = identifier_derivatives(id, config.identifier, Y, x, gamma);
      for (std::size_t i = 0; i < n; ++i) dy[layout.off_xhat + i] = idd.dx_hat[i];
      for (std::size_t i = 0; i < layout.ntheta; ++i) dy[layout.off_theta + i] = idd.dtheta_hat[i];
      for (std::size_t k = 0; k < n * layout.ntheta; ++k) dy[layout.off_m + k] = idd.dm.data()[k];
    }

    const Vector e = vsub(x, xm);
    const Matrix z = build_regressor_z(x, r);
    const Vector theta_now = ctx.theta_locked ? *ctx.theta_locked : id.theta_hat;
    const Matrix B_hat = B_of_theta(theta_now, n, d);
    const Vector dphi = phi_derivative(ctx.phase, phi, e, z, B_hat, log.H, gains, config.projection,
                                       config.ref.A_m, config.ref.B_m, theta_now);
    for (std::size_t i = 0; i < layout.nphi; ++i) dy[layout.off_phi + i] = dphi[i];
    return dy;
  };

  const auto deriv_classical = [&](double t, const Vector& y) -> Vector {
    const Vector x = layout.slice(y, layout.off_x, n);
    const Vector xm = layout.slice(y, layout.off_xm, n);
    const Matrix Kx = layout.kx_of(y);
    const Matrix Kr = layout.kr_of(y);
    const Vector r = config.ref.r.eval(t);
    const Vector u = vadd(Kx.transpose() * x, Kr.transpose() * r);

    Vector dy(layout.total, 0.0);
    const Vector dx = plant_derivative(config.plant, x, u);
    const Vector dxm = vadd(config.ref.A_m * xm, config.ref.B_m * r);
    for (std::size_t i = 0; i < n; ++i) {
      dy[layout.off_x + i] = dx[i];
      dy[layout.off_xm + i] = dxm[i];
    }
    const Vector e = vsub(x, xm);
    const ClassicalDerivatives cd =
        classical_gain_derivatives(x, r, e, P, config.plant.B, gains.Gamma_x, gains.Gamma_r);
    for (std::size_t k = 0; k < n * d; ++k) dy[layout.off_kx + k] = cd.dKx.data()[k];
    for (std::size_t k = 0; k < d * d; ++k) dy[layout.off_kr + k] = cd.dKr.data()[k];
    return dy;
  };

  const DerivFn deriv = config.mode == Mode::proposed ? DerivFn(deriv_proposed) : DerivFn(deriv_classical);

  const auto log_row = [&](double t, const Vector& y) {
    log.t.push_back(t);
    log.state.push_back(y);
    const Vector x = layout.slice(y, layout.off_x, n);
    const Vector xm = layout.slice(y, layout.off_xm, n);
    const Vector e = vsub(x, xm);
    log.norm_e.push_back(norm2(e));
    log.V_xi.push_back(0.0);  // filled below once phi_tilde is known

    if (config.mode == Mode::proposed) {
      const Vector theta_hat = layout.slice(y, layout.off_theta, layout.ntheta);
      const Vector theta_now = ctx.theta_locked ? *ctx.theta_locked : theta_hat;
      log.norm_theta_tilde.push_back(norm2(vsub(theta_true, theta_now)));

      const Vector gamma = gamma_value(gamma0, t0, t, k_m);
      log.norm_gamma.push_back(norm2(gamma));
      IdentifierState id{layout.slice(y, layout.off_xhat, n), theta_hat, layout.m_of(y)};
      const Vector g = auxiliary_g(id, x, gamma);
      log.g_residual.push_back(norm2(vsub(g, id.m * theta_true)));

      const Vector phi = layout.slice(y, layout.off_phi, layout.nphi);
      const Vector phi_tilde = vsub(phi, phi_star);
      log.norm_phi_tilde.push_back(norm2(phi_tilde));
      log.V_xi.back() = 0.5 * dot(e, P * e) + 0.5 * dot(phi_tilde, Gamma_phi_inv * phi_tilde);
      log.phase.push_back(static_cast<int>(ctx.phase));
    } else {
      log.norm_theta_tilde.push_back(0.0);
      log.norm_gamma.push_back(0.0);
      log.g_residual.push_back(0.0);
      const Matrix Kx_t = layout.kx_of(y);
      const Matrix Kr_t = layout.kr_of(y);
      const Matrix Kx_tilde = Kx_t - matched.Kx_star;
      const Matrix Kr_tilde = Kr_t - matched.Kr_star;
      const Vector phi_tilde = phi_of(Kx_tilde, Kr_tilde);
      log.norm_phi_tilde.push_back(norm2(phi_tilde));
      // baseline Lyapunov diagnostic with the classical learning rates
      const Matrix& gxi = Gamma_x_inv;
      const Matrix& gri = Gamma_r_inv;
      double vk = 0.5 * dot(e, P * e);
      for (std::size_t j = 0; j < Kx_tilde.cols(); ++j) {
        Vector col(Kx_tilde.rows());
        for (std::size_t i = 0; i < col.size(); ++i) col[i] = Kx_tilde(i, j);
        vk += 0.5 * dot(col, gxi * col);
      }
      for (std::size_t j = 0; j < Kr_tilde.cols(); ++j) {
        Vector col(Kr_tilde.rows());
        for (std::size_t i = 0; i < col.size(); ++i) col[i] = Kr_tilde(i, j);
        vk += 0.5 * dot(col, gri * col);
      }
      log.V_xi.back() = vk;
      log.phase.push_back(0);
    }
  };

  log_row(t0, s);

  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const double t_next = t0 + static_cast<double>(k + 1) * dt;

    s = rk4_step(deriv, t, s, dt);
    guard_finite(s, t_next);

    if (config.mode == Mode::proposed) {
      const Vector x = layout.slice(s, layout.off_x, n);
      const Vector phi = layout.slice(s, layout.off_phi, layout.nphi);
      const Vector r = config.ref.r.eval(t_next);

      // stacks sample post-step values so paired quantities share an instant
      if (!log.events.t_c) {
        const Matrix m_now = layout.m_of(s);
        IdentifierState id{layout.slice(s, layout.off_xhat, n), layout.slice(s, layout.off_theta, layout.ntheta),
                           m_now};
        const Vector gamma = gamma_value(gamma0, t0, t_next, k_m);
        const Vector g = auxiliary_g(id, x, gamma);
        log.W.maybe_record(t_next, m_now.data(), WPayload{m_now, g});
      }
      if (!log.events.t_s) {
        Vector signal = x;
        signal.insert(signal.end(), r.begin(), r.end());
        const Vector u_now = control_input(phi, x, r);
        log.H.maybe_record(t_next, signal, HPayload{x, r, u_now});
      }

      const EventTimes prior = log.events;
      log.events = detect_events(log.W, log.H, t_next, prior);
      if (log.events.t_c && !prior.t_c) {
        ctx.theta_locked = finalize_ft(log.W);
        ctx.identifier_active = false;
        log.theta_ft_locked = ctx.theta_locked;
      }
      if (log.events.t_m && t_next >= *log.events.t_m)
        ctx.phase = Phase::memory;
      else if (log.events.t_c)
        ctx.phase = Phase::gradient;
    }

    log_row(t_next, s);
  }

  return log;
}

ConvergenceDiagnostics convergence_diagnostics(const RunLog& log, const SimConfig& config) {
  if (log.mode != Mode::proposed) throw TruthUnavailable("diagnostics require a proposed-mode run");

  ConvergenceDiagnostics diag;
  const std::size_t n = log.n;
  const std::size_t d = log.d;
  diag.lambda_min_Q = symmetric_eigenvalues(config.Q).front();
  const double norm_P = spectral_norm(log.P);

  diag.beta1.reserve(log.steps());
  diag.beta2.reserve(log.steps());
  for (std::size_t k = 0; k < log.steps(); ++k) {
    const Vector theta_now = log.theta_ft_at(k);
    const Matrix B_tilde = config.plant.B - B_of_theta(theta_now, n, d);
    const double nB = spectral_norm(B_tilde);
    const Vector phi = log.phi_at(k);
    const double nKx = spectral_norm(Kx_of_phi(phi, n, d) - log.Kx_star);
    const double nKr = spectral_norm(Kr_of_phi(phi, n, d) - log.Kr_star);
    const double nxm = norm2(log.xm_at(k));
    const double nr = norm2(config.ref.r.eval(log.t[k]));
    diag.beta1.push_back(diag.lambda_min_Q - 2.0 * norm_P * nB * nKx);
    diag.beta2.push_back(norm_P * nB * (nKx * nxm + nKr * nr));
  }
  diag.V_xi = log.V_xi;

  if (log.events.t_s && !log.H.empty()) {
    const Matrix Z = log.H.stacked_matrix(extract_h_block);
    const Matrix omega = Z.transpose() * Z;
    diag.lambda_min_Omega_z = std::max(0.0, symmetric_eigenvalues(omega).front());
    const double num = std::min(diag.lambda_min_Q, 2.0 * config.k_phi * diag.lambda_min_Omega_z);
    const double den = std::max(symmetric_eigenvalues(log.P).back(), symmetric_eigenvalues(log.Gamma_phi_inv).back());
    diag.beta_rate = num / den;
  }
  return diag;
}

ExcitationChecks evaluate_excitation(const RunLog& log, const SimConfig& config) {
  ExcitationChecks checks;
  if (log.mode != Mode::proposed) return checks;

  const auto collect = [&](double t_until, bool with_u) {
    std::pair<std::vector<double>, std::vector<Vector>> out;
    for (std::size_t k = 0; k < log.steps() && log.t[k] <= t_until + 0.5 * log.dt; ++k) {
      Vector sample = log.x_at(k);
      const Vector extra = with_u ? log.u_at(k, config.ref.r) : config.ref.r.eval(log.t[k]);
      sample.insert(sample.end(), extra.begin(), extra.end());
      out.first.push_back(log.t[k]);
      out.second.push_back(sample);
    }
    return out;
  };

  if (log.events.t_c && !log.W.empty()) {
    const auto [times, samples] = collect(*log.events.t_c, true);
    checks.stack_W = check_lemma4(log.W.stacked_matrix(extract_w_block), log.W.required_rank(), times, samples);
  }
  if (log.events.t_s && !log.H.empty()) {
    const auto [times, samples] = collect(*log.events.t_s, false);
    checks.stack_H = check_lemma4(log.H.stacked_matrix(extract_h_block), log.H.required_rank(), times, samples);
  }
  return checks;
}

}  // namespace mrac
