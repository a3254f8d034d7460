#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mrac/controller.hpp"
#include "mrac/excitation.hpp"
#include "mrac/identifier.hpp"
#include "mrac/matrixlab.hpp"
#include "mrac/memory.hpp"
#include "mrac/system.hpp"

namespace mrac {

enum class Mode { proposed, classical_baseline };

struct StackConfig {
  double eps_store = 0.01;
  double min_dwell = -1.0;  // negative -> 10 * dt
  double floor = 1e-6;
  std::size_t capacity = 0;  // 0 -> 4 * (n + d) entries
};

struct InitialConditions {
  Vector x;
  Vector x_m;
  Vector x_hat;
  Vector theta_hat;
  Vector phi;
};

struct SimConfig {
  PlantModel plant;
  ReferenceModel ref;
  IdentifierGains identifier;
  Matrix Q;
  Matrix Gamma_phi;
  Matrix Gamma_x;
  Matrix Gamma_r;
  double k_phi = 40.0;
  ProjectionSpec projection;
  StackConfig stack;
  double dt = 1e-3;
  double t_end = 10.0;
  double t0 = 0.0;
  InitialConditions init;
  Mode mode = Mode::proposed;
};

/// t_c: identification stack satisfied; t_s: controller stack satisfied;
/// t_m = max(t_c, t_s) once both exist.
struct EventTimes {
  std::optional<double> t_c;
  std::optional<double> t_s;
  std::optional<double> t_m;
};

/// Offsets of the flattened closed-loop state.
struct StateLayout {
  std::size_t n = 0, d = 0;
  std::size_t ntheta = 0, nphi = 0;
  std::size_t off_x = 0, off_xm = 0, off_xhat = 0, off_theta = 0, off_m = 0, off_phi = 0;
  std::size_t off_kx = 0, off_kr = 0;  // classical mode
  std::size_t total = 0;
  Mode mode = Mode::proposed;

  static StateLayout proposed(std::size_t n, std::size_t d);
  static StateLayout classical(std::size_t n, std::size_t d);

  Vector slice(const Vector& s, std::size_t off, std::size_t len) const;
  Matrix m_of(const Vector& s) const;   // proposed
  Matrix kx_of(const Vector& s) const;  // classical
  Matrix kr_of(const Vector& s) const;  // classical
};

struct RunLog {
  Mode mode = Mode::proposed;
  std::size_t n = 0, d = 0;
  double dt = 0.0, t0 = 0.0;
  StateLayout layout;

  std::vector<double> t;
  std::vector<Vector> state;  // full flat state at each grid point
  std::vector<int> phase;     // phase in effect for the step starting here (0 for classical)
  std::vector<double> norm_e, norm_theta_tilde, norm_phi_tilde, norm_gamma, g_residual, V_xi;

  EventTimes events;
  std::optional<Vector> theta_ft_locked;
  DataStack<WPayload> W;
  DataStack<HPayload> H;

  Vector theta_true;
  Vector phi_star;
  Matrix Kx_star, Kr_star;
  Matrix P;
  Matrix Gamma_phi_inv;

  std::size_t steps() const { return t.size(); }
  std::optional<std::size_t> step_of(double time) const;

  Vector x_at(std::size_t k) const { return layout.slice(state[k], layout.off_x, n); }
  Vector xm_at(std::size_t k) const { return layout.slice(state[k], layout.off_xm, n); }
  Vector e_at(std::size_t k) const { return vsub(x_at(k), xm_at(k)); }
  Vector xhat_at(std::size_t k) const { return layout.slice(state[k], layout.off_xhat, n); }
  Vector theta_hat_at(std::size_t k) const { return layout.slice(state[k], layout.off_theta, layout.ntheta); }
  Matrix m_at(std::size_t k) const { return layout.m_of(state[k]); }
  Vector phi_at(std::size_t k) const;
  /// Switched finite-time estimate at step k.
  Vector theta_ft_at(std::size_t k) const;
  /// Input applied at step k, reconstructed from the logged state.
  Vector u_at(std::size_t k, const ReferenceSignal& r) const;
};

using DerivFn = std::function<Vector(double, const Vector&)>;

/// Classical fixed-step 4th-order Runge-Kutta step.
Vector rk4_step(const DerivFn& f, double t, const Vector& y, double dt);

/// Update event times from the stacks' rank monitors. Called once per step
/// after the stack updates; event times land on grid points.
EventTimes detect_events(DataStack<WPayload>& W, DataStack<HPayload>& H, double t, const EventTimes& prior);

/// Integrate the coupled closed loop on a fixed grid and log every step.
RunLog run_closed_loop(const SimConfig& config);

/// Per-step Lyapunov-analysis series and the exponential rate implied by the
/// frozen controller stack.
struct ConvergenceDiagnostics {
  std::vector<double> beta1;
  std::vector<double> beta2;
  std::vector<double> V_xi;
  double beta_rate = 0.0;
  double lambda_min_Q = 0.0;
  double lambda_min_Omega_z = 0.0;
};

ConvergenceDiagnostics convergence_diagnostics(const RunLog& log, const SimConfig& config);

struct ExcitationChecks {
  std::optional<Lemma4Check> stack_W;  // (x, u) over [t0, t_c]
  std::optional<Lemma4Check> stack_H;  // (x, r) over [t0, t_s]
};

ExcitationChecks evaluate_excitation(const RunLog& log, const SimConfig& config);

}  // namespace mrac
