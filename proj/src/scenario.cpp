#include "mrac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <vector>

namespace mrac {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw ConfigInvalid(path + "." + item.key(), "unknown key");
}

double parse_number(const json& obj, const std::string& path) {
  if (!obj.is_number()) throw ConfigInvalid(path, "expected a number");
  const double v = obj.get<double>();
  if (!std::isfinite(v)) throw ConfigInvalid(path, "must be finite");
  return v;
}

Vector parse_vector(const json& obj, const std::string& path) {
  if (!obj.is_array()) throw ConfigInvalid(path, "expected an array of numbers");
  Vector out;
  out.reserve(obj.size());
  for (std::size_t i = 0; i < obj.size(); ++i) out.push_back(parse_number(obj[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix parse_matrix(const json& obj, const std::string& path) {
  if (!obj.is_array() || obj.empty()) throw ConfigInvalid(path, "expected a non-empty array of rows");
  const std::size_t cols = obj[0].is_array() ? obj[0].size() : 0;
  if (cols == 0) throw ConfigInvalid(path, "rows must be non-empty arrays");
  Matrix out(obj.size(), cols);
  for (std::size_t i = 0; i < obj.size(); ++i) {
    if (!obj[i].is_array() || obj[i].size() != cols) throw ConfigInvalid(path, "rows must have equal lengths");
    for (std::size_t j = 0; j < cols; ++j)
      out(i, j) = parse_number(obj[i][j], path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::vector<Vector> parse_vector_list(const json& obj, const std::string& path) {
  if (!obj.is_array()) throw ConfigInvalid(path, "expected an array of arrays");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < obj.size(); ++i) out.push_back(parse_vector(obj[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json vector_list_to_json(const std::vector<Vector>& list) {
  json out = json::array();
  for (const auto& v : list) out.push_back(v);
  return out;
}

ReferenceSignal parse_reference_signal(const json& obj, const std::string& path) {
  reject_unknown_keys(obj, path, {"kind", "params"});
  if (!obj.contains("kind")) throw ConfigInvalid(path + ".kind", "missing");
  if (!obj.contains("params")) throw ConfigInvalid(path + ".params", "missing");
  const std::string kind = obj.at("kind").get<std::string>();
  const json& params = obj.at("params");
  const std::string ppath = path + ".params";

  ReferenceSignal sig;
  if (kind == "constant") {
    sig.kind = ReferenceSignal::Kind::constant;
    reject_unknown_keys(params, ppath, {"value"});
    sig.value = parse_vector(params.at("value"), ppath + ".value");
  } else if (kind == "step") {
    sig.kind = ReferenceSignal::Kind::step;
    reject_unknown_keys(params, ppath, {"value", "time"});
    sig.value = parse_vector(params.at("value"), ppath + ".value");
    sig.step_time = parse_number(params.at("time"), ppath + ".time");
  } else if (kind == "exp_decay") {
    sig.kind = ReferenceSignal::Kind::exp_decay;
    reject_unknown_keys(params, ppath, {"amplitude", "rate"});
    sig.value = parse_vector(params.at("amplitude"), ppath + ".amplitude");
    sig.rate = parse_vector(params.at("rate"), ppath + ".rate");
    if (sig.rate.size() != sig.value.size()) throw ConfigInvalid(ppath + ".rate", "length must match amplitude");
  } else if (kind == "sinusoids") {
    sig.kind = ReferenceSignal::Kind::sinusoids;
    reject_unknown_keys(params, ppath, {"amplitudes", "frequencies", "phases"});
    sig.amplitudes = parse_vector_list(params.at("amplitudes"), ppath + ".amplitudes");
    sig.frequencies = parse_vector_list(params.at("frequencies"), ppath + ".frequencies");
    if (params.contains("phases"))
      sig.phases = parse_vector_list(params.at("phases"), ppath + ".phases");
    else
      for (const auto& ch : sig.amplitudes) sig.phases.emplace_back(ch.size(), 0.0);
    if (sig.frequencies.size() != sig.amplitudes.size() || sig.phases.size() != sig.amplitudes.size())
      throw ConfigInvalid(ppath, "amplitudes, frequencies and phases must list the same channels");
    for (std::size_t i = 0; i < sig.amplitudes.size(); ++i)
      if (sig.frequencies[i].size() != sig.amplitudes[i].size() || sig.phases[i].size() != sig.amplitudes[i].size())
        throw ConfigInvalid(ppath, "per-channel term counts must agree");
  } else {
    throw ConfigInvalid(path + ".kind", "unknown reference kind '" + kind + "'");
  }
  return sig;
}

json reference_signal_to_json(const ReferenceSignal& sig) {
  json out;
  switch (sig.kind) {
    case ReferenceSignal::Kind::constant:
      out["kind"] = "constant";
      out["params"] = {{"value", sig.value}};
      break;
    case ReferenceSignal::Kind::step:
      out["kind"] = "step";
      out["params"] = {{"value", sig.value}, {"time", sig.step_time}};
      break;
    case ReferenceSignal::Kind::exp_decay:
      out["kind"] = "exp_decay";
      out["params"] = {{"amplitude", sig.value}, {"rate", sig.rate}};
      break;
    case ReferenceSignal::Kind::sinusoids:
      out["kind"] = "sinusoids";
      out["params"] = {{"amplitudes", vector_list_to_json(sig.amplitudes)},
                       {"frequencies", vector_list_to_json(sig.frequencies)},
                       {"phases", vector_list_to_json(sig.phases)}};
      break;
  }
  return out;
}

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& path) {
  if (m.rows() != rows || m.cols() != cols)
    throw ConfigInvalid(path, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix, got " +
                                  std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

}  // namespace

SimConfig parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ConfigInvalid("<root>", "scenario must be a JSON object");
  reject_unknown_keys(doc, "<root>",
                      {"plant", "reference", "gains", "projection", "stacks", "sim", "mode"});

  SimConfig cfg;

  if (!doc.contains("plant")) throw ConfigInvalid("plant", "missing");
  const json& plant = doc.at("plant");
  reject_unknown_keys(plant, "plant", {"A", "B"});
  if (!plant.contains("A")) throw ConfigInvalid("plant.A", "missing");
  if (!plant.contains("B")) throw ConfigInvalid("plant.B", "missing");
  cfg.plant.A = parse_matrix(plant.at("A"), "plant.A");
  cfg.plant.B = parse_matrix(plant.at("B"), "plant.B");
  if (cfg.plant.A.rows() != cfg.plant.A.cols()) throw ConfigInvalid("plant.A", "must be square");
  const std::size_t n = cfg.plant.A.rows();
  if (cfg.plant.B.rows() != n) throw ConfigInvalid("plant.B", "row count must match plant.A");
  const std::size_t d = cfg.plant.B.cols();
  if (d < 1 || d > n) throw ConfigInvalid("plant.B", "requires n >= d >= 1");

  if (!doc.contains("reference")) throw ConfigInvalid("reference", "missing");
  const json& ref = doc.at("reference");
  reject_unknown_keys(ref, "reference", {"A_m", "B_m", "r"});
  if (!ref.contains("A_m")) throw ConfigInvalid("reference.A_m", "missing");
  if (!ref.contains("B_m")) throw ConfigInvalid("reference.B_m", "missing");
  if (!ref.contains("r")) throw ConfigInvalid("reference.r", "missing");
  cfg.ref.A_m = parse_matrix(ref.at("A_m"), "reference.A_m");
  cfg.ref.B_m = parse_matrix(ref.at("B_m"), "reference.B_m");
  require_shape(cfg.ref.A_m, n, n, "reference.A_m");
  require_shape(cfg.ref.B_m, n, d, "reference.B_m");
  cfg.ref.r = parse_reference_signal(ref.at("r"), "reference.r");
  if (cfg.ref.r.dim() != d) throw ConfigInvalid("reference.r", "signal dimension must equal the input dimension");

  // defaults chosen to match the bundled experiment scale
  cfg.Q = Matrix::identity(n);
  cfg.Gamma_phi = Matrix::identity(d * (n + d));
  cfg.Gamma_x = Matrix::identity(n);
  cfg.Gamma_r = Matrix::identity(d);
  if (doc.contains("gains")) {
    const json& gains = doc.at("gains");
    reject_unknown_keys(gains, "gains", {"k_theta", "k_m", "k_phi", "Q", "Gamma_phi", "Gamma_x", "Gamma_r"});
    if (gains.contains("k_theta")) cfg.identifier.k_theta = parse_number(gains.at("k_theta"), "gains.k_theta");
    if (gains.contains("k_m")) cfg.identifier.k_m = parse_number(gains.at("k_m"), "gains.k_m");
    if (gains.contains("k_phi")) cfg.k_phi = parse_number(gains.at("k_phi"), "gains.k_phi");
    if (gains.contains("Q")) {
      cfg.Q = parse_matrix(gains.at("Q"), "gains.Q");
      require_shape(cfg.Q, n, n, "gains.Q");
    }
    if (gains.contains("Gamma_phi")) {
      cfg.Gamma_phi = parse_matrix(gains.at("Gamma_phi"), "gains.Gamma_phi");
      require_shape(cfg.Gamma_phi, d * (n + d), d * (n + d), "gains.Gamma_phi");
    }
    if (gains.contains("Gamma_x")) {
      cfg.Gamma_x = parse_matrix(gains.at("Gamma_x"), "gains.Gamma_x");
      require_shape(cfg.Gamma_x, n, n, "gains.Gamma_x");
    }
    if (gains.contains("Gamma_r")) {
      cfg.Gamma_r = parse_matrix(gains.at("Gamma_r"), "gains.Gamma_r");
      require_shape(cfg.Gamma_r, d, d, "gains.Gamma_r");
    }
    if (cfg.identifier.k_theta <= 0.0) throw ConfigInvalid("gains.k_theta", "must be positive");
    if (cfg.identifier.k_m <= 0.0) throw ConfigInvalid("gains.k_m", "must be positive");
    if (cfg.k_phi <= 0.0) throw ConfigInvalid("gains.k_phi", "must be positive");
  }

  if (doc.contains("projection")) {
    const json& proj = doc.at("projection");
    reject_unknown_keys(proj, "projection", {"radius", "band"});
    if (proj.contains("radius")) cfg.projection.radius = parse_number(proj.at("radius"), "projection.radius");
    if (proj.contains("band")) cfg.projection.band = parse_number(proj.at("band"), "projection.band");
    if (cfg.projection.radius <= 0.0) throw ConfigInvalid("projection.radius", "must be positive");
    if (cfg.projection.band <= 0.0 || cfg.projection.band >= cfg.projection.radius)
      throw ConfigInvalid("projection.band", "must lie in (0, radius)");
  }

  if (doc.contains("stacks")) {
    const json& stacks = doc.at("stacks");
    reject_unknown_keys(stacks, "stacks", {"eps_store", "min_dwell", "floor", "capacity"});
    if (stacks.contains("eps_store")) cfg.stack.eps_store = parse_number(stacks.at("eps_store"), "stacks.eps_store");
    if (stacks.contains("min_dwell")) cfg.stack.min_dwell = parse_number(stacks.at("min_dwell"), "stacks.min_dwell");
    if (stacks.contains("floor")) cfg.stack.floor = parse_number(stacks.at("floor"), "stacks.floor");
    if (stacks.contains("capacity")) {
      if (!stacks.at("capacity").is_number_unsigned()) throw ConfigInvalid("stacks.capacity", "must be a non-negative integer");
      cfg.stack.capacity = stacks.at("capacity").get<std::size_t>();
    }
    if (cfg.stack.eps_store <= 0.0) throw ConfigInvalid("stacks.eps_store", "must be positive");
    if (cfg.stack.floor <= 0.0) throw ConfigInvalid("stacks.floor", "must be positive");
  }

  if (!doc.contains("sim")) throw ConfigInvalid("sim", "missing");
  const json& sim = doc.at("sim");
  reject_unknown_keys(sim, "sim", {"dt", "t_end", "t0", "initial_conditions"});
  if (!sim.contains("dt")) throw ConfigInvalid("sim.dt", "missing");
  if (!sim.contains("t_end")) throw ConfigInvalid("sim.t_end", "missing");
  cfg.dt = parse_number(sim.at("dt"), "sim.dt");
  cfg.t_end = parse_number(sim.at("t_end"), "sim.t_end");
  if (sim.contains("t0")) cfg.t0 = parse_number(sim.at("t0"), "sim.t0");
  if (cfg.dt <= 0.0) throw ConfigInvalid("sim.dt", "must be positive");
  if (cfg.t_end <= cfg.t0) throw ConfigInvalid("sim.t_end", "must exceed t0");
  if (sim.contains("initial_conditions")) {
    const json& ic = sim.at("initial_conditions");
    reject_unknown_keys(ic, "sim.initial_conditions", {"x", "x_m", "x_hat", "theta_hat", "phi"});
    const auto opt_vec = [&](const char* key) {
      return ic.contains(key) ? parse_vector(ic.at(key), std::string("sim.initial_conditions.") + key) : Vector{};
    };
    cfg.init.x = opt_vec("x");
    cfg.init.x_m = opt_vec("x_m");
    cfg.init.x_hat = opt_vec("x_hat");
    cfg.init.theta_hat = opt_vec("theta_hat");
    cfg.init.phi = opt_vec("phi");
    const auto check_len = [&](const Vector& v, std::size_t len, const char* key) {
      if (!v.empty() && v.size() != len)
        throw ConfigInvalid(std::string("sim.initial_conditions.") + key,
                            "expected length " + std::to_string(len));
    };
    check_len(cfg.init.x, n, "x");
    check_len(cfg.init.x_m, n, "x_m");
    check_len(cfg.init.x_hat, n, "x_hat");
    check_len(cfg.init.theta_hat, n * (n + d), "theta_hat");
    check_len(cfg.init.phi, d * (n + d), "phi");
  }

  if (doc.contains("mode")) {
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode == "proposed")
      cfg.mode = Mode::proposed;
    else if (mode == "classical_baseline")
      cfg.mode = Mode::classical_baseline;
    else
      throw ConfigInvalid("mode", "must be 'proposed' or 'classical_baseline'");
  }

  return cfg;
}

SimConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigInvalid("<root>", std::string("JSON parse failure: ") + e.what());
  }
  return parse_scenario(doc);
}

json serialize_scenario(const SimConfig& cfg) {
  const std::size_t n = cfg.plant.n();
  const std::size_t d = cfg.plant.d();
  json doc;
  doc["plant"] = {{"A", matrix_to_json(cfg.plant.A)}, {"B", matrix_to_json(cfg.plant.B)}};
  doc["reference"] = {{"A_m", matrix_to_json(cfg.ref.A_m)},
                      {"B_m", matrix_to_json(cfg.ref.B_m)},
                      {"r", reference_signal_to_json(cfg.ref.r)}};
  doc["gains"] = {{"k_theta", cfg.identifier.k_theta}, {"k_m", cfg.identifier.k_m},   {"k_phi", cfg.k_phi},
                  {"Q", matrix_to_json(cfg.Q)},        {"Gamma_phi", matrix_to_json(cfg.Gamma_phi)},
                  {"Gamma_x", matrix_to_json(cfg.Gamma_x)}, {"Gamma_r", matrix_to_json(cfg.Gamma_r)}};
  doc["projection"] = {{"radius", cfg.projection.radius}, {"band", cfg.projection.band}};
  doc["stacks"] = {{"eps_store", cfg.stack.eps_store},
                   {"min_dwell", cfg.stack.min_dwell},
                   {"floor", cfg.stack.floor},
                   {"capacity", cfg.stack.capacity}};
  json ic;
  ic["x"] = cfg.init.x.empty() ? Vector(n, 0.0) : cfg.init.x;
  ic["x_m"] = cfg.init.x_m.empty() ? Vector(n, 0.0) : cfg.init.x_m;
  ic["x_hat"] = cfg.init.x_hat.empty() ? Vector(n, 0.0) : cfg.init.x_hat;
  ic["theta_hat"] = cfg.init.theta_hat.empty() ? Vector(n * (n + d), 0.0) : cfg.init.theta_hat;
  ic["phi"] = cfg.init.phi.empty() ? Vector(d * (n + d), 0.0) : cfg.init.phi;
  doc["sim"] = {{"dt", cfg.dt}, {"t_end", cfg.t_end}, {"t0", cfg.t0}, {"initial_conditions", ic}};
  doc["mode"] = cfg.mode == Mode::proposed ? "proposed" : "classical_baseline";
  return doc;
}

void write_trajectory_csv(const RunLog& log, const std::string& path, std::size_t every) {
  if (every == 0) every = 1;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);

  out << "t";
  for (std::size_t i = 0; i < log.n; ++i) out << ",x" << i;
  for (std::size_t i = 0; i < log.n; ++i) out << ",xm" << i;
  for (std::size_t i = 0; i < log.n; ++i) out << ",e" << i;
  out << ",norm_theta_tilde,norm_phi_tilde,V_xi,phase\n";

  char buf[32];
  const auto emit = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < log.steps(); ++k) {
    if (k % every != 0 && k + 1 != log.steps()) continue;
    emit(log.t[k]);
    const Vector x = log.x_at(k);
    const Vector xm = log.xm_at(k);
    for (std::size_t i = 0; i < log.n; ++i) {
      out << ',';
      emit(x[i]);
    }
    for (std::size_t i = 0; i < log.n; ++i) {
      out << ',';
      emit(xm[i]);
    }
    for (std::size_t i = 0; i < log.n; ++i) {
      out << ',';
      emit(x[i] - xm[i]);
    }
    out << ',';
    emit(log.norm_theta_tilde[k]);
    out << ',';
    emit(log.norm_phi_tilde[k]);
    out << ',';
    emit(log.V_xi[k]);
    out << ',' << log.phase[k] << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

namespace {

json event_json(const std::optional<double>& t) {
  if (t) return *t;
  return nullptr;
}

json excitation_json(const std::optional<Lemma4Check>& check) {
  if (!check) return nullptr;
  return json{{"stack_full_rank", check->stack_full_rank},
              {"stack_sigma_min", check->stack_sigma_min},
              {"interval", {check->report.t_start, check->report.t_end}},
              {"alpha", check->report.alpha},
              {"exciting", check->report.exciting}};
}

}  // namespace

json summarize_run(const RunLog& log, const SimConfig& config) {
  json out;
  out["mode"] = log.mode == Mode::proposed ? "proposed" : "classical_baseline";
  out["steps"] = log.steps();
  out["dt"] = log.dt;
  out["t_end"] = log.t.back();
  out["events"] = {{"t_c", event_json(log.events.t_c)},
                   {"t_s", event_json(log.events.t_s)},
                   {"t_m", event_json(log.events.t_m)}};

  double peak_e = 0.0, max_g = 0.0, max_phi_norm = 0.0;
  for (std::size_t k = 0; k < log.steps(); ++k) {
    peak_e = std::max(peak_e, log.norm_e[k]);
    max_g = std::max(max_g, log.g_residual[k]);
    max_phi_norm = std::max(max_phi_norm, norm2(log.phi_at(k)));
  }
  out["peak_norm_e"] = peak_e;
  out["initial"] = {{"norm_e", log.norm_e.front()},
                    {"norm_theta_tilde", log.norm_theta_tilde.front()},
                    {"norm_phi_tilde", log.norm_phi_tilde.front()}};
  out["final"] = {{"norm_e", log.norm_e.back()},
                  {"norm_theta_tilde", log.norm_theta_tilde.back()},
                  {"norm_phi_tilde", log.norm_phi_tilde.back()}};
  out["identities"] = {{"max_g_residual", max_g}, {"max_norm_phi", max_phi_norm}};

  if (log.mode == Mode::proposed) {
    const ConvergenceDiagnostics diag = convergence_diagnostics(log, config);
    out["diagnostics"] = {{"beta_rate", diag.beta_rate},
                          {"lambda_min_Q", diag.lambda_min_Q},
                          {"lambda_min_Omega_z", diag.lambda_min_Omega_z},
                          {"stack_sizes", {{"W", log.W.size()}, {"H", log.H.size()}}}};
    const ExcitationChecks checks = evaluate_excitation(log, config);
    out["excitation"] = {{"stack_W", excitation_json(checks.stack_W)},
                         {"stack_H", excitation_json(checks.stack_H)}};
  }
  return out;
}

std::size_t log_every_from_env() {
  const char* raw = std::getenv("MRAC_LOG_EVERY");
  if (!raw) return 1;
  const long v = std::strtol(raw, nullptr, 10);
  return v > 0 ? static_cast<std::size_t>(v) : 1;
}

namespace {

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NonFiniteState& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

void write_json_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("failed while writing " + path);
}

}  // namespace

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<double> dt_override, std::optional<double> t_end_override) {
  return guarded([&] {
    SimConfig cfg = load_scenario(scenario_path);
    if (dt_override) cfg.dt = *dt_override;
    if (t_end_override) cfg.t_end = *t_end_override;
    if (cfg.dt <= 0.0) throw ConfigInvalid("sim.dt", "must be positive");
    if (cfg.t_end <= cfg.t0) throw ConfigInvalid("sim.t_end", "must exceed t0");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);

    const RunLog log = run_closed_loop(cfg);
    write_trajectory_csv(log, out_dir + "/trajectory.csv", log_every_from_env());
    write_json_file(summarize_run(log, cfg), out_dir + "/summary.json");
  });
}

int cmd_compare(const std::string& scenario_path, const std::string& out_dir) {
  return guarded([&] {
    SimConfig cfg = load_scenario(scenario_path);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);

    SimConfig proposed_cfg = cfg;
    proposed_cfg.mode = Mode::proposed;
    SimConfig classical_cfg = cfg;
    classical_cfg.mode = Mode::classical_baseline;

    const RunLog proposed = run_closed_loop(proposed_cfg);
    const RunLog classical = run_closed_loop(classical_cfg);

    const std::size_t every = log_every_from_env();
    {
      std::ofstream out(out_dir + "/comparison.csv");
      if (!out) throw IoError("cannot write comparison.csv");
      out << "t,norm_e_proposed,norm_e_classical,norm_phi_tilde_proposed,norm_phi_tilde_classical\n";
      char buf[32];
      const auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
      };
      for (std::size_t k = 0; k < proposed.steps(); ++k) {
        if (k % every != 0 && k + 1 != proposed.steps()) continue;
        emit(proposed.t[k]);
        out << ',';
        emit(proposed.norm_e[k]);
        out << ',';
        emit(classical.norm_e[k]);
        out << ',';
        emit(proposed.norm_phi_tilde[k]);
        out << ',';
        emit(classical.norm_phi_tilde[k]);
        out << '\n';
      }
      if (!out) throw IoError("failed while writing comparison.csv");
    }

    json doc;
    doc["proposed"] = summarize_run(proposed, proposed_cfg);
    doc["classical"] = summarize_run(classical, classical_cfg);
    const double init_phi = proposed.norm_phi_tilde.front();
    const double prop_ratio = init_phi > 0.0 ? proposed.norm_phi_tilde.back() / init_phi : 0.0;
    const double classic_ratio = init_phi > 0.0 ? classical.norm_phi_tilde.back() / init_phi : 0.0;
    doc["verdict"] = {{"initial_norm_phi_tilde", init_phi},
                      {"proposed_final_ratio", prop_ratio},
                      {"classical_final_ratio", classic_ratio},
                      {"parameters_converge_only_with_memory", prop_ratio < 1e-3 && classic_ratio > 0.1}};
    write_json_file(doc, out_dir + "/summary.json");
  });
}

}  // namespace mrac
