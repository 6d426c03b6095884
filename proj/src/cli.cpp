#include "sdstab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "CLI11.hpp"

namespace sdstab::cli {

namespace {

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  std::string text = os.str();
  // Integral values keep a decimal point so they read as reals.
  if (std::isfinite(x) && text.find_first_of(".e") == std::string::npos) text += ".0";
  return text;
}

Json config_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  if (cfg.system_file) j["system"] = *cfg.system_file;
  if (cfg.example) j["example"] = *cfg.example;
  j["T"] = cfg.T;
  j["N_max"] = cfg.N_max;
  j["delta"] = cfg.delta;
  j["horizon"] = cfg.effective_horizon();
  j["steps_per_period"] = cfg.steps_per_period;
  if (cfg.sweep)
    j["sweep"] = {{"lo", cfg.sweep->lo}, {"hi", cfg.sweep->hi}, {"step", cfg.sweep->step}};
  j["epsilon"] = cfg.epsilon;
  j["N"] = cfg.N;
  j["grid_points"] = cfg.grid_points;
  j["seed"] = cfg.seed;
  j["loop"] = cfg.loop;
  j["feedback"] = cfg.feedback;
  j["gamma"] = cfg.gamma;
  j["modes"] = cfg.modes;
  j["s"] = cfg.s;
  j["c"] = cfg.c;
  j["xi_max"] = cfg.xi_max;
  return j;
}

Report new_report(const RunConfig& cfg) {
  Report r;
  r.json["schema"] = 1;
  r.json["command"] = cfg.command;
  r.json["library_version"] = library_version();
  r.json["numeric_backend"] = numeric_backend();
  r.json["config"] = config_json(cfg);
  return r;
}

void validate(const RunConfig& cfg) {
  require(cfg.T > 0.0, "--T must be positive");
  require(cfg.N_max >= 1, "--N-max must be at least 1");
  require(cfg.delta > 0.0 && cfg.delta < 1.0, "--delta must lie in (0,1)");
  require(cfg.effective_horizon() > 0.0, "--horizon must be positive");
  require(cfg.steps_per_period >= 1, "--steps-per-period must be at least 1");
  require(cfg.epsilon > 0.0, "--epsilon must be positive");
  require(cfg.N >= 1, "--N must be at least 1");
  require(cfg.modes >= 1, "--modes must be at least 1");
}

std::string dc_line(const ObservabilityCertificate& cert) {
  switch (cert.verdict) {
    case Verdict::kFeasible:
      if (cert.mode == ObservationMode::kContinuous)
        return "feasible (T_h = " + fmt(cert.horizon) + ", C = " + fmt(cert.C) + ")";
      return "feasible (N = " + std::to_string(cert.N) + ", C = " + fmt(cert.C) + ")";
    case Verdict::kInfeasible:
      return "infeasible (kernel norm " + fmt(cert.kernel_norm) + ")";
    case Verdict::kSearchExhausted:
      return "search-exhausted (best margin " + fmt(cert.margin) + ", kernel norm " +
             fmt(cert.kernel_norm) + ")";
  }
  return {};
}

Matrix damping_gain(const ContinuousSystem& sys, double gamma) {
  return -gamma * sys.B().adjoint();
}

struct Synthesis {
  SampledSystem sampled;
  RiccatiSolution riccati;
  std::optional<FeedbackGain> gain;
  std::optional<std::string> failure;
};

Synthesis synthesize(const ContinuousSystem& sys, double T) {
  Synthesis s{sample(sys, T), {}, std::nullopt, std::nullopt};
  s.riccati = riccati_solve(s.sampled);
  try {
    s.gain = feedback_gain(s.riccati, s.sampled);
  } catch (const Error& e) {
    s.failure = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return s;
}

Json trajectory_summary(const Trajectory& traj) {
  Json j;
  j["points"] = traj.times.size();
  j["final_time"] = traj.times.back();
  j["initial_norm"] = traj.states.front().norm();
  j["final_norm"] = traj.states.back().norm();
  j["omega"] = traj.decay_rate ? Json(*traj.decay_rate) : Json();
  j["c"] = traj.decay_constant ? Json(*traj.decay_constant) : Json();
  if (traj.decay_rate && std::isinf(*traj.decay_rate)) j["omega"] = "inf";
  return j;
}

}  // namespace

std::vector<double> SweepRange::values() const {
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double t = lo + static_cast<double>(k) * step;
    if (t > hi + 1e-9 * step) break;
    out.push_back(t);
  }
  return out;
}

SweepRange parse_sweep(const std::string& text) {
  SweepRange r;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':' ||
      !is.eof())
    throw Error(ErrorKind::kInvalidArgument, "--sweep expects LO:HI:STEP, got '" + text + "'");
  require(r.lo > 0.0 && r.hi >= r.lo && r.step > 0.0,
          "--sweep needs 0 < LO <= HI and STEP > 0");
  return r;
}

AnySystem load_system(const RunConfig& cfg) {
  require(cfg.system_file.has_value() != cfg.example.has_value(),
          "exactly one of --system or --example is required");
  if (cfg.system_file) {
    std::ifstream in(*cfg.system_file);
    require(in.good(), "cannot open system file '" + *cfg.system_file + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorKind::kInvalidArgument,
                  "system file is not valid JSON: " + std::string(e.what()));
    }
    return system_from_json(j);
  }
  const std::string& name = *cfg.example;
  if (name == "oscillator") return harmonic_oscillator();
  if (name == "frac-heat")
    return fractional_heat(cfg.modes, cfg.s, cfg.c,
                           std::vector<double>(static_cast<std::size_t>(cfg.modes), 1.0));
  if (name == "schrodinger") return schrodinger(cfg.modes, cfg.xi_max);
  throw Error(ErrorKind::kInvalidArgument, "unknown example '" + name + "'");
}

Report cmd_analyze(const RunConfig& cfg) {
  validate(cfg);
  Report r = new_report(cfg);
  const ContinuousSystem sys = dense_system(load_system(cfg));

  const auto dc = decide_dc(sys, cfg.T, cfg.N_max, cfg.delta);
  const auto cc = decide_cc(sys, cfg.T, cfg.delta);
  r.json["certificates"] = Json::array({to_json(dc), to_json(cc)});

  if (dc.feasible()) {
    constexpr int kSamples = 1000;
    const auto g = discrete_gramian(sys, cfg.T, dc.N);
    r.json["brute_force"] = {
        {"samples", kSamples},
        {"seed", cfg.seed},
        {"max_violation", sampled_violation(g, dc.C, dc.delta, kSamples, cfg.seed)}};
  }
  r.json["pathological_periods"] = pathological_periods(sys.A(), cfg.N_max * cfg.T);

  r.lines.push_back("(DC)_T: " + dc_line(dc));
  r.lines.push_back("(CC): " + dc_line(cc));
  if (dc.verdict == Verdict::kSearchExhausted) r.exit_code = kSearchExhausted;
  return r;
}

Report cmd_synthesize(const RunConfig& cfg) {
  validate(cfg);
  Report r = new_report(cfg);
  const ContinuousSystem sys = dense_system(load_system(cfg));
  const Synthesis s = synthesize(sys, cfg.T);
  r.json["sampled"] = {{"T", s.sampled.T},
                       {"Phi", to_json(s.sampled.Phi)},
                       {"D", to_json(s.sampled.D)}};
  r.json["riccati"] = to_json(s.riccati);
  if (s.gain) {
    r.json["gain"] = to_json(*s.gain);
    r.lines.push_back("riccati: converged in " + std::to_string(s.riccati.iterations) +
                      " iterations, residual " + fmt(s.riccati.residual));
    r.lines.push_back("gain: r(Phi + D F_K) = " + fmt(s.gain->spectral_radius));
  } else {
    r.json["error"] = *s.failure;
    r.lines.push_back("synthesis failed: " + *s.failure);
    r.exit_code = kNumericFailure;
  }
  return r;
}

Report cmd_simulate(const RunConfig& cfg) {
  validate(cfg);
  Report r = new_report(cfg);
  const ContinuousSystem sys = dense_system(load_system(cfg));
  const double T = cfg.T;
  const double horizon = cfg.effective_horizon();
  const double dt = T / cfg.steps_per_period;

  Matrix F;
  if (cfg.feedback == "zero") {
    F = Matrix::Zero(sys.input_dim(), sys.state_dim());
  } else if (cfg.feedback == "damping") {
    F = damping_gain(sys, cfg.gamma);
  } else if (cfg.feedback == "lq") {
    const Synthesis s = synthesize(sys, T);
    r.json["riccati"] = to_json(s.riccati);
    if (!s.gain) {
      r.json["error"] = *s.failure;
      r.lines.push_back("synthesis failed: " + *s.failure);
      r.exit_code = kNumericFailure;
      return r;
    }
    r.json["gain"] = to_json(*s.gain);
    F = s.gain->F;
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown --feedback '" + cfg.feedback + "'");
  }

  const Vector y0 = Vector::Ones(sys.state_dim()) /
                    std::sqrt(static_cast<double>(sys.state_dim()));
  Trajectory traj;
  std::string law_kind = "constant";
  if (cfg.loop == "dc") {
    traj = simulate_dc(sys, F, T, y0, horizon, cfg.steps_per_period);
  } else if (cfg.loop == "cc") {
    traj = simulate_cc(sys, F, y0, horizon, dt);
  } else if (cfg.loop == "dp" || cfg.loop == "cp") {
    const FeedbackLaw law = build_periodic_feedback(sys, F, T);
    law_kind = "periodic";
    traj = cfg.loop == "dp" ? simulate_dp(sys, law, y0, horizon, cfg.steps_per_period)
                            : simulate_cp(sys, law, y0, horizon, dt);
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown --loop '" + cfg.loop + "'");
  }
  attach_decay_fit(traj);

  r.json["loop"] = cfg.loop;
  r.json["trajectory"] = trajectory_summary(traj);
  Json header = {{"system_hash", system_hash(sys)},
                 {"law_kind", law_kind},
                 {"loop", cfg.loop},
                 {"T", T},
                 {"omega", r.json["trajectory"]["omega"]},
                 {"c", r.json["trajectory"]["c"]}};
  std::ostringstream csv;
  write_trajectory_csv(csv, traj, header);
  r.files["trajectory.csv"] = csv.str();
  r.lines.push_back(cfg.loop + ": omega = " + r.json["trajectory"]["omega"].dump() +
                    ", |y(T_end)|/|y0| = " +
                    fmt(traj.states.back().norm() / traj.states.front().norm()));
  return r;
}

Report cmd_sweep(const RunConfig& cfg) {
  validate(cfg);
  require(cfg.sweep.has_value(), "sweep needs --sweep LO:HI:STEP");
  Report r = new_report(cfg);
  const ContinuousSystem sys = dense_system(load_system(cfg));
  const std::vector<double> periods = cfg.sweep->values();

  std::vector<ObservabilityCertificate> certs(periods.size());
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < periods.size(); i += workers)
        certs[i] = decide_dc(sys, periods[i], cfg.N_max, cfg.delta);
    }));
  }
  for (auto& t : tasks) t.get();

  std::ostringstream csv;
  csv << "T,verdict,N,C,delta,margin,kernel_dim,kernel_norm\n" << std::setprecision(17);
  Json rows = Json::array();
  int infeasible = 0, exhausted = 0;
  for (const auto& cert : certs) {
    rows.push_back(to_json(cert));
    csv << cert.T << ',' << to_string(cert.verdict) << ',' << cert.N << ',' << cert.C
        << ',' << cert.delta << ',' << cert.margin << ',' << cert.kernel_dim << ','
        << cert.kernel_norm << '\n';
    if (cert.verdict == Verdict::kInfeasible) ++infeasible;
    if (cert.verdict == Verdict::kSearchExhausted) ++exhausted;
  }
  r.json["certificates"] = std::move(rows);
  r.json["pathological_periods"] = pathological_periods(sys.A(), cfg.sweep->hi);
  r.files["sweep.csv"] = csv.str();
  r.lines.push_back("sweep: " + std::to_string(certs.size()) + " periods, " +
                    std::to_string(infeasible) + " infeasible, " +
                    std::to_string(exhausted) + " search-exhausted");
  for (const auto& cert : certs)
    if (!cert.feasible())
      r.lines.push_back("  T = " + fmt(cert.T, 10) + ": " + dc_line(cert));
  return r;
}

Report cmd_witness(const RunConfig& cfg) {
  validate(cfg);
  Report r = new_report(cfg);
  const auto grid = witness_grid(cfg.T, cfg.N, cfg.epsilon, cfg.grid_points);
  const CounterexampleWitness w = schrodinger_witness(cfg.T, cfg.N, cfg.epsilon, grid);
  r.json["witness"] = to_json(w);
  r.json["witness"]["phi_norm"] = w.phi_norm;
  r.json["witness"]["quadrature_error"] = w.quadrature_error;

  // The same system is stabilized by continuous damping u = −γ y.
  const ContinuousSystem truncated = to_dense(schrodinger(cfg.modes, cfg.xi_max));
  const Matrix F = damping_gain(truncated, cfg.gamma);
  const Vector y0 = Vector::Ones(truncated.state_dim());
  const double horizon = cfg.effective_horizon();
  Trajectory traj = simulate_cc(truncated, F, y0, horizon, horizon / 400.0);
  attach_decay_fit(traj);
  r.json["cc_damping"] = {{"gamma", cfg.gamma}, {"omega", *traj.decay_rate}};

  r.lines.push_back("witness: observed " + fmt(w.observed) + " <= epsilon " +
                    fmt(cfg.epsilon) + " (bound " + fmt(w.bound) + ", |phi| = " +
                    fmt(w.phi_norm, 15) + ")");
  r.lines.push_back("(CC) damping gamma = " + fmt(cfg.gamma) + ": omega = " +
                    fmt(*traj.decay_rate));
  return r;
}

Report cmd_example(const RunConfig& cfg) {
  validate(cfg);
  require(cfg.example.has_value() && !cfg.system_file,
          "example needs --example {oscillator, frac-heat, schrodinger}");
  Report r = new_report(cfg);
  const AnySystem any = load_system(cfg);
  const ContinuousSystem sys = dense_system(any);
  if (const auto* spectral = std::get_if<SpectralSystem>(&any))
    r.json["spectral"] = to_json(*spectral);
  r.json["system"] = to_json(sys);

  Eigen::ComplexEigenSolver<Matrix> es(sys.A(), false);
  r.json["eigenvalues"] = to_json(Vector(es.eigenvalues()));
  Matrix ctrb(sys.state_dim(), sys.state_dim() * sys.input_dim());
  Matrix block = sys.B();
  for (Eigen::Index k = 0; k < sys.state_dim(); ++k) {
    ctrb.middleCols(k * sys.input_dim(), sys.input_dim()) = block;
    block = sys.A() * block;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(ctrb);
  r.json["controllability_rank"] = qr.rank();
  const double t_max = cfg.N_max * cfg.T;
  r.json["pathological_periods"] = pathological_periods(sys.A(), t_max);
  r.lines.push_back("example " + *cfg.example + ": n = " +
                    std::to_string(sys.state_dim()) + ", m = " +
                    std::to_string(sys.input_dim()) + ", rank [B, AB, ...] = " +
                    std::to_string(qr.rank()));

  if (*cfg.example == "oscillator") {
    const DetLambda det = det_lambda(cfg.T);
    r.json["det_lambda"] = {{"T", cfg.T},
                            {"closed_form", det.closed_form},
                            {"assembled", det.assembled}};
    r.lines.push_back("det(Lambda) at T = " + fmt(cfg.T) + ": " + fmt(det.closed_form));
  } else if (*cfg.example == "schrodinger") {
    const auto& spectral = std::get<SpectralSystem>(any);
    const Vector diag = semigroup(spectral, cfg.T);
    r.json["max_modulus_defect"] = (diag.cwiseAbs().array() - 1.0).abs().maxCoeff();
  } else {
    const Vector ev = std::get<SpectralSystem>(any).eigenvalues();
    r.json["unstable_modes"] = (ev.real().array() > 0.0).count();
  }
  return r;
}

Report dispatch(const RunConfig& cfg) {
  if (cfg.command == "analyze") return cmd_analyze(cfg);
  if (cfg.command == "synthesize") return cmd_synthesize(cfg);
  if (cfg.command == "simulate") return cmd_simulate(cfg);
  if (cfg.command == "sweep") return cmd_sweep(cfg);
  if (cfg.command == "witness") return cmd_witness(cfg);
  if (cfg.command == "example") return cmd_example(cfg);
  throw Error(ErrorKind::kInvalidArgument, "unknown command '" + cfg.command + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampled-data stabilizability: decide, synthesize, simulate"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string sweep_text;

  auto add_common = [&](CLI::App* sub) {
    auto* sys_opt = sub->add_option("--system", cfg.system_file, "System JSON file");
    auto* ex_opt = sub->add_option("--example", cfg.example, "Built-in example")
                       ->check(CLI::IsMember({"oscillator", "frac-heat", "schrodinger"}));
    sys_opt->excludes(ex_opt);
    sub->add_option("--T", cfg.T, "Sampling period");
    sub->add_option("--N-max", cfg.N_max, "Largest horizon N searched");
    sub->add_option("--delta", cfg.delta, "Target delta in (0,1)");
    sub->add_option("--horizon", cfg.horizon, "Simulation horizon (default 40 T)");
    sub->add_option("--steps-per-period", cfg.steps_per_period, "Grid points per period");
    sub->add_option("--sweep", sweep_text, "Period grid LO:HI:STEP");
    sub->add_option("--epsilon", cfg.epsilon, "Witness tolerance");
    sub->add_option("--N", cfg.N, "Witness horizon in periods");
    sub->add_option("--grid-points", cfg.grid_points, "Witness grid points");
    sub->add_option("--out", cfg.out_dir, "Output directory");
    sub->add_option("--seed", cfg.seed, "Seed for randomized checks");
    sub->add_option("--loop", cfg.loop, "Closed loop: dc, cc, dp, cp")
        ->check(CLI::IsMember({"dc", "cc", "dp", "cp"}));
    sub->add_option("--feedback", cfg.feedback, "Gain: lq, zero, damping")
        ->check(CLI::IsMember({"lq", "zero", "damping"}));
    sub->add_option("--gamma", cfg.gamma, "Damping gain scale");
    sub->add_option("--modes", cfg.modes, "Truncation size of spectral examples");
    sub->add_option("--s", cfg.s, "Fractional order (frac-heat)");
    sub->add_option("--c", cfg.c, "Shift (frac-heat)");
    sub->add_option("--xi-max", cfg.xi_max, "Largest frequency (schrodinger)");
    sub->add_flag("--timing", cfg.timing, "Record wall time in the report");
  };
  for (const char* name : {"analyze", "synthesize", "simulate", "sweep", "witness", "example"})
    add_common(app.add_subcommand(name, std::string("Run ") + name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (!sweep_text.empty()) cfg.sweep = parse_sweep(sweep_text);
    const auto start = std::chrono::steady_clock::now();
    Report report = dispatch(cfg);
    if (cfg.timing)
      report.json["wall_time_s"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);
    std::ofstream(dir / "report.json") << report.json.dump(2) << '\n';
    for (const auto& [name, text] : report.files) std::ofstream(dir / name) << text;
    for (const auto& line : report.lines) out << line << '\n';
    return report.exit_code;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::kInvalidArgument ? kConfigError : kNumericFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace sdstab::cli
