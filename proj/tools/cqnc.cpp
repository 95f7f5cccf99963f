// Command-line front end: spectra, power sweeps, matching, simulation and the
// self-validation report.  Exit codes: 0 success, 2 config or parameter error,
// 3 numerical failure, 4 validation failure.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqnc/analysis.hpp"
#include "cqnc/config.hpp"
#include "cqnc/constants.hpp"
#include "cqnc/errors.hpp"
#include "cqnc/series_io.hpp"
#include "cqnc/spectra.hpp"
#include "cqnc/timesim.hpp"
#include "cqnc/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cqnc;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_validation = 4;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;

  json to_json(const SystemParams& params) const {
    std::ostringstream ini;
    write_config(ini, params.inputs());
    json j;
    j["tool"] = "cqnc";
    j["version"] = CQNC_VERSION;
    j["timestamp_utc"] = utc_timestamp();
    j["command"] = command;
    j["argv"] = argv;
    j["config_path"] = config_path;
    j["resolved_config_ini"] = ini.str();
    j["params"] = params_to_json(params);
    if (seed) j["seed"] = *seed;
    j["outputs"] = outputs;
    return j;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
  if (!os) throw ConfigError("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path prepare_dir(const std::string& out) {
  const fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + out + ": " + ec.message());
  return dir;
}

void finish(const fs::path& dir, RunManifest& manifest, const SystemParams& params) {
  write_json(dir / "manifest.json", manifest.to_json(params));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::optional<FrequencyWindow> window_from(const std::vector<double>& w, const SystemParams& p) {
  if (w.empty()) return std::nullopt;
  return FrequencyWindow{w[0] * p.Omega(), w[1] * p.Omega()};
}

SystemParams load(const std::string& path, std::optional<double> mass) {
  ParamSet ps = load_config(path);
  if (mass) ps.mechanical.mass = *mass;
  return SystemParams(ps);
}

void warn_if_unmatched(const SystemParams& params, const std::vector<Variant>& variants,
                       const std::optional<FrequencyWindow>& window) {
  for (const auto& v : variants) {
    if (v.kind != VariantKind::cqnc && v.kind != VariantKind::gamma_mismatch &&
        v.kind != VariantKind::coupling_mismatch) {
      continue;
    }
    const auto report = match_cqnc(params, window.value_or(default_window(params)));
    if (report.status == MatchStatus::warning) {
      std::cerr << "warning: matching residual " << report.residual_curve << " exceeds "
                << match_warning_threshold << " over the window\n";
    }
    return;
  }
}

// spectrum ------------------------------------------------------------------

struct SpectrumArgs {
  std::string config, out, variants;
  double omega_min = 0.1, omega_max = 10.0;
  std::size_t points = 401;
  std::vector<double> window;
  std::optional<double> mass;
};

int run_spectrum(const SpectrumArgs& a, RunManifest& manifest) {
  const SystemParams params = load(a.config, a.mass);
  const auto variants = parse_variants(split_list(a.variants));
  const auto window = window_from(a.window, params);
  const auto omegas = log_grid(a.omega_min * params.Omega(), a.omega_max * params.Omega(), a.points);
  warn_if_unmatched(params, variants, window);
  SpectrumSeries series = frequency_sweep(params, omegas, variants, window);
  if (a.mass) series = to_physical(series, params);

  const fs::path dir = prepare_dir(a.out);
  write_csv(dir / "spectrum.csv", series);
  json j = to_json(series, params.Omega());
  j["variants"] = split_list(a.variants);
  write_json(dir / "spectrum.json", j);
  manifest.outputs = {(dir / "spectrum.csv").string(), (dir / "spectrum.json").string()};
  finish(dir, manifest, params);
  std::cout << "wrote " << series.omegas.size() << " frequencies x " << series.channels.size()
            << " channels (" << to_string(series.units) << ") to " << dir.string() << "\n";
  return exit_ok;
}

// power-sweep ---------------------------------------------------------------

struct PowerArgs {
  std::string config, out, gains = "0.1,0.3";
  double p_min = 1e-15, p_max = 1e-6, omega = 1.0;
  std::size_t points = 91;
};

json sweep_json(const SweepResult& r) {
  return {{"channel", r.channel},        {"argmin_w", r.argmin},   {"min_value", r.min_value},
          {"grid_argmin", r.grid_argmin}, {"interior", r.interior}, {"refined", r.refined}};
}

int run_power_sweep(const PowerArgs& a, RunManifest& manifest) {
  const SystemParams params = load(a.config, std::nullopt);
  const auto powers = log_grid(a.p_min, a.p_max, a.points);
  const double omega = a.omega * params.Omega();

  std::vector<double> gains;
  for (const auto& g : split_list(a.gains)) {
    try {
      std::size_t used = 0;
      gains.push_back(std::stod(g, &used));
      if (used != g.size()) throw std::invalid_argument(g);
    } catch (const std::logic_error&) {
      throw ParameterError("invalid gain: " + g);
    }
  }
  std::sort(gains.begin(), gains.end());

  std::vector<SweepResult> results{power_sweep(params, powers, omega, parse_variant("standard"))};
  for (double g : gains) {
    results.push_back(power_sweep(params, powers, omega, Variant{VariantKind::opa_hybrid, g}));
  }

  const fs::path dir = prepare_dir(a.out);
  std::ostringstream csv;
  csv << "power_w";
  for (const auto& r : results) csv << ',' << r.channel;
  csv << '\n';
  for (std::size_t i = 0; i < powers.size(); ++i) {
    csv << format_double(powers[i]);
    for (const auto& r : results) csv << ',' << format_double(r.spectra_at[i]);
    csv << '\n';
  }
  write_text(dir / "power_sweep.csv", csv.str());

  json summary;
  summary["omega_rad_s"] = omega;
  summary["omega_over_Omega"] = a.omega;
  summary["channels"] = json::array();
  for (const auto& r : results) summary["channels"].push_back(sweep_json(r));
  if (gains.size() >= 2) {
    bool decreasing = true;
    bool interior = true;
    json argmins = json::array();
    for (std::size_t k = 1; k < results.size(); ++k) {
      argmins.push_back(results[k].argmin);
      interior = interior && results[k].interior;
      if (k > 1 && !(results[k].argmin < results[k - 1].argmin)) decreasing = false;
    }
    summary["gain_ordering"] = {{"gains_over_kappa", gains},
                                {"argmin_w", argmins},
                                {"all_interior", interior},
                                {"argmin_strictly_decreasing_with_gain", interior && decreasing}};
  }
  write_json(dir / "power_sweep.json", summary);
  manifest.outputs = {(dir / "power_sweep.csv").string(), (dir / "power_sweep.json").string()};
  finish(dir, manifest, params);

  for (const auto& r : results) {
    std::printf("%-18s argmin %.6g W  min %.6g  %s\n", r.channel.c_str(), r.argmin, r.min_value,
                r.interior ? (r.refined ? "interior, refined" : "interior") : "at grid edge");
  }
  return exit_ok;
}

// match ---------------------------------------------------------------------

struct MatchArgs {
  std::string config, out;
  std::vector<double> window{0.5, 2.0};
};

json match_json(const MatchReport& r, const SystemParams& original) {
  const auto& m = r.matched_params;
  return {
      {"window_rad_s", {r.window.lo, r.window.hi}},
      {"window_over_Omega", {r.window.lo / original.Omega(), r.window.hi / original.Omega()}},
      {"status", r.status == MatchStatus::ok ? "ok" : "warning"},
      {"residual_curve", r.residual_curve},
      {"seed_residual", r.seed_residual},
      {"seed_residual_at_Omega", r.seed_residual_at_Omega},
      {"wrong_sign_residual", r.wrong_sign_residual},
      {"detuning_sign", r.detuning_sign},
      {"relative_shift_from_seed",
       {{"gamma_M", r.gamma_M_shift}, {"Delta_M", r.Delta_M_shift}, {"coupling", r.coupling_shift}}},
      {"iterations", r.iterations},
      {"matched",
       {{"gamma_M_hz", rad_to_hz(m.gamma_M())},
        {"detuning_M_hz", rad_to_hz(m.Delta_M())},
        {"coupling_hz", rad_to_hz(m.magnon_coupling())},
        {"coupling_convention", std::string(to_string(m.inputs().couplings.convention))}}},
      {"matched_params", params_to_json(m)},
  };
}

int run_match(const MatchArgs& a, RunManifest& manifest) {
  const SystemParams params = load(a.config, std::nullopt);
  const auto report = match_cqnc(params, *window_from(a.window, params));
  const fs::path dir = prepare_dir(a.out);
  write_json(dir / "match.json", match_json(report, params));
  std::ofstream ini(dir / "matched.ini");
  write_config(ini, report.matched_params.inputs());
  manifest.outputs = {(dir / "match.json").string(), (dir / "matched.ini").string()};
  finish(dir, manifest, params);
  std::printf("residual over window %.3g (seed %.3g), wrong-sign residual %.4g, status %s\n",
              report.residual_curve, report.seed_residual, report.wrong_sign_residual,
              report.status == MatchStatus::ok ? "ok" : "warning");
  return exit_ok;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string config, out, integrator = "exact";
  std::uint64_t seed = 1;
  double duration = 0.0, dt_times_Omega = 0.5, burn_in = 0.1, overlap = 0.5;
  int segments = 8;
  bool allow_short = false, vacuum_floor = false, dump = false;
  std::size_t stride = 1;
};

void write_trajectory(const fs::path& path, const Trajectory& t) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << "t_s";
  for (auto label : state::labels) os << ',' << label;
  os << '\n';
  for (Eigen::Index i = 0; i < t.states.cols(); ++i) {
    os << format_double(t.times[static_cast<std::size_t>(i)]);
    for (Eigen::Index r = 0; r < t.states.rows(); ++r) os << ',' << format_double(t.states(r, i));
    os << '\n';
  }
}

int run_simulate(const SimulateArgs& a, RunManifest& manifest) {
  const SystemParams params = load(a.config, std::nullopt);
  SimConfig cfg;
  cfg.dt = a.dt_times_Omega / params.Omega();
  cfg.duration = a.duration > 0 ? a.duration : min_duration_periods * two_pi / params.gamma_m();
  cfg.seed = a.seed;
  cfg.burn_in = a.burn_in;
  cfg.welch_segments = a.segments;
  cfg.welch_overlap = a.overlap;
  cfg.allow_short_duration = a.allow_short;
  cfg.thermal_vacuum_floor = a.vacuum_floor;
  cfg.state_stride = a.stride;
  if (a.integrator == "exact") {
    cfg.integrator = Integrator::exact;
  } else if (a.integrator == "euler-maruyama") {
    cfg.integrator = Integrator::euler_maruyama;
  } else {
    throw ParameterError("integrator must be exact or euler-maruyama");
  }
  if (cfg.welch_segments < 8) throw ParameterError("at least 8 Welch segments are required");

  const fs::path dir = prepare_dir(a.out);
  manifest.seed = a.seed;
  SpectrumSeries psd;
  if (a.dump) {
    const auto t = simulate(params, cfg);
    psd = estimate_psd(t, cfg, params);
    write_trajectory(dir / "trajectory.csv", t);
    manifest.outputs.push_back((dir / "trajectory.csv").string());
  } else {
    const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
    const auto start = static_cast<std::size_t>(std::ceil(cfg.burn_in * static_cast<double>(steps)));
    const std::size_t length = welch_segment_length(steps - start, cfg.welch_segments, cfg.welch_overlap);
    if (length < 16) throw ParameterError("too few samples after burn-in for the Welch segments");
    psd = psd_series(stream_psd(params, cfg, length), params, cfg.integrator);
  }
  write_csv(dir / "psd.csv", psd);
  manifest.outputs.push_back((dir / "psd.csv").string());
  finish(dir, manifest, params);
  std::cout << "wrote " << psd.omegas.size() << " PSD bins to " << (dir / "psd.csv").string() << "\n";
  return exit_ok;
}

// validate ------------------------------------------------------------------

struct ValidateArgs {
  std::string config, out;
  std::uint64_t seed = 1;
  double duration = 0.0;
  int trajectories = 4;
  bool allow_short = false;
};

const char* mark(bool pass) { return pass ? "PASS" : "FAIL"; }

int run_validate(const ValidateArgs& a, RunManifest& manifest) {
  const SystemParams params = load(a.config, std::nullopt);
  manifest.seed = a.seed;
  json report;
  bool hard_failure = false;

  const auto grid = log_grid(1e-3 * params.Omega(), 1e3 * params.Omega(), 200);
  const auto oracle = oracle_equivalence(params, grid);
  const bool oracle_ok = oracle.max_relative_error <= oracle_tolerance;
  hard_failure |= !oracle_ok;
  std::printf("(a) closed form vs matrix oracle   max rel err %-10.3g (<= %g)          %s\n",
              oracle.max_relative_error, oracle_tolerance, mark(oracle_ok));
  report["oracle"] = {{"max_relative_error", oracle.max_relative_error},
                      {"worst_omega_rad_s", oracle.worst_omega},
                      {"worst_channel", oracle.worst_channel},
                      {"points", oracle.points},
                      {"tolerance", oracle_tolerance},
                      {"passed", oracle_ok}};

  if (params.g() > 0) {
    const auto match = match_cqnc(params);
    const bool ok = match.status == MatchStatus::ok;
    std::printf("(b) CQNC residual after match      %-10.3g (<= %g)          %s\n", match.residual_curve,
                match_warning_threshold, ok ? "PASS" : "WARN");
    report["match"] = match_json(match, params);
  } else {
    std::printf("(b) CQNC residual after match      skipped: no transduction (g = 0)\n");
    report["match"] = {{"skipped", "no transduction (g = 0)"}};
  }

  TimeDomainOptions options;
  options.seed = a.seed;
  options.total_duration = a.duration;
  options.trajectories = a.trajectories;
  options.allow_short_duration = a.allow_short;
  const auto td = time_domain_check(params, options);
  if (td.skipped) {
    std::printf("(c) time-domain PSD vs closed form skipped: %s\n", td.skipped->c_str());
    report["time_domain"] = {{"skipped", *td.skipped}};
  } else {
    hard_failure |= !(td.psd_passed && td.variance_passed);
    std::printf("(c) time-domain PSD vs closed form max band dev %-7.3g (< %g)        %s\n",
                td.max_band_deviation, options.psd_tolerance, mark(td.psd_passed));
    if (td.variance_skipped) {
      std::printf("    steady-state variances         skipped: %s\n", td.variance_skipped->c_str());
    } else {
      std::printf("    steady-state variances         max |z| %-10.3g (< %g)          %s\n",
                  td.max_variance_z, options.variance_sigmas, mark(td.variance_passed));
    }
    json bands = json::array();
    for (const auto& b : td.bands) {
      bands.push_back({{"lo_rad_s", b.lo}, {"hi_rad_s", b.hi}, {"bins", b.bins},
                       {"simulated", b.simulated}, {"closed_form", b.closed_form},
                       {"standard_error", b.standard_error}, {"deviation", b.deviation()}});
    }
    json variances = json::array();
    for (const auto& v : td.variances) {
      variances.push_back({{"state", v.state}, {"simulated", v.simulated}, {"lyapunov", v.lyapunov},
                           {"standard_error", v.standard_error}, {"z", v.z()}});
    }
    report["time_domain"] = {{"dt_s", td.dt},
                             {"burn_in_s", td.burn_in_time},
                             {"duration_per_trajectory_s", td.duration_per_trajectory},
                             {"trajectories", td.trajectories},
                             {"welch_segments", td.segments},
                             {"bands", bands},
                             {"variances", variances},
                             {"psd_passed", td.psd_passed},
                             {"variance_passed", td.variance_passed}};
    if (td.variance_skipped) report["time_domain"]["variance_skipped"] = *td.variance_skipped;
  }

  if (params.g() > 0) {
    const auto opt = standard_optimum(params, params.Omega());
    std::printf("(d) standard-sensor optimum / SQL  value ratio %.10g, argmin ratio %.10g  INFO\n",
                opt.value_ratio_to_sql, opt.argmin_ratio_to_g_sql);
    report["standard_optimum"] = {{"omega_rad_s", opt.omega},
                                  {"g_opt_rad_s", opt.g_opt},
                                  {"min_value", opt.min_value},
                                  {"first_order_residual", opt.first_order_residual},
                                  {"value_ratio_to_sql", opt.value_ratio_to_sql},
                                  {"argmin_ratio_to_g_sql", opt.argmin_ratio_to_g_sql}};
  }
  report["passed"] = !hard_failure;

  if (!a.out.empty()) {
    const fs::path dir = prepare_dir(a.out);
    write_json(dir / "validate.json", report);
    manifest.outputs = {(dir / "validate.json").string()};
    finish(dir, manifest, params);
  }
  return hard_failure ? exit_validation : exit_ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Force-noise spectra of an optomechanical sensor with OPA and magnon ancilla"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CQNC_VERSION));
  std::optional<double> mass;

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand("spectrum", "force-referred noise spectra over frequency");
  spectrum->add_option("-c,--config", sa.config, "INI parameter file")->required()->check(CLI::ExistingFile);
  spectrum->add_option("--variants", sa.variants, "comma-separated variants: " + valid_variant_names())
      ->required();
  spectrum->add_option("--omega-min", sa.omega_min, "lowest frequency in units of Omega")->capture_default_str();
  spectrum->add_option("--omega-max", sa.omega_max, "highest frequency in units of Omega")->capture_default_str();
  spectrum->add_option("--points", sa.points, "log-spaced grid points")->capture_default_str();
  spectrum->add_option("--window", sa.window, "matching window lo hi in units of Omega")->expected(2);
  spectrum->add_option("--mass", mass, "effective mass (kg); output in N^2/Hz");
  spectrum->add_option("-o,--out", sa.out, "output directory")->required();

  PowerArgs pa;
  auto* power = app.add_subcommand("power-sweep", "resonant spectrum versus input power");
  power->add_option("-c,--config", pa.config, "INI parameter file")->required()->check(CLI::ExistingFile);
  power->add_option("--p-min", pa.p_min, "lowest power (W)")->capture_default_str();
  power->add_option("--p-max", pa.p_max, "highest power (W)")->capture_default_str();
  power->add_option("--points", pa.points, "log-spaced power points")->capture_default_str();
  power->add_option("--gains", pa.gains, "comma-separated OPA gains in units of kappa")->capture_default_str();
  power->add_option("--omega", pa.omega, "evaluation frequency in units of Omega")->capture_default_str();
  power->add_option("-o,--out", pa.out, "output directory")->required();

  MatchArgs ma;
  auto* match = app.add_subcommand("match", "back-action cancellation matching");
  match->add_option("-c,--config", ma.config, "INI parameter file")->required()->check(CLI::ExistingFile);
  match->add_option("--window", ma.window, "window lo hi in units of Omega")->expected(2)->capture_default_str();
  match->add_option("-o,--out", ma.out, "output directory")->required();

  SimulateArgs si;
  auto* sim = app.add_subcommand("simulate", "stochastic simulation and Welch PSD estimate");
  sim->add_option("-c,--config", si.config, "INI parameter file")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", si.seed, "random seed")->capture_default_str();
  sim->add_option("--duration", si.duration, "simulated time (s); default 100 * 2pi/gamma_m");
  sim->add_option("--dt", si.dt_times_Omega, "step in units of 1/Omega")->capture_default_str();
  sim->add_option("--burn-in", si.burn_in, "discarded initial fraction")->capture_default_str();
  sim->add_option("--segments", si.segments, "Welch segments (>= 8)")->capture_default_str();
  sim->add_option("--overlap", si.overlap, "Welch overlap fraction")->capture_default_str();
  sim->add_option("--integrator", si.integrator, "exact or euler-maruyama")->capture_default_str();
  sim->add_flag("--allow-short-duration", si.allow_short, "permit durations below 100 * 2pi/gamma_m");
  sim->add_flag("--thermal-vacuum-floor", si.vacuum_floor, "thermal force variance n + 1/2");
  sim->add_flag("--trajectory", si.dump, "also write the state trajectory");
  sim->add_option("--stride", si.stride, "keep every k-th state in the trajectory")->capture_default_str();
  sim->add_option("-o,--out", si.out, "output directory")->required();

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "self-consistency report");
  validate->add_option("-c,--config", va.config, "INI parameter file")->required()->check(CLI::ExistingFile);
  validate->add_option("--seed", va.seed, "first trajectory seed")->capture_default_str();
  validate->add_option("--duration", va.duration, "total simulated time after burn-in (s); default 100 * 2pi/gamma_m");
  validate->add_option("--trajectories", va.trajectories, "independent trajectories")->capture_default_str();
  validate->add_flag("--allow-short-duration", va.allow_short, "permit durations below 100 * 2pi/gamma_m");
  validate->add_option("-o,--out", va.out, "optional output directory for validate.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  RunManifest manifest;
  manifest.argv.assign(argv, argv + argc);
  try {
    if (*spectrum) {
      manifest.command = "spectrum";
      manifest.config_path = sa.config;
      sa.mass = mass;
      return run_spectrum(sa, manifest);
    }
    if (*power) {
      manifest.command = "power-sweep";
      manifest.config_path = pa.config;
      return run_power_sweep(pa, manifest);
    }
    if (*match) {
      manifest.command = "match";
      manifest.config_path = ma.config;
      return run_match(ma, manifest);
    }
    if (*sim) {
      manifest.command = "simulate";
      manifest.config_path = si.config;
      return run_simulate(si, manifest);
    }
    manifest.command = "validate";
    manifest.config_path = va.config;
    return run_validate(va, manifest);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numerical;
  }
}
