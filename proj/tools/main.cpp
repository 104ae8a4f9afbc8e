// franson: command-line driver for the local-hidden-variable simulation of
// the ideal two-photon Franson interferometer. Subcommands print JSON on
// stdout; bulk data goes to CSV files. Exit codes: 0 success, 1 a
// verification or fit failed, 2 usage or configuration error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "franson/analysis.hpp"
#include "franson/config.hpp"
#include "franson/montecarlo.hpp"
#include "franson/phase.hpp"
#include "franson/quantum.hpp"
#include "franson/timing.hpp"
#include "franson/verify.hpp"

namespace {

using franson::Config;
using ordered_json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

ordered_json quad_json(const franson::qm::ProbabilityQuad& quad) {
  return {{"p1", quad.p1}, {"p2", quad.p2}, {"p3", quad.p3}, {"p4", quad.p4}};
}

void print_json(const ordered_json& payload) {
  std::printf("%s\n", payload.dump(2).c_str());
}

int usage_error(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return 2;
}

std::ofstream open_output(const std::string& path) {
  if (path.empty()) {
    throw std::invalid_argument("no output file given (--out)");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot open \"" + path + "\" for writing");
  }
  return out;
}

int run_qm(const Config& cfg, std::optional<double> sum_phase,
           std::optional<double> delta_l_um) {
  if (sum_phase.has_value() == delta_l_um.has_value()) {
    return usage_error("qm needs exactly one of --sum-phase / --delta-l");
  }
  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "qm";
  double total_phase = 0.0;
  if (delta_l_um) {
    const auto setting = franson::qm::ExperimentSetting::from_arm_imbalance(
        *delta_l_um, cfg.lambda_p_um);
    total_phase = setting.total_phase();
    out["delta_l_um"] = *delta_l_um;
    out["lambda_p_um"] = cfg.lambda_p_um;
  } else {
    total_phase = *sum_phase;
  }
  out["sum_phase"] = total_phase;
  out["delta"] = franson::wrap_phase(total_phase - franson::kPi / 2.0);

  const auto closed = franson::qm::closed_form_probabilities(total_phase);
  const auto projected = franson::qm::projected_probabilities(
      {0.5 * total_phase, 0.5 * total_phase});
  double max_diff = 0.0;
  for (int c = 1; c <= 4; ++c) {
    max_diff =
        std::max(max_diff, std::abs(closed.channel(c) - projected.channel(c)));
  }
  out["closed_form"] = quad_json(closed);
  out["projection"] = quad_json(projected);
  out["max_difference"] = max_diff;
  print_json(out);
  return 0;
}

int run_scan(const Config& cfg, double from_um, double to_um, double step_um,
             std::uint64_t n_per_point, int channel, const std::string& out_path,
             unsigned threads) {
  if (!(step_um > 0.0)) return usage_error("scan needs --step > 0");
  if (!(to_um > from_um)) return usage_error("scan needs --to > --from");
  if (n_per_point < 1) return usage_error("scan needs --n-per-point >= 1");

  const auto n_steps =
      static_cast<std::size_t>(std::floor((to_um - from_um) / step_um + 1e-9));
  std::vector<double> grid(n_steps + 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = from_um + static_cast<double>(i) * step_um;
  }

  const franson::mc::RunSpec spec{cfg.seed, n_per_point, cfg.batch_size};
  const franson::analysis::FringeScan scan =
      franson::analysis::scan_fringes(grid, spec, cfg.scales(), threads);
  {
    std::ofstream out = open_output(out_path);
    franson::analysis::write_fringe_csv(scan, out);
  }

  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "scan";
  out["points"] = grid.size();
  out["n_per_point"] = n_per_point;
  out["seed"] = cfg.seed;
  out["channel"] = channel;
  out["csv"] = out_path;
  try {
    const franson::analysis::FringeFit fit =
        franson::analysis::fit_fringe(scan, channel);
    out["fit"] = {{"offset", fit.offset},
                  {"amplitude", fit.amplitude},
                  {"period_um", fit.period_um},
                  {"phase0", fit.phase0},
                  {"visibility", fit.visibility},
                  {"residual_rms", fit.residual_rms},
                  {"amplitude_stderr", fit.amplitude_stderr},
                  {"iterations", fit.iterations}};
  } catch (const franson::analysis::FitFailure& e) {
    out["fit_error"] = e.what();
    out["best_residual_rms"] = e.best_residual_rms();
    print_json(out);
    return 1;
  }
  print_json(out);
  return 0;
}

int run_verify(const Config& cfg, const std::string& suite_arg,
               unsigned threads) {
  const auto suite = franson::verify::parse_suite(suite_arg);
  if (!suite) return usage_error("unknown suite \"" + suite_arg + "\"");
  const franson::verify::Report report =
      franson::verify::run_suite(*suite, cfg.seed, threads);

  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "verify";
  out["suite"] = franson::verify::suite_name(*suite);
  out["seed"] = cfg.seed;
  out["passed"] = report.passed();
  ordered_json checks = ordered_json::array();
  for (const auto& check : report.checks) {
    checks.push_back({{"name", check.name},
                      {"observed", check.observed},
                      {"bound", check.bound},
                      {"pass", check.pass}});
  }
  out["checks"] = checks;
  print_json(out);
  return report.passed() ? 0 : 1;
}

int run_timing(const Config& cfg, std::uint64_t n, double window_ns,
               const std::string& out_path, unsigned threads) {
  if (n < 1) return usage_error("timing needs --n >= 1");
  const franson::timing::TimingScales scales = cfg.scales();
  const franson::timing::DifferenceHistogram hist =
      franson::timing::time_difference_histogram(n, scales, window_ns,
                                                 cfg.seed, threads);
  {
    std::ofstream out = open_output(out_path);
    franson::analysis::write_histogram_csv(hist, out);
  }

  const double total = static_cast<double>(hist.n_total);
  const auto bin_json = [&](double center, std::uint64_t count) {
    const double mass = static_cast<double>(count) / total;
    return ordered_json{
        {"center_ns", center},
        {"count", count},
        {"mass", mass},
        {"ci_half_width", 4.0 * std::sqrt(mass * (1.0 - mass) / total)}};
  };
  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "timing";
  out["n"] = hist.n_total;
  out["window_ns"] = window_ns;
  out["arm_delay_ns"] = scales.arm_delay_ns();
  out["seed"] = cfg.seed;
  out["csv"] = out_path;
  out["bins"] = ordered_json::array({bin_json(-scales.arm_delay_ns(), hist.n_minus),
                                     bin_json(0.0, hist.n_zero),
                                     bin_json(+scales.arm_delay_ns(), hist.n_plus)});
  out["n_outside"] = hist.n_outside;
  out["verdict_agreement"] =
      static_cast<double>(hist.n_verdict_agree) / total;
  print_json(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Local-hidden-variable simulation of the ideal two-photon Franson "
      "interferometer"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  auto* opt_config = app.add_option(
      "--config", config_path, "JSON config file; explicit flags override it");
  auto* opt_seed = app.add_option("--seed", seed, "base RNG seed");
  app.add_option("--threads", threads,
                 "worker threads (0 = all cores); never affects results");

  auto* cmd_qm = app.add_subcommand(
      "qm", "Print the four outcome probabilities for one setting");
  cmd_qm->fallthrough();
  double sum_phase = 0.0;
  double qm_delta_l = 0.0;
  auto* opt_sum_phase = cmd_qm->add_option(
      "--sum-phase", sum_phase, "total phase phi_A + phi_B in radians");
  auto* opt_qm_delta_l = cmd_qm->add_option(
      "--delta-l", qm_delta_l, "arm imbalance in micrometers");

  auto* cmd_scan = app.add_subcommand(
      "scan", "Monte Carlo fringe scan over the arm imbalance, CSV + fit");
  cmd_scan->fallthrough();
  double from_um = 0.0;
  double to_um = 1.5;
  double step_um = 0.05;
  std::uint64_t n_per_point = 0;
  int channel = 1;
  std::string scan_out;
  cmd_scan->add_option("--from", from_um, "first arm imbalance, micrometers");
  cmd_scan->add_option("--to", to_um, "last arm imbalance, micrometers");
  cmd_scan->add_option("--step", step_um, "grid step, micrometers");
  auto* opt_n_per_point = cmd_scan->add_option("--n-per-point", n_per_point,
                                               "trials per grid point");
  cmd_scan->add_option("--channel", channel, "event class fitted (1-4)")
      ->check(CLI::Range(1, 4));
  auto* opt_scan_out =
      cmd_scan->add_option("--out", scan_out, "output CSV path");

  auto* cmd_verify =
      app.add_subcommand("verify", "Run an invariant suite and report");
  cmd_verify->fallthrough();
  std::string suite_arg;
  cmd_verify->add_option("--suite", suite_arg,
                         "density|transform|measure|oracle|timing|all")
      ->required();

  auto* cmd_timing = app.add_subcommand(
      "timing", "Arrival-time-difference histogram at physical scales");
  cmd_timing->fallthrough();
  std::uint64_t timing_n = 0;
  double window_ns = 0.0;
  std::string timing_out;
  auto* opt_timing_n =
      cmd_timing->add_option("--n", timing_n, "number of photon pairs");
  auto* opt_window =
      cmd_timing->add_option("--window", window_ns, "coincidence window, ns");
  auto* opt_timing_out =
      cmd_timing->add_option("--out", timing_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Config cfg;
    if (*opt_config) cfg = Config::load_file(config_path);
    if (*opt_seed) cfg.seed = seed;

    if (cmd_qm->parsed()) {
      return run_qm(cfg,
                    *opt_sum_phase ? std::optional<double>(sum_phase)
                                   : std::nullopt,
                    *opt_qm_delta_l ? std::optional<double>(qm_delta_l)
                                    : std::nullopt);
    }
    if (cmd_scan->parsed()) {
      if (!*opt_n_per_point) n_per_point = cfg.n_trials;
      if (!*opt_scan_out) scan_out = cfg.output_path;
      return run_scan(cfg, from_um, to_um, step_um, n_per_point, channel,
                      scan_out, threads);
    }
    if (cmd_verify->parsed()) {
      return run_verify(cfg, suite_arg, threads);
    }
    if (cmd_timing->parsed()) {
      if (!*opt_timing_n) timing_n = cfg.n_trials;
      if (!*opt_window) window_ns = cfg.window_ns;
      if (!*opt_timing_out) timing_out = cfg.output_path;
      return run_timing(cfg, timing_n, window_ns, timing_out, threads);
    }
  } catch (const std::invalid_argument& e) {
    return usage_error(e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
