#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "mann/bench.hpp"
#include "mann/cli.hpp"
#include "mann/continuous.hpp"
#include "mann/csv.hpp"
#include "mann/diagnostics.hpp"
#include "mann/discrete.hpp"
#include "mann/scalar_map.hpp"
#include "mann/schedules.hpp"

namespace mann::cli {

namespace {

ThetaSchedule make_schedule(const RunConfig& cfg) {
  if (cfg.theta_family == "classic_mann") return ThetaSchedule::classic_mann();
  if (cfg.theta_family == "constant") return ThetaSchedule::constant(cfg.theta_value);
  return ThetaSchedule::power(cfg.alpha);
}

ErrorModel make_error(const RunConfig& cfg) {
  if (cfg.error_family == "uniform_decay") return ErrorModel::uniform_decay(cfg.amplitude, cfg.seed);
  return ErrorModel(ZeroError{}, cfg.seed);
}

std::string seed_line(const RunConfig& cfg) {
  return fmt::format("# command={} seed={} seed_source={}\n", to_string(cfg.command), cfg.seed,
                     cfg.seed_source);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes the CSV to the configured destination. Returns false (after
// reporting) on I/O failure.
bool emit_csv(const RunConfig& cfg, const std::string& csv, std::ostream& out, std::ostream& err) {
  if (cfg.output.empty() || cfg.output == "-") {
    out << csv;
    return true;
  }
  std::ofstream file(cfg.output, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << fmt::format("error: output: cannot open '{}' for writing\n", cfg.output);
    return false;
  }
  file << csv;
  file.close();
  if (!file) {
    err << fmt::format("error: output: write to '{}' failed\n", cfg.output);
    return false;
  }
  return true;
}

std::ostream& summary_stream(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return cfg.output.empty() || cfg.output == "-" ? err : out;
}

std::vector<double> fixed_points_of(const ScalarMap& map) {
  if (map.known_fixed_points()) return *map.known_fixed_points();
  if (map.is_piecewise_linear()) {
    try {
      return enumerate_fixed_points(map);
    } catch (const DegenerateSegmentError&) {
    }
  }
  return {};
}

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ScalarMap map = resolve_map(cfg.map);
  const ThetaSchedule schedule = make_schedule(cfg);
  const ErrorModel error = make_error(cfg);
  RunOptions options;
  options.stop = {cfg.epsilon, cfg.max_iterations};
  options.projected = cfg.projected;
  const Trajectory traj = cfg.x0 ? run(map, schedule, error, *cfg.x0, options)
                                 : run_random_start(map, schedule, error, options);

  std::ostringstream csv;
  csv << seed_line(cfg);
  write_trajectory_csv(csv, traj);
  if (!emit_csv(cfg, csv.str(), out, err)) return kIoError;

  std::ostream& s = summary_stream(cfg, out, err);
  const auto& first = traj.points().front();
  const auto& last = traj.last();
  s << fmt::format("solve: map={} theta={} error={}\n", cfg.map, schedule.describe(),
                   error.describe());
  s << fmt::format("  x0 = {:.17g}  epsilon = {}  projected = {}\n", first.x, cfg.epsilon,
                   cfg.projected);
  s << fmt::format("  stop: {} after {} iterations\n", to_string(traj.stop_reason()),
                   traj.iterations_used());
  s << fmt::format("  final x = {:.12f}  |f(x) - x| = {:.3e}  projection events = {}\n", last.x,
                   std::abs(last.residual), traj.projection_events());

  const auto xs = traj.iterates();
  const auto fps = fixed_points_of(map);
  if (xs.size() >= 2) {
    const TailSummary tail = summarize_tail(xs, fps, cfg.classify_tol);
    s << fmt::format("  tail (last {} iterates): [{:.12f}, {:.12f}]  max step = {:.3e}\n",
                     tail.window, tail.interval_low, tail.interval_high, tail.max_step_diff);
  }
  if (!fps.empty()) {
    if (auto m = classify_limit(last.x, fps, cfg.classify_tol)) {
      s << fmt::format("  reached fixed point {:.12f} (distance {:.3e})\n", m->fixed_point,
                       m->distance);
    } else {
      s << fmt::format("  no fixed point within {}\n", cfg.classify_tol);
    }
  }
  return traj.stop_reason() == StopReason::residual_met ? kSuccess : kNotConverged;
}

int run_ode(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ScalarMap map = resolve_map(cfg.map);
  const ThetaSchedule schedule = make_schedule(cfg);
  const ErrorModel error = make_error(cfg);
  const double x0 = cfg.x0 ? *cfg.x0 : sample_initial_point(error, 0);
  const ContinuousTrajectory traj =
      integrate(map, schedule, error, x0, {cfg.step, cfg.horizon, cfg.epsilon});

  std::ostringstream csv;
  csv << seed_line(cfg);
  write_flow_csv(csv, traj, map, schedule, error, cfg.stride);
  if (!emit_csv(cfg, csv.str(), out, err)) return kIoError;

  std::ostream& s = summary_stream(cfg, out, err);
  const double t_end = traj.times.back();
  const double x_end = traj.states.back();
  s << fmt::format("ode: map={} theta={} error={}\n", cfg.map, schedule.describe(),
                   error.describe());
  s << fmt::format("  x0 = {:.17g}  h = {}  horizon = {}\n", x0, cfg.step, cfg.horizon);
  s << fmt::format("  stop: {} at t = {}\n", to_string(traj.stop_reason), t_end);
  s << fmt::format("  final x = {:.12f}  |f(x) - x| = {:.3e}  clamp events = {}\n", x_end,
                   std::abs(map(x_end) - x_end), traj.clamp_events);

  // Linear fixture: compare against the exact solution.
  const bool zero_error = cfg.error_family == "zero";
  const bool power_like = cfg.theta_family == "power" || cfg.theta_family == "classic_mann";
  if (cfg.map.starts_with("constant:") && zero_error && power_like) {
    const double c = map(0.0);
    const double alpha = cfg.theta_family == "power" ? cfg.alpha : 1.0;
    double max_dev = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      max_dev = std::max(max_dev,
                         std::abs(traj.states[i] - closed_form_linear(c, x0, alpha, traj.times[i])));
    }
    s << fmt::format("  max deviation from closed form = {:.3e}\n", max_dev);
  }
  const auto fps = fixed_points_of(map);
  if (!fps.empty()) {
    if (auto m = classify_limit(x_end, fps, cfg.classify_tol)) {
      s << fmt::format("  nearest fixed point {:.12f} (distance {:.3e})\n", m->fixed_point,
                       m->distance);
    }
  }
  return traj.stop_reason == FlowStop::left_domain ? kNotConverged : kSuccess;
}

int run_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const BenchGrid grid = cfg.paper_tables
                             ? paper_grid()
                             : BenchGrid{cfg.amplitudes, cfg.alphas, cfg.epsilons};
  BenchReport report = run_grid(grid, cfg.runs, cfg.seed, kBenchIterationCap, cfg.threads);
  report.metadata.timestamp = utc_timestamp();

  std::ostringstream csv;
  csv << seed_line(cfg);
  write_bench_csv(csv, report);
  if (!emit_csv(cfg, csv.str(), out, err)) return kIoError;

  std::ostream& s = summary_stream(cfg, out, err);
  s << fmt::format("bench: {} runs per cell, seed {} ({})\n", cfg.runs, cfg.seed, cfg.seed_source);
  write_bench_tables(s, report);
  bool failed = false;
  for (const auto& c : report.grid) {
    if (c.error) {
      failed = true;
      s << "  failed cell: " << *c.error << '\n';
    }
  }
  return failed ? kNotConverged : kSuccess;
}

int run_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ThetaSchedule schedule = make_schedule(cfg);
  const ErrorModel error = make_error(cfg);
  const HypothesisReport report = validate_hypotheses(schedule, error);

  const std::pair<const char*, const VerdictLine*> lines[] = {
      {"theta_vanishes", &report.theta_vanishes},
      {"theta_sum_diverges", &report.theta_sum_diverges},
      {"ratio_vanishes", &report.ratio_vanishes},
      {"error_sum_converges", &report.error_sum_converges},
  };
  const char* labels[] = {"θ_n → 0", "Σθ_n diverges", "r_n/θ_n → 0", "Σr_n converges"};

  std::ostringstream csv;
  csv << seed_line(cfg);
  csv << fmt::format("# theta={} error={}\n", schedule.describe(), error.describe());
  csv << "hypothesis,verdict,justification\n";
  for (const auto& [name, line] : lines) {
    csv << name << ',' << to_string(line->verdict) << ',' << csv_quote(line->justification)
        << '\n';
  }
  if (!emit_csv(cfg, csv.str(), out, err)) return kIoError;

  std::ostream& s = summary_stream(cfg, out, err);
  s << fmt::format("validate: theta={} error={}\n", schedule.describe(), error.describe());
  for (std::size_t i = 0; i < 4; ++i) {
    std::string verdict = to_string(lines[i].second->verdict);
    for (auto& ch : verdict) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    s << fmt::format("  {}: {}  ({})\n", labels[i], verdict, lines[i].second->justification);
  }
  return report.any_fails() ? kValidationError : kSuccess;
}

}  // namespace

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case Command::solve:
        return run_solve(config, out, err);
      case Command::ode:
        return run_ode(config, out, err);
      case Command::bench:
        return run_bench(config, out, err);
      case Command::validate:
        return run_validate(config, out, err);
    }
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<std::string> env_seed;
  if (const char* v = std::getenv("MANN_SEED")) env_seed = v;
  const ParseOutcome parsed = parse_config(args, std::nullopt, env_seed);
  if (parsed.help) {
    out << *parsed.help;
    return kSuccess;
  }
  if (!parsed.config) {
    for (const auto& e : parsed.errors) err << "error: " << e << '\n';
    return parsed.io_error ? kIoError : kValidationError;
  }
  return execute(*parsed.config, out, err);
}

}  // namespace mann::cli
