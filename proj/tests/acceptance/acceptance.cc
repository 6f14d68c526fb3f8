// Acceptance suite: one PASS/FAIL line per criterion.
//
// usage: acceptance <path-to-mann-cli> <work-dir>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "mann/bench.hpp"
#include "mann/continuous.hpp"
#include "mann/csv.hpp"
#include "mann/diagnostics.hpp"
#include "mann/discrete.hpp"
#include "mann/rng.hpp"
#include "mann/scalar_map.hpp"
#include "mann/schedules.hpp"

namespace fs = std::filesystem;
using namespace mann;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string g_cli;
fs::path g_work;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1", g_cli, args, log.string());
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// (A, alpha, epsilon) -> mean, read from a bench CSV.
using CellMeans = std::map<std::tuple<double, double, double>, std::pair<double, std::uint64_t>>;

CellMeans read_bench_csv(const fs::path& path) {
  std::ifstream in(path);
  const CsvTable t = read_csv(in);
  CellMeans cells;
  for (const auto& row : t.rows) {
    cells[{std::stod(row[0]), std::stod(row[1]), std::stod(row[2])}] = {std::stod(row[4]),
                                                                        std::stoull(row[6])};
  }
  return cells;
}

CellMeans g_tables;  // filled by criterion 1, reused by criterion 2

Outcome table_reproduction() {
  const fs::path csv = g_work / "paper_tables.csv";
  const auto start = std::chrono::steady_clock::now();
  const int code = run_cli(fmt::format("bench --paper-tables --runs 1000 --seed 2025 --output \"{}\"",
                                       csv.string()),
                           g_work / "paper_tables.log");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (code != 0) return {false, fmt::format("bench exited with {}", code)};
  g_tables = read_bench_csv(csv);
  if (g_tables.size() != 56) return {false, fmt::format("{} cells, expected 56", g_tables.size())};

  int bad = 0;
  std::string worst;
  for (const auto& [key, value] : g_tables) {
    const auto [a, alpha, eps] = key;
    const double ref = *published_mean(a, alpha, eps);
    const double mean = value.first;
    const bool ok = ref >= 10.0 ? std::abs(mean - ref) <= 0.35 * ref : std::abs(mean - ref) <= 2.0;
    if (!ok) {
      ++bad;
      worst += fmt::format(" N({},{},{})={:.2f} vs {:.2f};", a, alpha, eps, mean, ref);
    }
  }
  const double anchor1 = g_tables[{0.1, 1.0, 0.1}].first;
  const double anchor2 = g_tables[{0.001, 1.0, 0.01}].first;
  const double anchor3 = g_tables[{0.001, 0.1, 0.0001}].first;
  const bool fast = seconds < 300.0;
  return {bad == 0 && fast,
          fmt::format("{} / 56 cells in band, {:.2f} s; anchors {:.2f} (3.40) {:.2f} (4.89) "
                      "{:.2f} (134.84){}",
                      56 - bad, seconds, anchor1, anchor2, anchor3, worst)};
}

Outcome trend_reproduction() {
  if (g_tables.size() != 56) return {false, "table run unavailable"};
  const double a02 = g_tables[{0.001, 0.2, 0.0001}].first;
  const double a08 = g_tables[{0.001, 0.8, 0.0001}].first;
  const double b1 = g_tables[{0.1, 1.0, 0.0001}].first;
  const double b06 = g_tables[{0.1, 0.6, 0.0001}].first;
  return {a02 >= 3.0 * a08 && b1 > b06,
          fmt::format("A=0.001: alpha 0.2 -> {:.2f}, 0.8 -> {:.2f} (ratio {:.2f} >= 3); "
                      "A=0.1: alpha 1 -> {:.2f} > alpha 0.6 -> {:.2f}",
                      a02, a08, a02 / a08, b1, b06)};
}

Outcome convergence_classification() {
  const ScalarMap map = benchmark_map();
  const ErrorModel error = ErrorModel::uniform_decay(0.1, 31337);
  const std::vector<double> fps{1.0 / 6.0, 1.0 / 3.0, 3.0 / 5.0};
  RunOptions opt;
  opt.stop = {1e-4, kBenchIterationCap};
  int capped = 0, classified = 0, successful = 0;
  std::map<double, int> histogram;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    opt.run_index = k;
    const Trajectory traj = run_random_start(map, ThetaSchedule::power(1.0), error, opt);
    if (traj.stop_reason() != StopReason::residual_met) {
      ++capped;
      continue;
    }
    ++successful;
    if (auto m = classify_limit(traj.last().x, fps, 0.05)) {
      ++classified;
      ++histogram[m->fixed_point];
    }
  }
  return {capped == 0 && classified == successful,
          fmt::format("{} / {} classified, {} capped; limits 1/6: {}, 1/3: {}, 3/5: {}",
                      classified, successful, capped, histogram[fps[0]], histogram[fps[1]],
                      histogram[fps[2]])};
}

Outcome hypothesis_truth_table() {
  int mismatches = 0;
  int checked = 0;
  for (double alpha : {0.1, 0.5, 1.0, 1.2, 2.0}) {
    for (bool stochastic : {false, true}) {
      const ErrorModel model = stochastic ? ErrorModel::uniform_decay(0.1, 1) : ErrorModel::zero();
      const HypothesisReport r = validate_hypotheses(ThetaSchedule::power(alpha), model);
      const Verdict expect_vanish = Verdict::holds;
      const Verdict expect_sum = alpha <= 1.0 ? Verdict::holds : Verdict::fails;
      const Verdict expect_ratio = !stochastic || alpha < 2.0 ? Verdict::holds : Verdict::fails;
      const Verdict expect_errsum = Verdict::holds;
      const bool all_hold_expected = alpha > 0.0 && alpha <= 1.0;
      const bool ok = r.theta_vanishes.verdict == expect_vanish &&
                      r.theta_sum_diverges.verdict == expect_sum &&
                      r.ratio_vanishes.verdict == expect_ratio &&
                      r.error_sum_converges.verdict == expect_errsum &&
                      r.all_hold() == all_hold_expected;
      ++checked;
      if (!ok) ++mismatches;
    }
  }
  return {mismatches == 0, fmt::format("{} / {} configurations match", checked - mismatches, checked)};
}

Outcome ode_oracle() {
  double worst = 0.0;
  for (const auto [c, x0, alpha] : {std::tuple{1.0, 0.0, 1.0}, std::tuple{0.3, 0.9, 0.5}}) {
    const auto traj = integrate(constant_map(c), ThetaSchedule::power(alpha), ErrorModel::zero(), x0,
                                {1e-3, 100.0, 1e-300});
    for (double t : {1.0, 10.0, 100.0}) {
      const auto k = static_cast<std::size_t>(std::llround(t / 1e-3));
      if (k >= traj.states.size()) return {false, "trajectory ended before t = 100"};
      worst = std::max(worst, std::abs(traj.states[k] - closed_form_linear(c, x0, alpha, t)));
    }
  }
  // Empirical order from step halving on the (0.3, 0.9, 0.5) problem.
  const auto max_error = [](double h) {
    const auto traj = integrate(constant_map(0.3), ThetaSchedule::power(0.5), ErrorModel::zero(), 0.9,
                                {h, 2.0, 1e-300});
    double e = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      e = std::max(e, std::abs(traj.states[k] - closed_form_linear(0.3, 0.9, 0.5, traj.times[k])));
    }
    return e;
  };
  const double order = std::log2(max_error(0.1) / max_error(0.05));
  return {worst <= 1e-6 && order >= 3.0,
          fmt::format("max deviation {:.2e} (<= 1e-6), empirical order {:.2f} (>= 3)", worst, order)};
}

Outcome discrete_closed_form() {
  double worst = 0.0;
  for (double alpha : {0.3, 1.0}) {
    for (const auto [c, x0] : {std::pair{0.25, 0.8}, std::pair{0.9, 0.0}, std::pair{0.5, 1.0}}) {
      const ThetaSchedule schedule = ThetaSchedule::power(alpha);
      RunOptions opt;
      opt.stop = {1e-300, 1000};
      const Trajectory traj = run(constant_map(c), schedule, ErrorModel::zero(), x0, opt);
      double product = 1.0;
      for (const auto& p : traj.points()) {
        worst = std::max(worst, std::abs(p.x - (c + (x0 - c) * product)));
        product *= 1.0 - schedule.at(p.n);
      }
    }
  }
  return {worst <= 1e-12, fmt::format("max deviation {:.2e} (<= 1e-12)", worst)};
}

Outcome classic_mann_regression() {
  const ScalarMap cosine = unique_fixed_point_map();
  const double oracle = bisection_run(cosine, 0.0, 1.0, 1e-12).root;
  if (std::abs(oracle - 0.7390851) > 1e-7) {
    return {false, fmt::format("bisection oracle {:.10f} != 0.7390851", oracle)};
  }
  double worst = 0.0;
  int converged = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const double x0 = Xoshiro256(777, k).uniform01();
    RunOptions opt;
    opt.stop = {1e-6, 1'000'000};
    const Trajectory traj = run(cosine, ThetaSchedule::classic_mann(), ErrorModel::zero(), x0, opt);
    if (traj.stop_reason() == StopReason::residual_met) ++converged;
    worst = std::max(worst, std::abs(traj.last().x - oracle));
  }
  return {converged == 20 && worst <= 1e-4,
          fmt::format("{} / 20 converged, max |x - p| = {:.2e} (<= 1e-4)", converged, worst)};
}

Outcome bisection_formula() {
  int mismatches = 0;
  const double lo = std::log10(1e-6), hi = std::log10(0.5);
  for (int i = 0; i < 20; ++i) {
    const double eps = std::pow(10.0, lo + (hi - lo) * (i + 1) / 21.0);
    const auto expected = static_cast<std::uint64_t>(std::floor(-std::log(eps) / std::log(2.0)));
    if (bisection_count(eps) != expected) ++mismatches;
  }
  const bool anchor = bisection_count(0.001) == 9;
  return {mismatches == 0 && anchor,
          fmt::format("{} / 20 exact, eps = 0.001 -> {}", 20 - mismatches, bisection_count(0.001))};
}

Outcome determinism() {
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "solve --map paper-sec4 --alpha 1 --amplitude 0.1 --epsilon 0.001 --seed 42"},
      {"ode", "ode --map paper-sec4 --alpha 0.6 --amplitude 0.01 --x0 0.9 --horizon 20 --step 0.01"},
      {"bench", "bench --runs 200 --alphas 0.2,1 --epsilons 0.01,0.0001 --amplitudes 0.1 --seed 9"},
      {"validate", "validate --alpha 0.8 --amplitude 0.1"},
  };
  std::string detail;
  bool ok = true;
  for (const auto& [name, args] : commands) {
    const fs::path a = g_work / (name + "_a.csv");
    const fs::path b = g_work / (name + "_b.csv");
    const int ca = run_cli(fmt::format("{} --output \"{}\"", args, a.string()), g_work / (name + "_a.log"));
    const int cb = run_cli(fmt::format("{} --output \"{}\"", args, b.string()), g_work / (name + "_b.log"));
    const bool same = ca == 0 && cb == 0 && fs::exists(a) && slurp(a) == slurp(b) && !slurp(a).empty();
    ok = ok && same;
    detail += fmt::format("{}: {}  ", name, same ? "identical" : "DIFFERENT");
  }
  return {ok, detail};
}

Outcome confinement() {
  Xoshiro256 gen(4242);
  const ScalarMap map = benchmark_map();
  int violations = 0;
  std::uint64_t projections = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x0 = gen.uniform01();
    const double alpha = 0.01 + 0.99 * gen.uniform01();
    RunOptions opt;
    opt.stop = {1e-10, 2000};
    opt.projected = false;
    const Trajectory traj = run(map, ThetaSchedule::power(alpha), ErrorModel::zero(), x0, opt);
    projections += traj.projection_events();
    if (traj.stop_reason() == StopReason::diverged) ++violations;
    for (const auto& p : traj.points()) {
      if (p.x < 0.0 || p.x > 1.0) ++violations;
    }
  }
  int envelope_breaks = 0;
  std::uint64_t steps = 0, stochastic_projections = 0;
  for (double amplitude : {0.1, 0.001, 1.0}) {
    for (double alpha : {0.1, 0.6, 1.0}) {
      const ErrorModel error = ErrorModel::uniform_decay(amplitude, 55);
      for (std::uint64_t k = 0; k < 100; ++k) {
        RunOptions opt;
        opt.stop = {1e-4, kBenchIterationCap};
        opt.run_index = k;
        const Trajectory traj = run_random_start(map, ThetaSchedule::power(alpha), error, opt);
        stochastic_projections += traj.projection_events();
        for (const auto& p : traj.points()) {
          if (std::isnan(p.error)) continue;
          ++steps;
          const double n = static_cast<double>(p.n);
          if (std::abs(p.error) > amplitude / (1.0 + n * n)) ++envelope_breaks;
        }
      }
    }
  }
  return {violations == 0 && projections == 0 && envelope_breaks == 0,
          fmt::format("zero-error: {} violations, {} projections; projected: {} envelope breaks "
                      "over {} steps ({} projection events)",
                      violations, projections, envelope_breaks, steps, stochastic_projections)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <mann-cli> <work-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_work = argv[2];
  fs::create_directories(g_work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 table reproduction", table_reproduction},
      {"2 trend reproduction", trend_reproduction},
      {"3 convergence classification", convergence_classification},
      {"4 hypothesis truth table", hypothesis_truth_table},
      {"5 ODE oracle and order", ode_oracle},
      {"6 discrete closed form", discrete_closed_form},
      {"7 classic Mann regression", classic_mann_regression},
      {"8 bisection formula", bisection_formula},
      {"9 determinism", determinism},
      {"10 confinement", confinement},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << fmt::format("[{}] {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
  }
  std::cout << fmt::format("{} / {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
