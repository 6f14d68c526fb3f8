#include "mann/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <set>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "mann/discrete.hpp"
#include "mann/rng.hpp"
#include "mann/schedules.hpp"

#ifndef MANN_VERSION
#define MANN_VERSION "0.0.0"
#endif

namespace mann {

namespace {

constexpr std::array<double, 2> kAmplitudes{0.1, 0.001};
constexpr std::array<double, 7> kAlphas{0.1, 0.2, 0.4, 0.6, 0.8, 0.9, 1.0};
constexpr std::array<double, 4> kEpsilons{0.1, 0.01, 0.001, 0.0001};

// [amplitude][alpha][epsilon]
constexpr double kPublished[2][7][4] = {
    {
        {4.27, 77.07, 117.41, 133.64},
        {5.83, 24.40, 36.46, 41.72},
        {5.05, 12.83, 17.03, 22.50},
        {4.04, 7.65, 11.84, 20.54},
        {3.53, 6.47, 11.20, 21.63},
        {3.65, 5.83, 10.73, 25.07},
        {3.40, 6.14, 11.44, 28.89},
    },
    {
        {4.88, 76.14, 119.15, 134.84},
        {5.14, 22.94, 35.09, 38.39},
        {4.97, 11.52, 16.49, 17.81},
        {3.95, 7.39, 9.49, 10.85},
        {3.46, 5.87, 6.68, 8.63},
        {3.57, 5.72, 6.70, 9.20},
        {3.28, 4.89, 6.60, 8.78},
    },
};

template <std::size_t N>
std::optional<std::size_t> index_of(const std::array<double, N>& values, double v) {
  for (std::size_t i = 0; i < N; ++i) {
    if (values[i] == v) return i;
  }
  return std::nullopt;
}

unsigned resolve_threads(unsigned requested, std::uint64_t runs) {
  unsigned t = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(runs, 1)));
}

}  // namespace

BenchGrid paper_grid() {
  return {{kAmplitudes.begin(), kAmplitudes.end()},
          {kAlphas.begin(), kAlphas.end()},
          {kEpsilons.begin(), kEpsilons.end()}};
}

std::optional<double> published_mean(double amplitude, double alpha, double epsilon) {
  const auto a = index_of(kAmplitudes, amplitude);
  const auto b = index_of(kAlphas, alpha);
  const auto c = index_of(kEpsilons, epsilon);
  if (!a || !b || !c) return std::nullopt;
  return kPublished[*a][*b][*c];
}

BenchCell run_cell(double amplitude, double alpha, double epsilon, std::uint64_t runs,
                   std::uint64_t base_seed, std::uint64_t cap, unsigned threads) {
  if (!(amplitude > 0.0)) {
    throw std::invalid_argument(fmt::format("amplitude must be positive (got {})", amplitude));
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument(fmt::format("alpha must lie in (0, 1] (got {})", alpha));
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument(fmt::format("epsilon must be positive (got {})", epsilon));
  }
  if (runs == 0) throw std::invalid_argument("runs must be positive");

  const ScalarMap map = benchmark_map();
  const ThetaSchedule schedule = ThetaSchedule::power(alpha);
  const ErrorModel error = ErrorModel::uniform_decay(amplitude, base_seed);

  // Per-run iteration counts, or nullopt for a capped run. Slots are indexed
  // by run so the merge below is independent of scheduling.
  std::vector<std::optional<std::uint64_t>> counts(runs);
  const auto worker = [&](std::uint64_t begin, std::uint64_t stride) {
    RunOptions options;
    options.stop = {epsilon, cap};
    options.projected = true;
    options.storage = {64, 64};
    for (std::uint64_t k = begin; k < runs; k += stride) {
      options.run_index = k;
      const Trajectory traj = run_random_start(map, schedule, error, options);
      if (traj.stop_reason() == StopReason::residual_met) counts[k] = traj.iterations_used();
    }
  };

  const unsigned n_threads = resolve_threads(threads, runs);
  if (n_threads <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker, i, n_threads);
  }

  BenchCell cell;
  cell.amplitude = amplitude;
  cell.alpha = alpha;
  cell.epsilon = epsilon;
  cell.runs = runs;
  cell.base_seed = base_seed;

  double sum = 0.0;
  std::uint64_t ok = 0;
  for (const auto& c : counts) {
    if (!c) {
      ++cell.failures;
      continue;
    }
    sum += static_cast<double>(*c);
    ++ok;
  }
  if (ok == 0) {
    throw AllRunsFailedError(fmt::format(
        "all {} runs hit the iteration cap {} (A={}, alpha={}, epsilon={})", runs, cap,
        amplitude, alpha, epsilon));
  }
  cell.mean_iterations = sum / static_cast<double>(ok);
  double ss = 0.0;
  for (const auto& c : counts) {
    if (c) {
      const double d = static_cast<double>(*c) - cell.mean_iterations;
      ss += d * d;
    }
  }
  cell.std_iterations = ok > 1 ? std::sqrt(ss / static_cast<double>(ok - 1)) : 0.0;
  return cell;
}

BenchReport run_grid(const BenchGrid& grid, std::uint64_t runs, std::uint64_t base_seed,
                     std::uint64_t cap, unsigned threads) {
  const auto check_unique = [](const std::vector<double>& v, const char* name) {
    if (std::set<double>(v.begin(), v.end()).size() != v.size()) {
      throw std::invalid_argument(fmt::format("duplicate value in bench {}", name));
    }
    if (v.empty()) throw std::invalid_argument(fmt::format("bench {} is empty", name));
  };
  check_unique(grid.amplitudes, "amplitudes");
  check_unique(grid.alphas, "alphas");
  check_unique(grid.epsilons, "epsilons");

  BenchReport report;
  report.metadata.rng_algorithm = std::string(Xoshiro256::kAlgorithm);
  report.metadata.base_seed = base_seed;
  report.metadata.version = MANN_VERSION;

  for (double a : grid.amplitudes) {
    for (double alpha : grid.alphas) {
      for (double eps : grid.epsilons) {
        try {
          report.grid.push_back(run_cell(a, alpha, eps, runs, base_seed, cap, threads));
        } catch (const AllRunsFailedError& e) {
          BenchCell failed;
          failed.amplitude = a;
          failed.alpha = alpha;
          failed.epsilon = eps;
          failed.runs = runs;
          failed.base_seed = base_seed;
          failed.failures = runs;
          failed.mean_iterations = std::nan("");
          failed.std_iterations = std::nan("");
          failed.error = e.what();
          report.grid.push_back(std::move(failed));
        }
      }
    }
  }
  for (double eps : grid.epsilons) {
    if (eps > 0.0 && eps < 1.0) report.bisection_counts[eps] = bisection_count(eps);
  }
  return report;
}

BenchReport reproduce_tables(std::uint64_t runs, std::uint64_t base_seed, std::uint64_t cap,
                             unsigned threads) {
  return run_grid(paper_grid(), runs, base_seed, cap, threads);
}

std::uint64_t bisection_count(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError(fmt::format("bisection_count: epsilon = {} outside (0, 1)", epsilon));
  }
  return static_cast<std::uint64_t>(std::floor(-std::log(epsilon) / std::log(2.0)));
}

BisectionResult bisection_run(const ScalarMap& map, double lo, double hi, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument(fmt::format("epsilon must be positive (got {})", epsilon));
  }
  if (!(lo < hi)) throw std::invalid_argument(fmt::format("empty bracket [{}, {}]", lo, hi));
  double g_lo = residual(map, lo);
  const double g_hi = residual(map, hi);
  if (g_lo == 0.0) return {lo, 0};
  if (g_hi == 0.0) return {hi, 0};
  if ((g_lo < 0.0) == (g_hi < 0.0)) {
    throw NoSignChangeError(fmt::format(
        "f(x) - x has the same sign at {} ({}) and {} ({})", lo, g_lo, hi, g_hi));
  }
  std::uint64_t iterations = 0;
  while (hi - lo >= epsilon) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = residual(map, mid);
    ++iterations;
    if (g_mid == 0.0) return {mid, iterations};
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), iterations};
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
  out << fmt::format("# rng={}\n# base_seed={}\n# version={}\n", report.metadata.rng_algorithm,
                     report.metadata.base_seed, report.metadata.version);
  for (const auto& [eps, count] : report.bisection_counts) {
    out << fmt::format("# bisection epsilon={:.17g} iterations={}\n", eps, count);
  }
  out << "A,alpha,epsilon,K,mean,std,failures,base_seed\n";
  for (const auto& c : report.grid) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{},{}\n", c.amplitude,
                       c.alpha, c.epsilon, c.runs, c.mean_iterations, c.std_iterations,
                       c.failures, c.base_seed);
  }
}

void write_bench_tables(std::ostream& out, const BenchReport& report) {
  std::vector<double> amplitudes;
  std::vector<double> alphas;
  std::vector<double> epsilons;
  const auto remember = [](std::vector<double>& v, double x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (const auto& c : report.grid) {
    remember(amplitudes, c.amplitude);
    remember(alphas, c.alpha);
    remember(epsilons, c.epsilon);
  }
  const auto find_cell = [&](double a, double alpha, double eps) -> const BenchCell* {
    for (const auto& c : report.grid) {
      if (c.amplitude == a && c.alpha == alpha && c.epsilon == eps) return &c;
    }
    return nullptr;
  };

  out << fmt::format("rng: {}\nbase seed: {}\nversion: {}\n", report.metadata.rng_algorithm,
                     report.metadata.base_seed, report.metadata.version);
  if (!report.metadata.timestamp.empty()) out << "timestamp: " << report.metadata.timestamp << '\n';

  for (double a : amplitudes) {
    out << fmt::format("\nN(A={}, alpha, epsilon)  mean iterations (published value)\n", a);
    out << fmt::format("{:<12}", "alpha/eps");
    for (double e : epsilons) out << fmt::format("{:>18}", fmt::format("eps={}", e));
    out << '\n';
    for (double alpha : alphas) {
      out << fmt::format("{:<12}", fmt::format("alpha={}", alpha));
      for (double e : epsilons) {
        const BenchCell* c = find_cell(a, alpha, e);
        std::string text = "-";
        if (c != nullptr && !c->error) {
          text = fmt::format("{:.2f}", c->mean_iterations);
          if (auto ref = published_mean(a, alpha, e)) text += fmt::format(" ({:.2f})", *ref);
          if (c->failures > 0) text += fmt::format(" [{} capped]", c->failures);
        } else if (c != nullptr) {
          text = "FAILED";
        }
        out << fmt::format("{:>18}", text);
      }
      out << '\n';
    }
  }
  if (!report.bisection_counts.empty()) {
    out << "\nbisection iterations floor(-log(eps)/log(2)):";
    for (const auto& [eps, count] : report.bisection_counts) {
      out << fmt::format("  eps={}: {}", eps, count);
    }
    out << '\n';
  }
}

}  // namespace mann
