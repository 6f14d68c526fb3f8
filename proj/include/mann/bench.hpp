#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mann/scalar_map.hpp"

namespace mann {

/// Every run of a cell hit the iteration cap.
class AllRunsFailedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean iteration count N(A, alpha, epsilon) over K randomized runs of the
/// projected process on the benchmark map.
struct BenchCell {
  double amplitude = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::uint64_t runs = 0;
  std::uint64_t base_seed = 0;
  /// Over successful runs only. NaN when every run failed.
  double mean_iterations = 0.0;
  /// Sample standard deviation (divisor K' - 1) over successful runs.
  double std_iterations = 0.0;
  std::uint64_t failures = 0;
  /// Set when the cell could not produce a mean.
  std::optional<std::string> error;
};

struct BenchMetadata {
  std::string rng_algorithm;
  std::uint64_t base_seed = 0;
  std::string timestamp;
  std::string version;
};

struct BenchReport {
  std::vector<BenchCell> grid;
  std::map<double, std::uint64_t> bisection_counts;
  BenchMetadata metadata;
};

struct BenchGrid {
  std::vector<double> amplitudes;
  std::vector<double> alphas;
  std::vector<double> epsilons;
};

/// The published grid: A in {0.1, 0.001}, alpha in {0.1, ..., 1},
/// epsilon in {0.1, ..., 1e-4}.
BenchGrid paper_grid();

/// Published N(A, alpha, epsilon) for the paper_grid() cells.
std::optional<double> published_mean(double amplitude, double alpha, double epsilon);

inline constexpr std::uint64_t kBenchIterationCap = 100'000;

/// Runs K independent projected runs. Run k uses stream (base_seed, k) for
/// both x0 ~ U[0, 1) and the noise. Throws AllRunsFailedError when every run
/// hits `cap`.
BenchCell run_cell(double amplitude, double alpha, double epsilon, std::uint64_t runs,
                   std::uint64_t base_seed, std::uint64_t cap = kBenchIterationCap,
                   unsigned threads = 0);

/// One cell per (A, alpha, epsilon) triple; duplicate values in the grid are
/// rejected. Failed cells carry `error` rather than aborting the grid.
BenchReport run_grid(const BenchGrid& grid, std::uint64_t runs, std::uint64_t base_seed,
                     std::uint64_t cap = kBenchIterationCap, unsigned threads = 0);

BenchReport reproduce_tables(std::uint64_t runs, std::uint64_t base_seed,
                             std::uint64_t cap = kBenchIterationCap, unsigned threads = 0);

/// floor(-log(eps) / log(2)) for eps in (0, 1).
std::uint64_t bisection_count(double epsilon);

struct BisectionResult {
  double root;
  std::uint64_t iterations;
};

class NoSignChangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Interval halving on g(x) = f(x) - x until the bracket is narrower than
/// epsilon; returns the midpoint of the final bracket.
BisectionResult bisection_run(const ScalarMap& map, double lo, double hi, double epsilon);

/// One CSV row per cell: A,alpha,epsilon,K,mean,std,failures,base_seed.
/// Metadata other than the timestamp goes into leading '#' lines so that
/// identical runs give identical bytes.
void write_bench_csv(std::ostream& out, const BenchReport& report);

/// Aligned tables, one per amplitude, rows alpha, columns epsilon.
void write_bench_tables(std::ostream& out, const BenchReport& report);

}  // namespace mann
