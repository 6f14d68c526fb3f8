#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mann/discrete.hpp"

namespace mann {

class InsufficientLengthError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finite-tail surrogate for the omega limit set of a run. The limit set
/// itself is not computable from finitely many iterates; these are
/// estimates over the last `window` steps.
struct TailSummary {
  std::size_t window_start = 0;
  std::size_t window = 0;
  double interval_low = 0.0;
  double interval_high = 0.0;
  double max_step_diff = 0.0;
  std::optional<double> classified_limit;
  std::optional<double> distance_to_limit;
};

/// (min, max) over the last `window` values. Needs at least window + 1 values.
std::pair<double, double> tail_interval(std::span<const double> xs, std::size_t window);
std::pair<double, double> tail_interval(const Trajectory& traj, std::size_t window);

/// max |x_{k+1} - x_k| over the last `window` steps.
double step_diff_sup(std::span<const double> xs, std::size_t window);
double step_diff_sup(const Trajectory& traj, std::size_t window);

struct LimitMatch {
  double fixed_point;
  double distance;
};

/// Nearest fixed point within `tol` of x; exact ties go to the smaller one.
std::optional<LimitMatch> classify_limit(double x, std::span<const double> fixed_points,
                                         double tol);

/// max(50, length / 10), capped at length - 1.
std::size_t default_window(std::size_t length);

TailSummary summarize_tail(std::span<const double> xs, std::span<const double> fixed_points,
                           double tol, std::optional<std::size_t> window = std::nullopt);

}  // namespace mann
