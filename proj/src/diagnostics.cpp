#include "mann/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace mann {

namespace {

std::span<const double> last_window(std::span<const double> xs, std::size_t window) {
  if (window == 0) throw std::invalid_argument("window must be positive");
  if (xs.size() < window + 1) {
    throw InsufficientLengthError(
        fmt::format("trajectory has {} points, window {} needs {}", xs.size(), window, window + 1));
  }
  return xs.subspan(xs.size() - window - 1);
}

}  // namespace

std::pair<double, double> tail_interval(std::span<const double> xs, std::size_t window) {
  const auto tail = last_window(xs, window).subspan(1);
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  return {*lo, *hi};
}

std::pair<double, double> tail_interval(const Trajectory& traj, std::size_t window) {
  const auto xs = traj.iterates();
  return tail_interval(std::span<const double>(xs), window);
}

double step_diff_sup(std::span<const double> xs, std::size_t window) {
  const auto tail = last_window(xs, window);
  double sup = 0.0;
  for (std::size_t i = 0; i + 1 < tail.size(); ++i) {
    sup = std::max(sup, std::abs(tail[i + 1] - tail[i]));
  }
  return sup;
}

double step_diff_sup(const Trajectory& traj, std::size_t window) {
  const auto xs = traj.iterates();
  return step_diff_sup(std::span<const double>(xs), window);
}

std::optional<LimitMatch> classify_limit(double x, std::span<const double> fixed_points,
                                         double tol) {
  if (fixed_points.empty()) throw std::invalid_argument("fixed-point list is empty");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  std::optional<LimitMatch> best;
  for (double p : fixed_points) {
    const double d = std::abs(x - p);
    if (!best || d < best->distance || (d == best->distance && p < best->fixed_point)) {
      best = LimitMatch{p, d};
    }
  }
  if (best->distance > tol) return std::nullopt;
  return best;
}

std::size_t default_window(std::size_t length) {
  if (length < 2) return 0;
  return std::min(std::max<std::size_t>(50, length / 10), length - 1);
}

TailSummary summarize_tail(std::span<const double> xs, std::span<const double> fixed_points,
                           double tol, std::optional<std::size_t> window) {
  TailSummary s;
  s.window = window.value_or(default_window(xs.size()));
  if (s.window == 0) {
    throw InsufficientLengthError("tail summary needs at least two iterates");
  }
  s.window_start = xs.size() - s.window;
  std::tie(s.interval_low, s.interval_high) = tail_interval(xs, s.window);
  s.max_step_diff = step_diff_sup(xs, s.window);
  if (!fixed_points.empty()) {
    if (auto m = classify_limit(xs.back(), fixed_points, tol)) {
      s.classified_limit = m->fixed_point;
      s.distance_to_limit = m->distance;
    }
  }
  return s;
}

}  // namespace mann
