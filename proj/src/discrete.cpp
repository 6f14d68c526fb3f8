#include "mann/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace mann {

void StoppingRule::validate() const {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument(fmt::format("epsilon must be positive (got {})", epsilon));
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
}

const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::residual_met:
      return "residual_met";
    case StopReason::iteration_cap:
      return "iteration_cap";
    case StopReason::diverged:
      return "diverged";
  }
  return "unknown";
}

std::vector<double> Trajectory::iterates() const {
  std::vector<double> xs;
  xs.reserve(points_.size());
  for (const auto& p : points_) xs.push_back(p.x);
  return xs;
}

std::vector<double> Trajectory::realized_errors() const {
  std::vector<double> rs;
  rs.reserve(points_.size());
  for (const auto& p : points_) {
    if (!std::isnan(p.error)) rs.push_back(p.error);
  }
  return rs;
}

class TrajectoryBuilder {
 public:
  explicit TrajectoryBuilder(StoragePolicy policy) : policy_(policy) {
    if (policy_.head_capacity == 0 || policy_.tail_window == 0) {
      throw std::invalid_argument("storage capacities must be positive");
    }
  }

  void push(const IteratePoint& p) {
    ++total_;
    if (traj_.points_.size() < policy_.head_capacity) {
      traj_.points_.push_back(p);
      return;
    }
    tail_.push_back(p);
    if (tail_.size() > policy_.tail_window) tail_.pop_front();
  }

  Trajectory finish(StopReason reason, double epsilon, std::uint64_t fingerprint,
                    std::uint64_t projection_events) && {
    traj_.points_.insert(traj_.points_.end(), tail_.begin(), tail_.end());
    traj_.dropped_ = total_ - traj_.points_.size();
    traj_.stop_reason_ = reason;
    traj_.epsilon_ = epsilon;
    traj_.iterations_used_ = traj_.points_.back().n;
    traj_.fingerprint_ = fingerprint;
    traj_.projection_events_ = projection_events;
    return std::move(traj_);
  }

 private:
  StoragePolicy policy_;
  Trajectory traj_;
  std::deque<IteratePoint> tail_;
  std::uint64_t total_ = 0;
};

double mann_step(double x, double theta, double fx, double r) {
  // A convex combination lies between its endpoints; the clamp only removes
  // rounding excursions (and makes fixed points exactly stationary).
  const double y = std::clamp((1.0 - theta) * x + theta * fx, std::min(x, fx), std::max(x, fx));
  return y + r;
}

double project_unit(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x;
}

namespace {

Trajectory run_on_stream(const ScalarMap& map, const ThetaSchedule& schedule,
                         const ErrorModel& error, double x0, const RunOptions& options,
                         Xoshiro256& rng) {
  options.stop.validate();
  if (!(x0 >= 0.0 && x0 <= 1.0)) {
    throw DomainError(fmt::format("x0 = {} outside [0, 1]", x0));
  }
  constexpr double kNoStep = std::numeric_limits<double>::quiet_NaN();

  TrajectoryBuilder builder(options.storage);
  const std::uint64_t fingerprint = config_fingerprint(map, schedule, error, x0);
  std::uint64_t projection_events = 0;
  double x = x0;

  for (std::uint64_t n = 0;; ++n) {
    const double fx = map(x);
    const double res = fx - x;
    const double theta = schedule.at(n);
    if (std::abs(res) < options.stop.epsilon) {
      builder.push({n, x, theta, kNoStep, res});
      return std::move(builder).finish(StopReason::residual_met, options.stop.epsilon,
                                       fingerprint, projection_events);
    }
    if (n == options.stop.max_iterations) {
      builder.push({n, x, theta, kNoStep, res});
      return std::move(builder).finish(StopReason::iteration_cap, options.stop.epsilon,
                                       fingerprint, projection_events);
    }

    const double noise = error_at(error, n, rng);
    const double y = mann_step(x, theta, fx, 0.0);
    if (options.projected) {
      const double raw = y + noise;
      const double next = project_unit(raw);
      if (next != raw) ++projection_events;
      builder.push({n, x, theta, next - y, res});
      x = next;
    } else {
      const double next = y + noise;
      builder.push({n, x, theta, noise, res});
      if (!(next >= 0.0 && next <= 1.0)) {
        return std::move(builder).finish(StopReason::diverged, options.stop.epsilon, fingerprint,
                                         projection_events);
      }
      x = next;
    }
  }
}

}  // namespace

Trajectory run(const ScalarMap& map, const ThetaSchedule& schedule, const ErrorModel& error,
               double x0, const RunOptions& options) {
  Xoshiro256 rng = error.stream(options.run_index);
  return run_on_stream(map, schedule, error, x0, options, rng);
}

double sample_initial_point(const ErrorModel& error, std::uint64_t run_index) {
  return error.stream(run_index).uniform01();
}

Trajectory run_random_start(const ScalarMap& map, const ThetaSchedule& schedule,
                            const ErrorModel& error, const RunOptions& options) {
  Xoshiro256 rng = error.stream(options.run_index);
  const double x0 = rng.uniform01();
  return run_on_stream(map, schedule, error, x0, options, rng);
}

std::uint64_t config_fingerprint(const ScalarMap& map, const ThetaSchedule& schedule,
                                 const ErrorModel& error, double x0) {
  const std::string text = fmt::format("map={};theta={};error={};seed={};x0={:.17g}",
                                       map.describe(), schedule.describe(), error.describe(),
                                       error.seed(), x0);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << fmt::format("# fingerprint={:016x} stop={} iterations={} dropped={}\n",
                     traj.fingerprint(), to_string(traj.stop_reason()), traj.iterations_used(),
                     traj.dropped_points());
  out << "n,x_n,theta_n,r_n,residual\n";
  for (const auto& p : traj.points()) {
    out << fmt::format("{},{:.17g},{:.17g},", p.n, p.x, p.theta);
    if (!std::isnan(p.error)) out << fmt::format("{:.17g}", p.error);
    out << fmt::format(",{:.17g}\n", p.residual);
  }
}

}  // namespace mann
