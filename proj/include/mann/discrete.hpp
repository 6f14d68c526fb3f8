#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mann/scalar_map.hpp"
#include "mann/schedules.hpp"

namespace mann {

struct StoppingRule {
  double epsilon = 1e-6;
  std::uint64_t max_iterations = 1'000'000;

  /// Throws std::invalid_argument unless epsilon > 0 and max_iterations >= 1.
  void validate() const;
};

enum class StopReason { residual_met, iteration_cap, diverged };

const char* to_string(StopReason r) noexcept;

/// One recorded iterate. `theta` and `error` are the values used to move
/// from x_n to x_{n+1}; the final point carries no step, so its `error` is
/// NaN.
struct IteratePoint {
  std::uint64_t n;
  double x;
  double theta;
  double error;
  double residual;
};

struct StoragePolicy {
  /// Points kept from the start of the run.
  std::size_t head_capacity = 100'000;
  /// Rolling window of most recent points kept once the head is full.
  std::size_t tail_window = 10'000;
};

/// Record of one run. When a run outgrows the storage policy the middle
/// section is dropped; `points()` then holds the head followed by the tail,
/// each point tagged with its index n.
class Trajectory {
 public:
  const std::vector<IteratePoint>& points() const noexcept { return points_; }
  StopReason stop_reason() const noexcept { return stop_reason_; }
  double epsilon() const noexcept { return epsilon_; }
  std::uint64_t iterations_used() const noexcept { return iterations_used_; }
  std::uint64_t dropped_points() const noexcept { return dropped_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  std::uint64_t projection_events() const noexcept { return projection_events_; }

  const IteratePoint& last() const { return points_.back(); }

  /// x values of the stored points.
  std::vector<double> iterates() const;
  /// r_n for every stored point that took a step.
  std::vector<double> realized_errors() const;

 private:
  friend class TrajectoryBuilder;

  std::vector<IteratePoint> points_;
  StopReason stop_reason_ = StopReason::iteration_cap;
  double epsilon_ = 0.0;
  std::uint64_t iterations_used_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::uint64_t projection_events_ = 0;
};

/// (1 - theta) x + theta fx + r, with no projection. A fixed point (fx == x)
/// is returned unchanged up to r.
double mann_step(double x, double theta, double fx, double r);

/// Metric projection of the real line onto [0, 1].
double project_unit(double x);

struct RunOptions {
  StoppingRule stop{};
  bool projected = true;
  /// Which stream of the error model to consume (Monte Carlo run index).
  std::uint64_t run_index = 0;
  StoragePolicy storage{};
};

/// Iterates the perturbed process from x0.
///
/// The residual test |f(x_n) - x_n| < epsilon is evaluated before each step.
/// In projected mode x_{n+1} = project_unit(y_n + noise_n) with
/// y_n = (1 - theta_n) x_n + theta_n f(x_n), and the recorded error is the
/// effective one, x_{n+1} - y_n. In unprojected mode a step that leaves
/// [0, 1] ends the run with StopReason::diverged.
Trajectory run(const ScalarMap& map, const ThetaSchedule& schedule, const ErrorModel& error,
               double x0, const RunOptions& options = {});

/// Uniform draw on [0, 1) from the head of stream (seed, run_index): the
/// initial condition used by the Monte Carlo harness.
double sample_initial_point(const ErrorModel& error, std::uint64_t run_index);

/// Same as run() but with x0 drawn by sample_initial_point from the same
/// stream that then supplies the noise.
Trajectory run_random_start(const ScalarMap& map, const ThetaSchedule& schedule,
                            const ErrorModel& error, const RunOptions& options = {});

/// FNV-1a hash of the configuration description.
std::uint64_t config_fingerprint(const ScalarMap& map, const ThetaSchedule& schedule,
                                 const ErrorModel& error, double x0);

/// CSV with columns n,x_n,theta_n,r_n,residual; the fingerprint is echoed in
/// a leading '#' comment line.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace mann
