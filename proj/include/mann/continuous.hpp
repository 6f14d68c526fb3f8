#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mann/scalar_map.hpp"
#include "mann/schedules.hpp"

namespace mann {

enum class FlowStop { residual_met, horizon_reached, left_domain };

const char* to_string(FlowStop s) noexcept;

/// States of x' = theta(t) (f(x) - x) + r(t) on the uniform grid t_k = k h.
struct ContinuousTrajectory {
  std::vector<double> times;
  std::vector<double> states;
  double step_size = 0.0;
  FlowStop stop_reason = FlowStop::horizon_reached;
  /// Steps whose end state grazed outside [0, 1] by at most the boundary
  /// tolerance and were clamped back.
  std::uint64_t clamp_events = 0;
};

/// Exit beyond this distance from [0, 1] is a genuine domain exit.
inline constexpr double kBoundaryTolerance = 1e-9;

double vector_field(double t, double x, const ScalarMap& map, const ThetaSchedule& schedule,
                    const ErrorModel& error);

struct FlowOptions {
  double step = 1e-3;
  double horizon = 100.0;
  double epsilon = 1e-9;
};

/// Classical RK4 with uniform step. Stops early once |f(x) - x| < epsilon.
/// Intermediate stage states are projected onto [0, 1] before f is
/// evaluated; f is only defined there.
///
/// Requires 0 < step <= 0.1, horizon >= step, epsilon > 0 and x0 in [0, 1]
/// (std::invalid_argument / DomainError otherwise).
ContinuousTrajectory integrate(const ScalarMap& map, const ThetaSchedule& schedule,
                               const ErrorModel& error, double x0, const FlowOptions& options);

/// Exact solution for f = c, r = 0, theta(t) = (1+t)^-alpha:
/// c + (x0 - c) exp(-I(t)), I(t) = int_0^t theta.
double closed_form_linear(double c, double x0, double alpha, double t);

/// CSV with columns t,x,theta,r,residual, every `stride`-th state plus the
/// final one.
void write_flow_csv(std::ostream& out, const ContinuousTrajectory& traj, const ScalarMap& map,
                    const ThetaSchedule& schedule, const ErrorModel& error,
                    std::size_t stride = 1);

}  // namespace mann
