#include "mann/continuous.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "mann/discrete.hpp"

namespace mann {

const char* to_string(FlowStop s) noexcept {
  switch (s) {
    case FlowStop::residual_met:
      return "residual_met";
    case FlowStop::horizon_reached:
      return "horizon_reached";
    case FlowStop::left_domain:
      return "left_domain";
  }
  return "unknown";
}

double vector_field(double t, double x, const ScalarMap& map, const ThetaSchedule& schedule,
                    const ErrorModel& error) {
  return schedule.at_time(t) * (map(x) - x) + error.at_time(t);
}

ContinuousTrajectory integrate(const ScalarMap& map, const ThetaSchedule& schedule,
                               const ErrorModel& error, double x0, const FlowOptions& options) {
  const double h = options.step;
  if (!(h > 0.0 && h <= 0.1)) {
    throw std::invalid_argument(fmt::format("step must lie in (0, 0.1] (got {})", h));
  }
  if (!(options.horizon >= h)) {
    throw std::invalid_argument(
        fmt::format("horizon must be at least the step (got {})", options.horizon));
  }
  if (!(options.epsilon > 0.0)) {
    throw std::invalid_argument(fmt::format("epsilon must be positive (got {})", options.epsilon));
  }
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw DomainError(fmt::format("x0 = {} outside [0, 1]", x0));

  const auto field = [&](double t, double x) {
    return vector_field(t, project_unit(x), map, schedule, error);
  };

  ContinuousTrajectory traj;
  traj.step_size = h;
  const auto steps = static_cast<std::uint64_t>(std::llround(options.horizon / h));
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);

  double x = x0;
  for (std::uint64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    traj.times.push_back(t);
    traj.states.push_back(x);
    if (std::abs(map(x) - x) < options.epsilon) {
      traj.stop_reason = FlowStop::residual_met;
      return traj;
    }
    if (k == steps) {
      traj.stop_reason = FlowStop::horizon_reached;
      return traj;
    }
    const double k1 = field(t, x);
    const double k2 = field(t + 0.5 * h, x + 0.5 * h * k1);
    const double k3 = field(t + 0.5 * h, x + 0.5 * h * k2);
    const double k4 = field(t + h, x + h * k3);
    double next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (next < 0.0 || next > 1.0) {
      const double excess = next < 0.0 ? -next : next - 1.0;
      if (!(excess <= kBoundaryTolerance)) {
        traj.stop_reason = FlowStop::left_domain;
        return traj;
      }
      next = project_unit(next);
      ++traj.clamp_events;
    }
    x = next;
  }
}

double closed_form_linear(double c, double x0, double alpha, double t) {
  const double integral = alpha == 1.0 ? std::log1p(t)
                                       : (std::pow(1.0 + t, 1.0 - alpha) - 1.0) / (1.0 - alpha);
  return c + (x0 - c) * std::exp(-integral);
}

void write_flow_csv(std::ostream& out, const ContinuousTrajectory& traj, const ScalarMap& map,
                    const ThetaSchedule& schedule, const ErrorModel& error, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be positive");
  out << fmt::format("# step={:.17g} stop={} clamp_events={}\n", traj.step_size,
                     to_string(traj.stop_reason), traj.clamp_events);
  out << "t,x,theta,r,residual\n";
  const std::size_t count = traj.states.size();
  for (std::size_t i = 0; i < count; ++i) {
    if (i % stride != 0 && i + 1 != count) continue;
    const double t = traj.times[i];
    const double x = traj.states[i];
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", t, x, schedule.at_time(t),
                       error.at_time(t), map(x) - x);
  }
}

}  // namespace mann
