#include "mann/schedules.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace mann {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr std::uint64_t kSampleTerms = 100000;

VerdictLine holds(std::string why) { return {Verdict::holds, std::move(why)}; }
VerdictLine fails(std::string why) { return {Verdict::fails, std::move(why)}; }
VerdictLine unknown(std::string why) { return {Verdict::unknown, std::move(why)}; }

// First index in [0, kSampleTerms) where theta_n is non-finite or outside
// [0, 1], if any.
std::optional<std::uint64_t> first_bad_theta(const CustomSchedule& s) {
  for (std::uint64_t n = 0; n < kSampleTerms; ++n) {
    const double v = s.discrete(n);
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) return n;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> first_nonfinite_error(const DeterministicError& e) {
  double partial = 0.0;
  for (std::uint64_t n = 0; n < kSampleTerms; ++n) {
    partial += e.discrete(n);
    if (!std::isfinite(partial)) return n;
  }
  return std::nullopt;
}

}  // namespace

ThetaSchedule::ThetaSchedule(ScheduleFamily family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const PowerFamily& p) {
                   if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) {
                     throw std::invalid_argument(
                         fmt::format("theta.alpha must be positive (got {})", p.alpha));
                   }
                 },
                 [](const ConstantFamily& c) {
                   if (!(c.value >= 0.0 && c.value <= 1.0)) {
                     throw std::invalid_argument(
                         fmt::format("theta.value must lie in [0, 1] (got {})", c.value));
                   }
                 },
                 [](const CustomSchedule& c) {
                   if (!c.discrete) throw std::invalid_argument("custom schedule needs an evaluator");
                 },
                 [](const ClassicMann&) {},
             },
             family_);
}

double ThetaSchedule::at(std::uint64_t n) const {
  return std::visit(
      overloaded{
          [n](const PowerFamily& p) {
            return std::exp(-p.alpha * std::log(static_cast<double>(n) + 1.0));
          },
          [n](const ClassicMann&) { return 1.0 / (static_cast<double>(n) + 1.0); },
          [](const ConstantFamily& c) { return c.value; },
          [n](const CustomSchedule& c) { return c.discrete(n); },
      },
      family_);
}

double ThetaSchedule::at_time(double t) const {
  return std::visit(
      overloaded{
          [t](const PowerFamily& p) { return std::pow(1.0 + t, -p.alpha); },
          [t](const ClassicMann&) { return 1.0 / (1.0 + t); },
          [](const ConstantFamily& c) { return c.value; },
          [t](const CustomSchedule& c) {
            if (c.continuous) return c.continuous(t);
            return c.discrete(static_cast<std::uint64_t>(std::floor(std::max(t, 0.0))));
          },
      },
      family_);
}

std::string ThetaSchedule::describe() const {
  return std::visit(
      overloaded{
          [](const PowerFamily& p) { return fmt::format("power(alpha={:.17g})", p.alpha); },
          [](const ClassicMann&) { return std::string("classic_mann"); },
          [](const ConstantFamily& c) { return fmt::format("constant(value={:.17g})", c.value); },
          [](const CustomSchedule&) { return std::string("custom"); },
      },
      family_);
}

double theta_at(const ThetaSchedule& schedule, std::uint64_t n) { return schedule.at(n); }

ErrorModel::ErrorModel(ErrorFamily family, std::uint64_t seed)
    : family_(std::move(family)), seed_(seed) {
  if (const auto* u = std::get_if<UniformDecay>(&family_)) {
    if (!(u->amplitude > 0.0) || !std::isfinite(u->amplitude)) {
      throw std::invalid_argument(
          fmt::format("error.amplitude must be positive (got {})", u->amplitude));
    }
  }
  if (const auto* d = std::get_if<DeterministicError>(&family_); d && !d->discrete) {
    throw std::invalid_argument("deterministic error model needs an evaluator");
  }
}

double ErrorModel::envelope(std::uint64_t n) const {
  const double nn = static_cast<double>(n);
  return std::visit(overloaded{
                        [](const ZeroError&) { return 0.0; },
                        [n](const DeterministicError& d) { return std::abs(d.discrete(n)); },
                        [nn](const UniformDecay& u) { return u.amplitude / (1.0 + nn * nn); },
                    },
                    family_);
}

double ErrorModel::at_time(double t) const {
  return std::visit(overloaded{
                        [](const ZeroError&) { return 0.0; },
                        [t](const DeterministicError& d) {
                          return d.continuous ? d.continuous(t) : 0.0;
                        },
                        [t](const UniformDecay& u) { return sinusoidal_decay(u.amplitude, t); },
                    },
                    family_);
}

std::string ErrorModel::describe() const {
  return std::visit(overloaded{
                        [](const ZeroError&) { return std::string("zero"); },
                        [](const DeterministicError&) { return std::string("deterministic"); },
                        [this](const UniformDecay& u) {
                          return fmt::format("uniform_decay(amplitude={:.17g},seed={})",
                                             u.amplitude, seed_);
                        },
                    },
                    family_);
}

double error_at(const ErrorModel& model, std::uint64_t n, Xoshiro256& rng) {
  const double nn = static_cast<double>(n);
  return std::visit(overloaded{
                        [](const ZeroError&) { return 0.0; },
                        [n](const DeterministicError& d) { return d.discrete(n); },
                        [&rng, nn](const UniformDecay& u) {
                          return u.amplitude * rng.uniform_pm1() / (1.0 + nn * nn);
                        },
                    },
                    model.family());
}

double sinusoidal_decay(double amplitude, double t) {
  return amplitude * std::sin(3.0 * t) / (1.0 + t * t);
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::fails:
      return "fails";
    case Verdict::unknown:
      return "unknown";
  }
  return "unknown";
}

HypothesisReport validate_hypotheses(const ThetaSchedule& schedule, const ErrorModel& model) {
  HypothesisReport report;

  // Exponent p such that theta_n ~ n^-p, when the schedule has one. A
  // constant zero schedule is tracked separately.
  std::optional<double> decay_exponent;
  bool theta_identically_zero = false;
  bool theta_sampled_ok = true;

  std::visit(
      overloaded{
          [&](const PowerFamily& p) {
            decay_exponent = p.alpha;
            report.theta_vanishes = holds(fmt::format("(n+1)^-{} -> 0 since alpha > 0", p.alpha));
            report.theta_sum_diverges =
                p.alpha <= 1.0
                    ? holds(fmt::format("p-series with p = {} <= 1 diverges", p.alpha))
                    : fails(fmt::format("p-series with p = {} > 1 converges", p.alpha));
          },
          [&](const ClassicMann&) {
            decay_exponent = 1.0;
            report.theta_vanishes = holds("1/(n+1) -> 0");
            report.theta_sum_diverges = holds("harmonic series diverges");
          },
          [&](const ConstantFamily& c) {
            decay_exponent = 0.0;
            theta_identically_zero = c.value == 0.0;
            if (theta_identically_zero) {
              report.theta_vanishes = holds("theta_n = 0 for all n");
              report.theta_sum_diverges = fails("sum of zeros is 0");
            } else {
              report.theta_vanishes = fails(fmt::format("theta_n = {} does not vanish", c.value));
              report.theta_sum_diverges = holds("constant positive terms diverge");
            }
          },
          [&](const CustomSchedule& c) {
            if (auto bad = first_bad_theta(c)) {
              theta_sampled_ok = false;
              report.theta_vanishes = fails(fmt::format(
                  "theta_{} = {} lies outside [0, 1]", *bad, c.discrete(*bad)));
            } else {
              report.theta_vanishes =
                  unknown(fmt::format("custom schedule: first {} terms in [0, 1]", kSampleTerms));
            }
            report.theta_sum_diverges = unknown("divergence is not decidable from finitely many terms");
          },
      },
      schedule.family());

  std::visit(
      overloaded{
          [&](const ZeroError&) {
            report.error_sum_converges = holds("r_n = 0 for all n");
            if (theta_identically_zero) {
              report.ratio_vanishes = fails("r_n / theta_n is 0/0 for all n");
            } else if (decay_exponent) {
              report.ratio_vanishes = holds("r_n = 0 for all n");
            } else {
              report.ratio_vanishes = theta_sampled_ok
                                          ? unknown("r_n = 0 but custom theta_n may vanish")
                                          : fails("custom schedule leaves [0, 1]");
            }
          },
          [&](const UniformDecay& u) {
            report.error_sum_converges =
                holds(fmt::format("|r_n| <= {}/(1+n^2), summable", u.amplitude));
            if (theta_identically_zero) {
              report.ratio_vanishes = fails("theta_n = 0 so r_n / theta_n is undefined");
            } else if (decay_exponent) {
              const double p = *decay_exponent;
              report.ratio_vanishes =
                  p < 2.0 ? holds(fmt::format("A (n+1)^{} / (1+n^2) -> 0 since exponent < 2", p))
                          : fails(fmt::format("A (n+1)^{} / (1+n^2) does not vanish", p));
            } else {
              report.ratio_vanishes = unknown("custom schedule: ratio bound not closed-form");
            }
          },
          [&](const DeterministicError& d) {
            if (auto bad = first_nonfinite_error(d)) {
              report.error_sum_converges =
                  fails(fmt::format("partial sum not finite at n = {}", *bad));
              report.ratio_vanishes = fails(fmt::format("r_{} not finite", *bad));
            } else {
              report.error_sum_converges =
                  unknown(fmt::format("deterministic error: first {} partial sums finite", kSampleTerms));
              report.ratio_vanishes = unknown("deterministic error: ratio not closed-form");
            }
          },
      },
      model.family());

  return report;
}

}  // namespace mann
