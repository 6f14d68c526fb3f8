#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "mann/rng.hpp"

namespace mann {

// ---------------------------------------------------------------------------
// Step-size schedules
// ---------------------------------------------------------------------------

/// theta_n = (n+1)^-alpha, theta(t) = (1+t)^-alpha.
struct PowerFamily {
  double alpha;
};

/// theta_n = 1/(n+1): the original averaging weights.
struct ClassicMann {};

struct ConstantFamily {
  double value;
};

struct CustomSchedule {
  std::function<double(std::uint64_t)> discrete;
  /// Optional; when absent theta(t) = discrete(floor(t)).
  std::function<double(double)> continuous;
};

using ScheduleFamily = std::variant<PowerFamily, ClassicMann, ConstantFamily, CustomSchedule>;

class ThetaSchedule {
 public:
  /// Throws std::invalid_argument for alpha <= 0 or constants outside [0, 1].
  explicit ThetaSchedule(ScheduleFamily family);

  static ThetaSchedule power(double alpha) { return ThetaSchedule(PowerFamily{alpha}); }
  static ThetaSchedule classic_mann() { return ThetaSchedule(ClassicMann{}); }
  static ThetaSchedule constant(double value) { return ThetaSchedule(ConstantFamily{value}); }

  const ScheduleFamily& family() const noexcept { return family_; }

  double at(std::uint64_t n) const;
  double at_time(double t) const;

  std::string describe() const;

 private:
  ScheduleFamily family_;
};

/// theta_n for the schedule, in [0, 1] for the built-in families.
double theta_at(const ThetaSchedule& schedule, std::uint64_t n);

// ---------------------------------------------------------------------------
// Error models
// ---------------------------------------------------------------------------

struct ZeroError {};

struct DeterministicError {
  std::function<double(std::uint64_t)> discrete;
  std::function<double(double)> continuous;
};

/// r_n = A * M_n / (1 + n^2) with M_n i.i.d. uniform on [-1, 1].
/// Continuous analogue: r(t) = A * sin(3t) / (1 + t^2).
struct UniformDecay {
  double amplitude;
};

using ErrorFamily = std::variant<ZeroError, DeterministicError, UniformDecay>;

class ErrorModel {
 public:
  explicit ErrorModel(ErrorFamily family, std::uint64_t seed = 0);

  static ErrorModel zero() { return ErrorModel(ZeroError{}); }
  static ErrorModel uniform_decay(double amplitude, std::uint64_t seed) {
    return ErrorModel(UniformDecay{amplitude}, seed);
  }

  const ErrorFamily& family() const noexcept { return family_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool is_stochastic() const noexcept { return std::holds_alternative<UniformDecay>(family_); }

  /// The stream owned by run `run_index` of this model.
  Xoshiro256 stream(std::uint64_t run_index = 0) const { return Xoshiro256(seed_, run_index); }

  /// A / (1 + n^2) for uniform_decay, |r_n| for deterministic, 0 for zero.
  double envelope(std::uint64_t n) const;

  double at_time(double t) const;

  std::string describe() const;

 private:
  ErrorFamily family_;
  std::uint64_t seed_;
};

/// r_n. For uniform_decay exactly one draw is taken from `rng`; the other
/// families leave `rng` untouched. Callers must request n = 0, 1, 2, ... in
/// order on a given stream.
double error_at(const ErrorModel& model, std::uint64_t n, Xoshiro256& rng);

/// Default continuous perturbation A sin(3t) / (1 + t^2).
double sinusoidal_decay(double amplitude, double t);

// ---------------------------------------------------------------------------
// Convergence hypotheses
// ---------------------------------------------------------------------------

enum class Verdict { holds, fails, unknown };

const char* to_string(Verdict v) noexcept;

struct VerdictLine {
  Verdict verdict = Verdict::unknown;
  std::string justification;
};

/// The four sufficient conditions for convergence of the perturbed process:
/// theta_n -> 0, sum theta_n = inf, r_n / theta_n -> 0, sum r_n converges.
struct HypothesisReport {
  VerdictLine theta_vanishes;
  VerdictLine theta_sum_diverges;
  VerdictLine ratio_vanishes;
  VerdictLine error_sum_converges;

  bool all_hold() const noexcept {
    return theta_vanishes.verdict == Verdict::holds &&
           theta_sum_diverges.verdict == Verdict::holds &&
           ratio_vanishes.verdict == Verdict::holds &&
           error_sum_converges.verdict == Verdict::holds;
  }
  bool any_fails() const noexcept {
    return theta_vanishes.verdict == Verdict::fails ||
           theta_sum_diverges.verdict == Verdict::fails ||
           ratio_vanishes.verdict == Verdict::fails ||
           error_sum_converges.verdict == Verdict::fails;
  }
};

/// Closed-form verdicts for the built-in families. Custom schedules and
/// deterministic errors are sampled over their first 10^5 terms and reported
/// as unknown unless a definite violation shows up.
HypothesisReport validate_hypotheses(const ThetaSchedule& schedule, const ErrorModel& model);

}  // namespace mann
