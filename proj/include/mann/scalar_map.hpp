#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mann {

/// Raised when an argument lies outside the unit interval (or another
/// documented domain).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A piecewise-linear segment lying on the diagonal, i.e. a continuum of
/// fixed points.
class DegenerateSegmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Knot {
  double x;
  double y;
};

struct PiecewiseLinear {
  std::vector<Knot> knots;
};

struct Analytic {
  std::string name;
};

using MapKind = std::variant<PiecewiseLinear, Analytic>;

/// Continuous self-map of [0, 1].
///
/// Evaluation outside [0, 1] raises DomainError. Values are immutable after
/// construction and may be shared between threads.
class ScalarMap {
 public:
  using Evaluator = std::function<double(double)>;

  ScalarMap(Evaluator evaluator, MapKind kind,
            std::optional<std::vector<double>> known_fixed_points = std::nullopt);

  double operator()(double x) const;

  const MapKind& kind() const noexcept { return kind_; }
  bool is_piecewise_linear() const noexcept {
    return std::holds_alternative<PiecewiseLinear>(kind_);
  }
  const std::optional<std::vector<double>>& known_fixed_points() const noexcept {
    return known_fixed_points_;
  }

  /// Stable textual description, used for config fingerprints.
  std::string describe() const;

 private:
  Evaluator evaluator_;
  MapKind kind_;
  std::optional<std::vector<double>> known_fixed_points_;
};

/// The four-branch benchmark map. Branches are taken on the half-open
/// intervals [0, 1/4), [1/4, 1/2), [1/2, 3/4), [3/4, 1]; adjacent formulas
/// agree at the breakpoints.
double eval_benchmark_map(double x);

/// f(x) - x.
double residual(const ScalarMap& map, double x);

/// Closed-form fixed points of a piecewise-linear map, sorted, with roots
/// closer than `tol` merged. Throws DegenerateSegmentError when a segment
/// coincides with the diagonal and std::invalid_argument for analytic maps.
std::vector<double> enumerate_fixed_points(const ScalarMap& map, double tol = 1e-9);

/// Linear interpolation through `knots`. Knots must be strictly increasing in
/// x, start at x = 0, end at x = 1 and have y in [0, 1].
ScalarMap piecewise_linear_map(std::vector<Knot> knots);

/// Benchmark map with three fixed points {1/6, 1/3, 3/5}.
ScalarMap benchmark_map();

/// cos restricted to [0, 1]: a self-map with exactly one fixed point.
ScalarMap unique_fixed_point_map();

/// f(x) = c for all x.
ScalarMap constant_map(double c);

ScalarMap identity_map();

/// Fixed point of cos on [0, 1] (the Dottie number).
inline constexpr double kCosineFixedPoint = 0.7390851332151607;

/// Reads a knot list: one "x y" pair per line; blank lines and lines
/// starting with '#' are skipped.
ScalarMap load_knot_file(const std::filesystem::path& path);

/// Resolves a registry name ("paper-sec4", "cosine", "identity",
/// "constant:<c>") or, failing that, a knot-file path.
ScalarMap resolve_map(const std::string& name_or_path);

}  // namespace mann
