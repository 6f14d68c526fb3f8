#include "mann/scalar_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace mann {

namespace {

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(fmt::format("{}: argument {} outside [0, 1]", what, x));
  }
}

void validate_knots(const std::vector<Knot>& knots) {
  if (knots.size() < 2) {
    throw std::invalid_argument("piecewise-linear map needs at least two knots");
  }
  if (knots.front().x != 0.0 || knots.back().x != 1.0) {
    throw std::invalid_argument("piecewise-linear knots must start at x = 0 and end at x = 1");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i].y >= 0.0 && knots[i].y <= 1.0)) {
      throw std::invalid_argument(
          fmt::format("knot {} has y = {} outside [0, 1]", i, knots[i].y));
    }
    if (i > 0 && !(knots[i].x > knots[i - 1].x)) {
      throw std::invalid_argument(
          fmt::format("knot x values must be strictly increasing (knot {})", i));
    }
  }
}

double interpolate(const std::vector<Knot>& knots, double x) {
  auto upper = std::upper_bound(knots.begin(), knots.end(), x,
                                [](double v, const Knot& k) { return v < k.x; });
  if (upper == knots.end()) return knots.back().y;
  auto lower = std::prev(upper);
  const double t = (x - lower->x) / (upper->x - lower->x);
  return lower->y + t * (upper->y - lower->y);
}

}  // namespace

ScalarMap::ScalarMap(Evaluator evaluator, MapKind kind,
                     std::optional<std::vector<double>> known_fixed_points)
    : evaluator_(std::move(evaluator)),
      kind_(std::move(kind)),
      known_fixed_points_(std::move(known_fixed_points)) {
  if (auto* pl = std::get_if<PiecewiseLinear>(&kind_)) validate_knots(pl->knots);
  if (known_fixed_points_) {
    std::sort(known_fixed_points_->begin(), known_fixed_points_->end());
    for (double p : *known_fixed_points_) {
      require_unit(p, "known fixed point");
      if (std::abs(evaluator_(p) - p) > 1e-12) {
        throw std::invalid_argument(fmt::format("{} is not a fixed point of the map", p));
      }
    }
  }
}

double ScalarMap::operator()(double x) const {
  require_unit(x, "map evaluation");
  return evaluator_(x);
}

std::string ScalarMap::describe() const {
  if (const auto* a = std::get_if<Analytic>(&kind_)) return "analytic:" + a->name;
  std::string out = "knots:";
  for (const auto& k : std::get<PiecewiseLinear>(kind_).knots) {
    out += fmt::format("({:.17g},{:.17g})", k.x, k.y);
  }
  return out;
}

double eval_benchmark_map(double x) {
  require_unit(x, "benchmark map");
  if (x < 0.25) return 2.0 * (0.25 - x);
  if (x < 0.5) return 4.0 * (x - 0.25);
  if (x < 0.75) return 4.0 * (0.75 - x);
  return 2.0 * (x - 0.75);
}

double residual(const ScalarMap& map, double x) { return map(x) - x; }

std::vector<double> enumerate_fixed_points(const ScalarMap& map, double tol) {
  const auto* pl = std::get_if<PiecewiseLinear>(&map.kind());
  if (pl == nullptr) {
    throw std::invalid_argument("fixed-point enumeration requires a piecewise-linear map");
  }
  std::vector<double> roots;
  const auto& knots = pl->knots;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Knot& a = knots[i];
    const Knot& b = knots[i + 1];
    // g = y - x is linear on the segment.
    const double ga = a.y - a.x;
    const double gb = b.y - b.x;
    if (ga == gb) {
      if (ga == 0.0) {
        throw DegenerateSegmentError(fmt::format(
            "segment [{}, {}] lies on the diagonal: continuum of fixed points", a.x, b.x));
      }
      continue;
    }
    const double t = ga / (ga - gb);
    if (t < 0.0 || t > 1.0) continue;
    roots.push_back(t == 1.0 ? b.x : a.x + t * (b.x - a.x));
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() || r - unique.back() > tol) unique.push_back(r);
  }
  return unique;
}

ScalarMap piecewise_linear_map(std::vector<Knot> knots) {
  validate_knots(knots);
  auto shared = knots;
  return ScalarMap([k = std::move(shared)](double x) { return interpolate(k, x); },
                   PiecewiseLinear{std::move(knots)});
}

ScalarMap benchmark_map() {
  return ScalarMap(&eval_benchmark_map,
                   PiecewiseLinear{{{0.0, 0.5}, {0.25, 0.0}, {0.5, 1.0}, {0.75, 0.0}, {1.0, 0.5}}},
                   std::vector<double>{1.0 / 6.0, 1.0 / 3.0, 3.0 / 5.0});
}

ScalarMap unique_fixed_point_map() {
  return ScalarMap([](double x) { return std::cos(x); }, Analytic{"cosine"},
                   std::vector<double>{kCosineFixedPoint});
}

ScalarMap constant_map(double c) {
  require_unit(c, "constant map value");
  return ScalarMap([c](double) { return c; }, PiecewiseLinear{{{0.0, c}, {1.0, c}}},
                   std::vector<double>{c});
}

ScalarMap identity_map() {
  return ScalarMap([](double x) { return x; }, Analytic{"identity"});
}

ScalarMap load_knot_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open knot file '{}'", path.string()));
  }
  std::vector<Knot> knots;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    Knot k{};
    std::string trailing;
    if (!(fields >> k.x >> k.y) || (fields >> trailing)) {
      throw std::invalid_argument(fmt::format("{}:{}: expected \"x y\"", path.string(), line_no));
    }
    knots.push_back(k);
  }
  try {
    return piecewise_linear_map(std::move(knots));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
  }
}

ScalarMap resolve_map(const std::string& name_or_path) {
  if (name_or_path == "paper-sec4") return benchmark_map();
  if (name_or_path == "cosine") return unique_fixed_point_map();
  if (name_or_path == "identity") return identity_map();
  constexpr std::string_view kConstant = "constant:";
  if (name_or_path.starts_with(kConstant)) {
    const std::string value = name_or_path.substr(kConstant.size());
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw std::invalid_argument(fmt::format("map: cannot parse constant in '{}'", name_or_path));
    }
    return constant_map(c);
  }
  if (!std::filesystem::exists(name_or_path)) {
    throw std::invalid_argument(fmt::format(
        "map: '{}' is neither a registered map (paper-sec4, cosine, identity, constant:<c>) "
        "nor an existing knot file",
        name_or_path));
  }
  return load_knot_file(name_or_path);
}

}  // namespace mann
