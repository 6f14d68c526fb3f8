#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string_view>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mann/cli.hpp"
#include "mann/scalar_map.hpp"

namespace mann::cli {

namespace {

struct KeySpec {
  std::string_view key;
  std::string_view flag;  // empty: file only
  std::string_view help;
};

constexpr KeySpec kKeys[] = {
    {"command", "", "solve | ode | bench | validate"},
    {"map", "--map", "registry name (paper-sec4, cosine, identity, constant:<c>) or knot file"},
    {"theta.family", "--theta", "power | classic_mann | constant"},
    {"theta.alpha", "--alpha", "exponent of the power schedule"},
    {"theta.value", "--theta-value", "value of the constant schedule"},
    {"error.family", "--error", "zero | uniform_decay"},
    {"error.amplitude", "--amplitude", "noise amplitude A"},
    {"x0", "--x0", "initial point in [0, 1] or \"random\""},
    {"epsilon", "--epsilon", "residual tolerance |f(x) - x| < epsilon"},
    {"max_iterations", "--max-iterations", "iteration cap"},
    {"projected", "", "project iterates onto [0, 1]"},
    {"classify_tol", "--classify-tol", "distance for naming the reached fixed point"},
    {"horizon", "--horizon", "ODE horizon T"},
    {"step", "--step", "ODE step h"},
    {"stride", "--stride", "CSV subsampling stride"},
    {"runs", "--runs", "Monte Carlo runs per cell"},
    {"paper_tables", "", "run the published 2 x 7 x 4 grid"},
    {"amplitudes", "--amplitudes", "bench amplitudes (comma separated)"},
    {"alphas", "--alphas", "bench exponents (comma separated)"},
    {"epsilons", "--epsilons", "bench tolerances (comma separated)"},
    {"threads", "--threads", "worker threads for bench (0 = hardware)"},
    {"seed", "--seed", "64-bit seed"},
    {"output", "--output", "CSV destination (default standard output)"},
};

constexpr std::string_view kCommandNames[] = {"solve", "ode", "bench", "validate"};

bool is_known_key(std::string_view key) {
  return std::any_of(std::begin(kKeys), std::end(kKeys),
                     [&](const KeySpec& k) { return k.key == key; });
}

std::optional<Command> parse_command(std::string_view s) {
  if (s == "solve") return Command::solve;
  if (s == "ode") return Command::ode;
  if (s == "bench") return Command::bench;
  if (s == "validate") return Command::validate;
  return std::nullopt;
}

// --- config file reader ----------------------------------------------------

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

// Splits on commas that are not inside quotes or brackets.
std::vector<std::string_view> split_top_level(std::string_view s) {
  std::vector<std::string_view> parts;
  int depth = 0;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') quoted = !quoted;
    if (quoted) continue;
    if (c == '{' || c == '[') ++depth;
    if (c == '}' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  const auto last = trim(s.substr(start));
  if (!last.empty() || !parts.empty()) parts.push_back(last);
  return parts;
}

class FileReader {
 public:
  explicit FileReader(std::string path) : path_(std::move(path)) {}

  void assign(const std::string& key, std::string_view raw, int line_no) {
    const auto value = trim(raw);
    if (value.empty()) fail(line_no, fmt::format("key '{}' has no value", key));
    if (value.front() == '{') {
      if (value.back() != '}') fail(line_no, fmt::format("unterminated inline table for '{}'", key));
      for (auto part : split_top_level(value.substr(1, value.size() - 2))) {
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) {
          fail(line_no, fmt::format("expected 'name = value' inside '{}'", key));
        }
        assign(key + "." + std::string(trim(part.substr(0, eq))), part.substr(eq + 1), line_no);
      }
      return;
    }
    std::string flat;
    if (value.front() == '[') {
      if (value.back() != ']') fail(line_no, fmt::format("unterminated array for '{}'", key));
      const auto items = split_top_level(value.substr(1, value.size() - 2));
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) flat += ',';
        flat += unquote(items[i], line_no);
      }
    } else {
      flat = unquote(value, line_no);
    }
    if (values_.contains(key)) fail(line_no, fmt::format("duplicate key '{}'", key));
    values_[key] = std::move(flat);
  }

  std::map<std::string, std::string> read() {
    std::ifstream in(path_);
    if (!in) throw std::runtime_error(fmt::format("cannot open config file '{}'", path_));
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string stripped = strip_comment(line);
      const auto body = trim(stripped);
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') fail(line_no, "malformed section header");
        section = std::string(trim(body.substr(1, body.size() - 2)));
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
      const std::string name(trim(body.substr(0, eq)));
      if (name.empty()) fail(line_no, "empty key");
      assign(section.empty() || section == "run" ? name : section + "." + name, body.substr(eq + 1),
             line_no);
    }
    return std::move(values_);
  }

 private:
  [[noreturn]] void fail(int line_no, const std::string& what) const {
    throw std::invalid_argument(fmt::format("{}:{}: {}", path_, line_no, what));
  }

  std::string unquote(std::string_view v, int line_no) const {
    if (!v.empty() && v.front() == '"') {
      if (v.size() < 2 || v.back() != '"') fail(line_no, "unterminated string");
      return std::string(v.substr(1, v.size() - 2));
    }
    return std::string(v);
  }

  std::string path_;
  std::map<std::string, std::string> values_;
};

// --- typed conversion --------------------------------------------------------

class Converter {
 public:
  explicit Converter(std::vector<std::string>& errors) : errors_(errors) {}

  void error(std::string msg) { errors_.push_back(std::move(msg)); }

  std::optional<double> real(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) {
      error(fmt::format("{}: '{}' is not a number", key, text));
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::uint64_t> integer(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) {
      error(fmt::format("{}: '{}' is not a non-negative integer", key, text));
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> boolean(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    error(fmt::format("{}: '{}' is not true/false", key, text));
    return std::nullopt;
  }

  std::vector<double> reals(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto comma = text.find(',', start);
      if (comma == std::string::npos) comma = text.size();
      const std::string item(trim(std::string_view(text).substr(start, comma - start)));
      if (auto v = real(key, item)) out.push_back(*v);
      start = comma + 1;
    }
    return out;
  }

 private:
  std::vector<std::string>& errors_;
};

bool in_open_closed_unit(double v) { return v > 0.0 && v <= 1.0; }

void build_config(const std::map<std::string, std::string>& values, RunConfig& cfg,
                  std::vector<std::string>& errors) {
  Converter conv(errors);
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  const auto set_real = [&](const char* key, double& target) {
    if (const auto* v = get(key)) {
      if (auto r = conv.real(key, *v)) target = *r;
    }
  };
  const auto set_int = [&](const char* key, std::uint64_t& target) {
    if (const auto* v = get(key)) {
      if (auto r = conv.integer(key, *v)) target = *r;
    }
  };
  const auto set_bool = [&](const char* key, bool& target) {
    if (const auto* v = get(key)) {
      if (auto r = conv.boolean(key, *v)) target = *r;
    }
  };

  if (const auto* v = get("map")) cfg.map = *v;
  if (const auto* v = get("theta.family")) cfg.theta_family = *v;
  set_real("theta.alpha", cfg.alpha);
  set_real("theta.value", cfg.theta_value);
  if (const auto* v = get("error.family")) {
    cfg.error_family = *v;
  } else if (get("error.amplitude") != nullptr) {
    // An amplitude alone selects the stochastic family.
    cfg.error_family = "uniform_decay";
  }
  set_real("error.amplitude", cfg.amplitude);
  if (const auto* v = get("x0")) {
    if (*v == "random") {
      cfg.x0.reset();
    } else if (auto r = conv.real("x0", *v)) {
      cfg.x0 = *r;
    }
  }
  set_real("epsilon", cfg.epsilon);
  set_int("max_iterations", cfg.max_iterations);
  set_bool("projected", cfg.projected);
  set_real("classify_tol", cfg.classify_tol);
  set_real("horizon", cfg.horizon);
  set_real("step", cfg.step);
  set_int("stride", cfg.stride);
  set_int("runs", cfg.runs);
  set_bool("paper_tables", cfg.paper_tables);
  if (const auto* v = get("amplitudes")) cfg.amplitudes = conv.reals("amplitudes", *v);
  if (const auto* v = get("alphas")) cfg.alphas = conv.reals("alphas", *v);
  if (const auto* v = get("epsilons")) cfg.epsilons = conv.reals("epsilons", *v);
  if (const auto* v = get("threads")) {
    if (auto r = conv.integer("threads", *v)) cfg.threads = static_cast<unsigned>(*r);
  }
  if (const auto* v = get("seed")) {
    if (auto r = conv.integer("seed", *v)) cfg.seed = *r;
  }
  if (const auto* v = get("output")) cfg.output = *v;
}

void validate(RunConfig& cfg, std::vector<std::string>& errors, bool& io_error) {
  const bool sweeping = cfg.command == Command::bench;
  const bool any_alpha = cfg.command == Command::validate;

  if (cfg.theta_family == "power") {
    if (any_alpha ? !(cfg.alpha > 0.0) : !in_open_closed_unit(cfg.alpha)) {
      errors.push_back(any_alpha
                           ? fmt::format("theta.alpha: alpha must be positive for the power family (got {})", cfg.alpha)
                           : fmt::format("theta.alpha: alpha must lie in (0, 1] for the power family (got {})", cfg.alpha));
    }
  } else if (cfg.theta_family == "constant") {
    if (!(cfg.theta_value >= 0.0 && cfg.theta_value <= 1.0)) {
      errors.push_back(fmt::format("theta.value: must lie in [0, 1] (got {})", cfg.theta_value));
    }
  } else if (cfg.theta_family != "classic_mann") {
    errors.push_back(fmt::format(
        "theta.family: unknown family '{}' (expected power, classic_mann or constant)",
        cfg.theta_family));
  }

  if (cfg.error_family == "uniform_decay") {
    if (!(cfg.amplitude > 0.0)) {
      errors.push_back(fmt::format("error.amplitude: must be positive (got {})", cfg.amplitude));
    }
  } else if (cfg.error_family != "zero") {
    errors.push_back(fmt::format(
        "error.family: unknown family '{}' (expected zero or uniform_decay)", cfg.error_family));
  }

  if (cfg.x0 && !(*cfg.x0 >= 0.0 && *cfg.x0 <= 1.0)) {
    errors.push_back(fmt::format("x0: must lie in [0, 1] or be \"random\" (got {})", *cfg.x0));
  }
  if (!(cfg.epsilon > 0.0)) {
    errors.push_back(fmt::format("epsilon: must be positive (got {})", cfg.epsilon));
  }
  if (cfg.max_iterations < 1) errors.push_back("max_iterations: must be at least 1");
  if (!(cfg.classify_tol > 0.0)) {
    errors.push_back(fmt::format("classify_tol: must be positive (got {})", cfg.classify_tol));
  }
  if (!(cfg.step > 0.0 && cfg.step <= 0.1)) {
    errors.push_back(fmt::format("step: must lie in (0, 0.1] (got {})", cfg.step));
  }
  if (!(cfg.horizon >= cfg.step)) {
    errors.push_back(fmt::format("horizon: must be at least step (got {})", cfg.horizon));
  }
  if (cfg.stride < 1) errors.push_back("stride: must be at least 1");

  if (sweeping) {
    if (cfg.runs < 1) errors.push_back("runs: must be at least 1");
    if (!cfg.paper_tables) {
      if (cfg.amplitudes.empty()) cfg.amplitudes = {cfg.amplitude};
      if (cfg.alphas.empty()) cfg.alphas = {cfg.alpha};
      if (cfg.epsilons.empty()) cfg.epsilons = {cfg.epsilon};
    }
    for (double a : cfg.amplitudes) {
      if (!(a > 0.0)) errors.push_back(fmt::format("amplitudes: {} is not positive", a));
    }
    for (double a : cfg.alphas) {
      if (!in_open_closed_unit(a)) {
        errors.push_back(fmt::format("alphas: alpha must lie in (0, 1] for the power family (got {})", a));
      }
    }
    for (double e : cfg.epsilons) {
      if (!(e > 0.0 && e < 1.0)) errors.push_back(fmt::format("epsilons: {} outside (0, 1)", e));
    }
    const auto has_dupes = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return std::adjacent_find(v.begin(), v.end()) != v.end();
    };
    if (has_dupes(cfg.amplitudes)) errors.push_back("amplitudes: duplicate values");
    if (has_dupes(cfg.alphas)) errors.push_back("alphas: duplicate values");
    if (has_dupes(cfg.epsilons)) errors.push_back("epsilons: duplicate values");
  }

  if (cfg.command == Command::solve || cfg.command == Command::ode) {
    try {
      (void)resolve_map(cfg.map);
    } catch (const std::invalid_argument& e) {
      errors.push_back(fmt::format("map: {}", e.what()));
    } catch (const std::exception& e) {
      errors.push_back(fmt::format("map: {}", e.what()));
      io_error = true;
    }
  }
}

}  // namespace

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::solve:
      return "solve";
    case Command::ode:
      return "ode";
    case Command::bench:
      return "bench";
    case Command::validate:
      return "validate";
  }
  return "unknown";
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  return FileReader(path.string()).read();
}

ParseOutcome parse_config(const std::vector<std::string>& args,
                          const std::optional<std::filesystem::path>& file,
                          const std::optional<std::string>& env_seed) {
  ParseOutcome outcome;
  std::map<std::string, std::string> flags;

  CLI::App app{"Perturbed Mann fixed-point iteration on [0, 1]", "mann"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  for (auto name : kCommandNames) {
    app.add_subcommand(std::string(name), "")->fallthrough();
  }
  app.get_subcommand("solve")->description("iterate the discrete process");
  app.get_subcommand("ode")->description("integrate the continuous-time flow");
  app.get_subcommand("bench")->description("Monte Carlo iteration-count tables");
  app.get_subcommand("validate")->description("check the four convergence hypotheses");

  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "typed key-value config file");
  for (const auto& spec : kKeys) {
    if (spec.flag.empty()) continue;
    const std::string key(spec.key);
    app.add_option_function<std::string>(
        std::string(spec.flag), [&flags, key](const std::string& v) { flags[key] = v; },
        std::string(spec.help));
  }
  app.add_flag_callback("--projected", [&flags] { flags["projected"] = "true"; },
                        "project iterates onto [0, 1] (default)");
  app.add_flag_callback("--no-projected", [&flags] { flags["projected"] = "false"; },
                        "iterate without projection; leaving [0, 1] means divergence");
  app.add_flag_callback("--paper-tables", [&flags] { flags["paper_tables"] = "true"; },
                        "bench the published grid");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    outcome.help = app.help();
    return outcome;
  } catch (const CLI::ParseError& e) {
    outcome.errors.push_back(fmt::format("command line: {}", e.what()));
    return outcome;
  }

  std::optional<Command> command;
  for (auto name : kCommandNames) {
    if (app.got_subcommand(std::string(name))) command = parse_command(name);
  }

  std::map<std::string, std::string> file_values;
  const std::optional<std::filesystem::path> path =
      config_path ? std::optional<std::filesystem::path>(*config_path) : file;
  if (path) {
    try {
      file_values = read_config_file(*path);
    } catch (const std::invalid_argument& e) {
      outcome.errors.push_back(fmt::format("config: {}", e.what()));
      return outcome;
    } catch (const std::exception& e) {
      outcome.errors.push_back(fmt::format("config: {}", e.what()));
      outcome.io_error = true;
      return outcome;
    }
  }

  if (!command) {
    if (const auto it = file_values.find("command"); it != file_values.end()) {
      command = parse_command(it->second);
      if (!command) {
        outcome.errors.push_back(fmt::format("command: unknown command '{}' in {}", it->second,
                                             path->string()));
        return outcome;
      }
    } else {
      outcome.errors.push_back("command: missing (expected solve, ode, bench or validate)");
      return outcome;
    }
  }

  // Resolve file keys: command sections apply only to their own command.
  std::map<std::string, std::string> merged;
  for (const auto& [raw_key, value] : file_values) {
    std::string key = raw_key;
    if (key == "command") continue;
    bool skip = false;
    for (auto name : kCommandNames) {
      const std::string prefix = std::string(name) + ".";
      if (key.starts_with(prefix)) {
        skip = parse_command(name) != command;
        key = key.substr(prefix.size());
      }
    }
    if (key == "error.seed") key = "seed";
    if (!is_known_key(key)) {
      outcome.errors.push_back(fmt::format("{}: unknown key '{}'", path->string(), raw_key));
      continue;
    }
    if (!skip) merged[key] = value;
  }
  std::string seed_source = merged.contains("seed") ? "file" : "default";
  for (const auto& [key, value] : flags) merged[key] = value;
  if (flags.contains("seed")) seed_source = "flag";
  if (!merged.contains("seed") && env_seed) {
    merged["seed"] = *env_seed;
    seed_source = "env:MANN_SEED";
  }

  RunConfig cfg;
  cfg.command = *command;
  cfg.seed_source = seed_source;
  build_config(merged, cfg, outcome.errors);
  validate(cfg, outcome.errors, outcome.io_error);
  if (outcome.errors.empty()) outcome.config = std::move(cfg);
  return outcome;
}

}  // namespace mann::cli
