#pragma once

// Batch run description shared by the command line and `--config` files. JSON
// keys are the long flag names.

#include <algorithm>
#include <charconv>
#include <complex>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anderson/covariant.hpp"
#include "anderson/densities.hpp"
#include "anderson/errors.hpp"

namespace anderson {

/// Inclusive grid `start:stop:count`.
struct Grid {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> points() const {
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(count == 1 ? start : start + (stop - start) * k / (count - 1));
    return out;
  }

  bool operator==(const Grid&) const = default;
};

namespace detail {

/// Shortest text that reads back to the same double.
inline std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double read_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ConfigError(what + ": cannot read '" + std::string(s) + "' as a number");
  return v;
}

}  // namespace detail

inline Grid parse_grid(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos) throw ConfigError("grid: expected start:stop:count, got '" + std::string(text) + "'");
  Grid g;
  g.start = detail::read_double(text.substr(0, a), "grid start");
  g.stop = detail::read_double(text.substr(a + 1, b - a - 1), "grid stop");
  const double c = detail::read_double(text.substr(b + 1), "grid count");
  if (c < 1 || c != static_cast<int>(c)) throw ConfigError("grid: count must be a positive integer");
  g.count = static_cast<int>(c);
  if (g.count == 1 && g.start != g.stop) throw ConfigError("grid: a single point needs start == stop");
  return g;
}

inline std::string format_grid(const Grid& g) {
  return detail::fmt_double(g.start) + ":" + detail::fmt_double(g.stop) + ":" + std::to_string(g.count);
}

/// Parses `0.3+0.4i`, `-1-2i`, `0.5i`, `2`.
inline std::complex<double> parse_complex(std::string_view text) {
  const std::string what = "complex '" + std::string(text) + "'";
  if (text.empty()) throw ConfigError(what + ": empty");
  if (text.back() != 'i') return {detail::read_double(text, what), 0.0};
  text.remove_suffix(1);
  // split at the last sign that is not leading and not part of an exponent
  std::size_t cut = std::string_view::npos;
  for (std::size_t k = text.size(); k-- > 1;)
    if ((text[k] == '+' || text[k] == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
      cut = k;
      break;
    }
  auto imag_part = [&](std::string_view s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return detail::read_double(s.front() == '+' ? s.substr(1) : s, what);
  };
  if (cut == std::string_view::npos) return {0.0, imag_part(text)};
  return {detail::read_double(text.substr(0, cut), what), imag_part(text.substr(cut))};
}

inline std::string format_complex(std::complex<double> z) {
  std::string im = detail::fmt_double(z.imag());
  if (im.front() != '-') im = "+" + im;
  return detail::fmt_double(z.real()) + im + "i";
}

struct RunConfig {
  std::string command;
  std::string density = "gaussian:sigma2=1,r=1";
  int d = 1;
  double lambda = 0.0;
  std::vector<std::string> observables;
  std::optional<Grid> grid;
  std::optional<Grid> grid2;
  std::vector<std::complex<double>> z;
  std::string sigma;
  int order = 8;
  double gap = 0.0;
  double delta = 0.0;
  int L = 20;
  std::string boundary = "open";
  double eps = 0.0;
  double eta = 0.0;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  std::string output;
  std::string format = "json";
  bool deterministic = false;
  int threads = 0;
  bool certified = false;
  std::string route = "decomposed";

  bool operator==(const RunConfig&) const = default;
};

inline const std::set<std::string>& run_commands() {
  static const std::set<std::string> c = {"dos", "green", "corr2", "validate", "identities"};
  return c;
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = {{"command", c.command}, {"density", c.density},   {"d", c.d},
                      {"lambda", c.lambda},   {"observable", c.observables}, {"sigma", c.sigma},
                      {"order", c.order},     {"gap", c.gap},           {"delta", c.delta},
                      {"L", c.L},             {"boundary", c.boundary}, {"eps", c.eps},
                      {"eta", c.eta},         {"samples", c.samples},   {"seed", c.seed},
                      {"output", c.output},   {"format", c.format},     {"deterministic", c.deterministic},
                      {"threads", c.threads}, {"certified", c.certified}, {"route", c.route}};
  if (c.grid) j["grid"] = format_grid(*c.grid);
  if (c.grid2) j["grid2"] = format_grid(*c.grid2);
  j["z"] = nlohmann::json::array();
  for (const auto& z : c.z) j["z"].push_back(format_complex(z));
  return j;
}

namespace detail {

/// 1-based line of the first occurrence of "key" in the source text, 0 if absent.
inline int key_line(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

}  // namespace detail

/// Reads a config object. `source` is the raw text, used to attach line numbers
/// to field errors; `origin` prefixes messages (usually the file name).
inline RunConfig run_config_from_json(const nlohmann::json& j, const std::string& source = "",
                                      const std::string& origin = "config") {
  if (!j.is_object()) throw ConfigError(origin + ": top level must be an object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    const int line = detail::key_line(source, key);
    const std::string where = origin + (line ? ":" + std::to_string(line) : "") + ": field '" + key + "'";
    try {
      if (key == "command") c.command = value.get<std::string>();
      else if (key == "density") c.density = value.get<std::string>();
      else if (key == "d") c.d = value.get<int>();
      else if (key == "lambda") c.lambda = value.get<double>();
      else if (key == "observable") c.observables = value.get<std::vector<std::string>>();
      else if (key == "grid") c.grid = parse_grid(value.get<std::string>());
      else if (key == "grid2") c.grid2 = parse_grid(value.get<std::string>());
      else if (key == "z") {
        c.z.clear();
        for (const auto& s : value) c.z.push_back(parse_complex(s.get<std::string>()));
      } else if (key == "sigma") c.sigma = value.get<std::string>();
      else if (key == "order") c.order = value.get<int>();
      else if (key == "gap") c.gap = value.get<double>();
      else if (key == "delta") c.delta = value.get<double>();
      else if (key == "L") c.L = value.get<int>();
      else if (key == "boundary") c.boundary = value.get<std::string>();
      else if (key == "eps") c.eps = value.get<double>();
      else if (key == "eta") c.eta = value.get<double>();
      else if (key == "samples") c.samples = value.get<std::uint64_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "output") c.output = value.get<std::string>();
      else if (key == "format") c.format = value.get<std::string>();
      else if (key == "deterministic") c.deterministic = value.get<bool>();
      else if (key == "threads") c.threads = value.get<int>();
      else if (key == "certified") c.certified = value.get<bool>();
      else if (key == "route") c.route = value.get<std::string>();
      else throw ConfigError("unknown field");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return c;
}

inline RunConfig parse_run_config(const std::string& text, const std::string& origin = "config") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto byte = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + e.what());
  }
  return run_config_from_json(j, text, origin);
}

/// Checks every field against the module preconditions; throws ConfigError
/// naming the offending field.
inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& field, const std::string& msg) {
    throw ConfigError("field '" + field + "': " + msg);
  };
  if (!run_commands().count(c.command)) fail("command", "expected dos|green|corr2|validate|identities");
  try {
    (void)AnalyticDensity::parse(c.density);
  } catch (const Error& e) {
    fail("density", e.what());
  }
  if (c.d < 1 || c.d > kMaxDim) fail("d", "must be in 1.." + std::to_string(kMaxDim));
  for (const auto& o : c.observables) try {
      (void)parse_observable(o, c.d, c.lambda);
    } catch (const Error& e) {
      fail("observable", e.what());
    }
  for (char s : c.sigma)
    if (s != '+' && s != '-') fail("sigma", "use '+' and '-' only");
  if (c.order < 0) fail("order", "must be >= 0");
  if (c.gap < 0) fail("gap", "must be >= 0");
  if (c.delta < 0) fail("delta", "must be >= 0");
  if (c.L < 0) fail("L", "must be >= 0");
  if (c.boundary != "open" && c.boundary != "periodic") fail("boundary", "expected open|periodic");
  if (c.eps < 0) fail("eps", "must be >= 0");
  if (c.eta < 0) fail("eta", "must be >= 0");
  if (c.samples < 2) fail("samples", "need at least 2 samples");
  if (c.format != "json" && c.format != "csv") fail("format", "expected json|csv");
  if (c.threads < 0) fail("threads", "must be >= 0");
  if (c.route != "decomposed" && c.route != "direct") fail("route", "expected decomposed|direct");

  const std::size_t nobs = c.observables.size();
  if (c.command == "dos") {
    if (!c.grid) fail("grid", "dos needs an energy grid");
    if (nobs > 1 || (nobs == 1 && c.observables[0] != "identity")) fail("observable", "dos uses the identity only");
  } else if (c.command == "green" || c.command == "validate") {
    if (c.z.empty() && !(c.grid && c.eta > 0)) fail("z", c.command + " needs --z, or --grid with --eta > 0");
    if (!c.z.empty() && c.grid) fail("grid", "give either --z or --grid, not both");
    for (const auto& z : c.z)
      if (z.imag() == 0.0) fail("z", "energies must be off the real axis");
    const std::size_t N = c.z.empty() ? 1 : c.z.size();
    if (nobs != 0 && nobs != N) fail("observable", "need one observable per energy");
  } else if (c.command == "corr2") {
    if (!c.grid) fail("grid", "corr2 needs an energy grid");
    if (nobs != 0 && nobs != 2) fail("observable", "corr2 takes two observables");
    if (!c.sigma.empty() && c.sigma.size() != 2) fail("sigma", "corr2 takes two signs");
    if (c.eta == 0.0 && c.gap <= 0.0) fail("gap", "boundary correlations need a gap > 0");
  }
}

}  // namespace anderson
