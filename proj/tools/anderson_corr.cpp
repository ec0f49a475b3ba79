// Command line front end: dos | green | corr2 | validate | identities.
//
// Exit status: 0 ok, 1 configuration or runtime error, 2 a validation or
// identity check failed.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "anderson/expansion.hpp"
#include "anderson/identities.hpp"
#include "anderson/oracle.hpp"
#include "anderson/parallel.hpp"
#include "anderson/run_config.hpp"

using namespace anderson;
using nlohmann::json;

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  json results = json::array();
};

std::string num(double v) { return detail::fmt_double(v); }

std::string z_list(const std::vector<cplx>& z) {
  std::string s;
  for (std::size_t k = 0; k < z.size(); ++k) s += (k ? ";" : "") + format_complex(z[k]);
  return s;
}

std::string bound_str(double b) { return std::isfinite(b) ? num(b) : "inf"; }

ExpansionConfig expansion_config(const RunConfig& c, const AnalyticDensity& g, int threads) {
  ExpansionConfig e;
  e.density = g;
  e.d = c.d;
  e.lambda = c.lambda;
  for (const auto& o : c.observables) e.observables.push_back(parse_observable(o, c.d, c.lambda));
  e.order = c.order;
  e.gap = c.gap;
  e.delta = c.delta;
  e.certified = c.certified;
  e.route = c.route == "direct" ? BoundaryRoute::direct : BoundaryRoute::decomposed;
  e.threads = threads;
  return e;
}

HalfPlane half_plane(char s) { return s == '-' ? HalfPlane::lower : HalfPlane::upper; }

/// Energy tuples for green/validate: the explicit --z list, or E + i eta over the grid.
std::vector<std::vector<cplx>> energy_points(const RunConfig& c) {
  if (!c.z.empty()) return {c.z};
  std::vector<std::vector<cplx>> out;
  for (double E : c.grid->points()) out.push_back({cplx(E, c.eta)});
  return out;
}

Table run_dos(const RunConfig& c, const AnalyticDensity& g, int threads) {
  Table t{{"E", "dos", "tail_bound", "order"}, {}};
  const ExpansionConfig e = expansion_config(c, g, threads);
  for (double E : c.grid->points()) {
    SeriesValue s;
    double dos = 0.0, bound = 0.0;
    if (c.eps > 0.0) {
      s = green_series(e, {cplx(E, c.eps)});
      dos = s.value.imag() / std::numbers::pi;
    } else {
      s = dos_series(e, HalfPlane::upper, E);
      dos = dos_value(s);
    }
    bound = s.tail_bound / std::numbers::pi;
    t.rows.push_back({num(E), num(dos), bound_str(bound), std::to_string(s.order)});
    t.results.push_back({{"E", E}, {"dos", dos}, {"tail_bound", std::isfinite(bound) ? json(bound) : json("inf")},
                         {"series", to_json(s)}});
  }
  return t;
}

Table run_green(const RunConfig& c, const AnalyticDensity& g, int threads) {
  Table t{{"z", "value_re", "value_im", "tail_bound", "order"}, {}};
  const ExpansionConfig e = expansion_config(c, g, threads);
  for (const auto& z : energy_points(c)) {
    const SeriesValue s = green_series(e, z);
    t.rows.push_back({z_list(z), num(s.value.real()), num(s.value.imag()), bound_str(s.tail_bound),
                      std::to_string(s.order)});
    t.results.push_back(to_json(s));
  }
  return t;
}

Table run_corr2(const RunConfig& c, const AnalyticDensity& g, int threads) {
  Table t{{"E1", "E2", "value_re", "value_im", "tail_bound", "order"}, {}};
  RunConfig cc = c;
  if (cc.observables.empty()) cc.observables = {"velocity:nu=0", "velocity:nu=0"};
  const ExpansionConfig e = expansion_config(cc, g, threads);
  const std::string sig = c.sigma.empty() ? "+-" : c.sigma;
  const SignVector sigma = {half_plane(sig[0]), half_plane(sig[1])};
  const auto g1 = c.grid->points();
  const auto g2 = c.grid2 ? c.grid2->points() : g1;
  for (double E1 : g1)
    for (double E2 : g2) {
      if (std::abs(E1 - E2) <= c.gap || E1 == E2) continue;
      const SeriesValue s =
          c.eta > 0.0 ? green_series(e, {cplx(E1, sign(sigma[0]) * c.eta), cplx(E2, sign(sigma[1]) * c.eta)})
                      : npoint_boundary_series(e, sigma, EnergyVector{E1, E2});
      t.rows.push_back({num(E1), num(E2), num(s.value.real()), num(s.value.imag()), bound_str(s.tail_bound),
                        std::to_string(s.order)});
      t.results.push_back(to_json(s));
    }
  return t;
}

Table run_validate(const RunConfig& c, const AnalyticDensity& g, int threads, bool& ok) {
  Table t{{"z", "series_re", "series_im", "tail_bound", "mc_re", "mc_im", "stderr", "diff", "allowed", "pass"}, {}};
  const ExpansionConfig e = expansion_config(c, g, threads);
  const FiniteBox box(c.d, c.L, c.boundary == "periodic" ? Boundary::periodic : Boundary::open);
  const McOptions opt{c.samples, c.seed, threads, c.boundary == "open" ? c.order : 0};
  for (const auto& z : energy_points(c)) {
    const SeriesValue s = green_series(e, z);
    std::vector<CovariantPolynomial> obs = e.observables;
    if (obs.empty()) obs.assign(z.size(), identity_observable());
    const McResult m = mc_npoint(box, c.lambda, g, obs, z, opt);
    const double diff = std::abs(s.value - m.mean);
    const double allowed = 3.0 * m.stderr_ + s.tail_bound;
    const bool pass = diff <= allowed;
    ok = ok && pass;
    t.rows.push_back({z_list(z), num(s.value.real()), num(s.value.imag()), bound_str(s.tail_bound),
                      num(m.mean.real()), num(m.mean.imag()), num(m.stderr_), num(diff), bound_str(allowed),
                      pass ? "PASS" : "FAIL"});
    t.results.push_back({{"series", to_json(s)}, {"mc", to_json(m)}, {"diff", diff},
                         {"allowed", std::isfinite(allowed) ? json(allowed) : json("inf")}, {"pass", pass}});
  }
  return t;
}

Table run_identities(const AnalyticDensity& g, bool& ok) {
  Table t{{"group", "name", "worst", "tolerance", "pass", "seconds"}, {}};
  for (const auto& ck : identity_suite(g)) {
    ok = ok && ck.pass;
    t.rows.push_back({ck.group, "\"" + ck.name + "\"", num(ck.worst), num(ck.tolerance), ck.pass ? "PASS" : "FAIL",
                      num(ck.seconds)});
    t.results.push_back({{"group", ck.group}, {"name", ck.name}, {"worst", ck.worst}, {"tolerance", ck.tolerance},
                         {"pass", ck.pass}, {"seconds", ck.seconds}});
  }
  return t;
}

void emit(const RunConfig& c, const Table& t, bool ok) {
  std::ostringstream os;
  if (c.format == "csv") {
    for (std::size_t k = 0; k < t.header.size(); ++k) os << (k ? "," : "") << t.header[k];
    os << "\n";
    for (const auto& r : t.rows) {
      for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << r[k];
      os << "\n";
    }
  } else {
    const json doc = {{"command", c.command}, {"config", to_json(c)}, {"ok", ok}, {"results", t.results}};
    os << doc.dump(2) << "\n";
  }
  if (c.output.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(c.output);
    if (!f) throw ConfigError("field 'output': cannot open '" + c.output + "'");
    f << os.str();
  }
}

int run(const RunConfig& c) {
  validate(c);
  const int threads = resolve_threads(c.threads);
  const AnalyticDensity g = AnalyticDensity::parse(c.density);
  bool ok = true;
  Table t;
  if (c.command == "dos") t = run_dos(c, g, threads);
  else if (c.command == "green") t = run_green(c, g, threads);
  else if (c.command == "corr2") t = run_corr2(c, g, threads);
  else if (c.command == "validate") t = run_validate(c, g, threads, ok);
  else t = run_identities(g, ok);
  emit(c, t, ok);
  return ok ? 0 : 2;
}

/// Flag values that override the config file only when given.
struct Overrides {
  RunConfig v;
  std::string grid, grid2;
  std::vector<std::string> z;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> apply;

  template <class T>
  void add(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& help) {
    auto* o = app->add_option(name, v.*field, help);
    apply.emplace_back(o, [this, field](RunConfig& c) { c.*field = v.*field; });
  }
  void flag(CLI::App* app, const std::string& name, bool RunConfig::*field, const std::string& help) {
    auto* o = app->add_flag(name, v.*field, help);
    apply.emplace_back(o, [this, field](RunConfig& c) { c.*field = v.*field; });
  }
};

void add_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--density", &RunConfig::density, "gaussian:sigma2=..,r=.. | cauchy:a=..,r=..");
  o.add(app, "--d", &RunConfig::d, "lattice dimension (1-4)");
  o.add(app, "--lambda", &RunConfig::lambda, "hopping strength");
  o.add(app, "--observable", &RunConfig::observables, "observable per resolvent (repeatable)");
  o.add(app, "--sigma", &RunConfig::sigma, "half-plane pattern, e.g. +-");
  o.add(app, "--order", &RunConfig::order, "truncation order n_max");
  o.add(app, "--gap", &RunConfig::gap, "minimal energy gap Delta");
  o.add(app, "--delta", &RunConfig::delta, "bound parameter delta");
  o.add(app, "--L", &RunConfig::L, "box half-width for the Monte Carlo oracle");
  o.add(app, "--boundary", &RunConfig::boundary, "open | periodic");
  o.add(app, "--eps", &RunConfig::eps, "dos: Poisson smoothing width (0 = boundary value)");
  o.add(app, "--eta", &RunConfig::eta, "imaginary offset for grid sweeps");
  o.add(app, "--samples", &RunConfig::samples, "Monte Carlo samples");
  o.add(app, "--seed", &RunConfig::seed, "master seed");
  o.add(app, "--output", &RunConfig::output, "output file (default stdout)");
  o.add(app, "--format", &RunConfig::format, "json | csv");
  o.add(app, "--threads", &RunConfig::threads, "worker threads (default ANDERSON_CORR_THREADS or all cores)");
  o.add(app, "--route", &RunConfig::route, "boundary route: decomposed | direct");
  o.flag(app, "--deterministic", &RunConfig::deterministic, "fixed-order reductions (always on; recorded)");
  o.flag(app, "--certified", &RunConfig::certified, "fail instead of reporting an infinite tail bound");
  auto* g = app->add_option("--grid", o.grid, "energy grid start:stop:count");
  o.apply.emplace_back(g, [&o](RunConfig& c) { c.grid = parse_grid(o.grid); });
  auto* g2 = app->add_option("--grid2", o.grid2, "second energy grid for corr2");
  o.apply.emplace_back(g2, [&o](RunConfig& c) { c.grid2 = parse_grid(o.grid2); });
  auto* z = app->add_option("--z", o.z, "complex energy such as 0.3+0.4i (repeatable)");
  o.apply.emplace_back(z, [&o](RunConfig& c) {
    c.z.clear();
    for (const auto& s : o.z) c.z.push_back(parse_complex(s));
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-walk expansion of disordered-lattice Green and correlation functions"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file whose keys mirror the long flags");
  Overrides o;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"dos", "density of states over an energy grid"},
      {"green", "off-axis N-point Green function"},
      {"corr2", "two-point (current-current) correlation over an (E1, E2) grid"},
      {"validate", "series against the finite-box Monte Carlo oracle"},
      {"identities", "run the identity checks and print a pass/fail table"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_flags(sub, o);
    sub->add_option("--config", config_path, "JSON file whose keys mirror the long flags");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    RunConfig c;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot open config '" + config_path + "'");
      std::stringstream ss;
      ss << f.rdbuf();
      c = parse_run_config(ss.str(), config_path);
    }
    const std::string command = app.get_subcommands().front()->get_name();
    if (!c.command.empty() && c.command != command)
      throw ConfigError("field 'command': config says '" + c.command + "' but '" + command + "' was requested");
    c.command = command;
    for (auto& [opt, fn] : o.apply)
      if (opt->count() > 0) fn(c);
    return run(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
