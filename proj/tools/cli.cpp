#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gmqso/gmqso.hpp"

namespace gmqso::cli {
namespace {

using io::json;

struct Options {
  std::string command;
  std::optional<std::string> scenario;
  std::optional<std::string> group;
  std::optional<std::string> mu;
  std::optional<std::string> backend;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> points;
  std::optional<long long> n;
  std::optional<double> tol;
  std::optional<long long> budget;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<std::string> set;
};

// Inline JSON if it looks like JSON, otherwise a path to a JSON file.
json load_json(const std::string& text, const std::string& what) {
  auto first = std::find_if_not(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
  std::string body;
  if (first != text.end() && (*first == '{' || *first == '[' || *first == '"' || std::isdigit(*first))) {
    body = text;
  } else {
    std::ifstream in(text);
    if (!in) throw ValidationError("cannot read " + what + " file '" + text + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw ValidationError("malformed " + what + " JSON: " + e.what());
  }
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// Scenario = scenario file (if any) overlaid with command-line flags.
struct Scenario {
  std::optional<GroupSpec> group;
  json mu;  // null when absent
  json points;  // array of point JSON, or {"count", "seed"}, or null
  std::string backend = "float";
  std::optional<long long> n;
  double tol = 1e-10;
  std::size_t budget = 200;
  bool tol_given = false;
};

Scenario build_scenario(const Options& o) {
  Scenario s;
  json file;
  if (o.scenario) {
    file = load_json(*o.scenario, "scenario");
    if (!file.is_object()) throw ValidationError("scenario must be a JSON object");
  }
  auto from_file = [&](const char* key) -> const json* {
    return file.is_object() && file.contains(key) ? &file.at(key) : nullptr;
  };

  if (o.group) s.group = io::group_from_json(load_json(*o.group, "group"));
  else if (auto g = from_file("group")) s.group = io::group_from_json(*g);

  json mu;
  if (o.mu) mu = load_json(*o.mu, "mu");
  else if (auto m = from_file("mu")) mu = *m;
  if (mu.is_object() && mu.contains("group") && mu.contains("mu")) {
    auto g = io::group_from_json(mu.at("group"));
    if (s.group && !(*s.group == g)) throw ValidationError("--mu operator group differs from --group");
    s.group = g;
    mu = mu.at("mu");
  }
  s.mu = mu;

  if (o.backend) s.backend = *o.backend;
  else if (auto b = from_file("backend")) s.backend = b->get<std::string>();
  if (s.backend != "float" && s.backend != "rational")
    throw ValidationError("backend must be 'float' or 'rational', got '" + s.backend + "'");

  if (o.points) {
    if (all_digits(*o.points)) {
      s.points = {{"count", std::stoll(*o.points)}};
    } else {
      s.points = load_json(*o.points, "points");
    }
  } else if (auto p = from_file("initial_points")) {
    s.points = *p;
  }
  if (s.points.is_object() && s.points.contains("count")) {
    if (o.seed) s.points["seed"] = *o.seed;
    if (!s.points.contains("seed")) throw ValidationError("sampling initial points requires a --seed");
  }

  if (o.n) s.n = *o.n;
  else if (auto n = from_file("n")) s.n = n->get<long long>();
  if (o.tol) {
    s.tol = *o.tol;
    s.tol_given = true;
  } else if (auto t = from_file("tol")) {
    s.tol = t->get<double>();
    s.tol_given = true;
  }
  if (o.budget) {
    if (*o.budget < 0) throw ValidationError("--budget must be >= 0");
    s.budget = static_cast<std::size_t>(*o.budget);
  } else if (auto b = from_file("budget")) {
    s.budget = b->get<std::size_t>();
  }
  return s;
}

const GroupSpec& require_group(const Scenario& s) {
  if (!s.group) throw ValidationError("a group is required (--group, --mu operator JSON, or scenario)");
  return *s.group;
}

template <Scalar T>
QsoOperator<T> require_operator(const Scenario& s) {
  const auto& spec = require_group(s);
  if (s.mu.is_null()) throw ValidationError("a heredity measure is required (--mu or scenario)");
  auto w = io::weights_from_json<T>(spec, s.mu);
  SimplexPoint<T>::validate(spec, w);
  check_stochasticity<T>(spec, w);
  return QsoOperator<T>(SimplexPoint<T>::make(spec, std::move(w)));
}

template <Scalar T>
std::vector<SimplexPoint<T>> require_points(const Scenario& s) {
  const auto& spec = require_group(s);
  if (s.points.is_null()) throw ValidationError("initial points are required (--points or scenario)");
  std::vector<SimplexPoint<T>> out;
  if (s.points.is_object() && s.points.contains("count")) {
    const auto count = s.points.at("count").get<long long>();
    if (count < 1) throw ValidationError("sample count must be >= 1");
    Sampler sampler(s.points.at("seed").get<std::uint64_t>());
    for (long long i = 0; i < count; ++i) {
      if constexpr (scalar_traits<T>::exact) out.push_back(sampler.rational(ElementSet::whole(spec)));
      else out.push_back(sampler.dirichlet(spec));
    }
    return out;
  }
  // A single bare point object is accepted as a one-element list.
  json list = s.points.is_object() ? json::array({s.points}) : s.points;
  if (!list.is_array() || list.empty()) throw ValidationError("initial points must be a nonempty JSON array");
  for (const auto& p : list) out.push_back(io::point_from_json<T>(spec, p));
  return out;
}

std::size_t require_count(const std::optional<long long>& n, const char* what, long long min, long long fallback) {
  const long long v = n.value_or(fallback);
  if (v < min) throw ValidationError(std::string(what) + " must be >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

// Runs f(i) for every index on a small worker pool. Results come back in
// index order; the lowest failing index rethrows.
template <class F>
auto parallel_map(std::size_t count, F f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<std::optional<R>> results(count);
  std::vector<std::exception_ptr> errors(count);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          results[i].emplace(f(i));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  std::vector<R> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*results[i]));
  }
  return out;
}

class Output {
 public:
  Output(const Options& o, std::ostream& out) : out_(out) {
    if (o.out_dir) {
      dir_ = std::filesystem::path(*o.out_dir);
      std::filesystem::create_directories(*dir_);
    }
  }

  bool to_files() const { return dir_.has_value(); }

  void emit(const std::string& filename, const std::string& content) {
    if (dir_) {
      std::ofstream f(*dir_ / filename, std::ios::binary);
      if (!f) throw ValidationError("cannot write " + (*dir_ / filename).string());
      f << content;
      out_ << "wrote " << (*dir_ / filename).string() << "\n";
    } else {
      out_ << content;
    }
  }

  std::ostream& summary() { return out_; }

 private:
  std::ostream& out_;
  std::optional<std::filesystem::path> dir_;
};

std::string format_of(const Options& o, const char* fallback) {
  std::string f = o.format.value_or(fallback);
  if (f != "json" && f != "csv") throw ValidationError("--format must be json or csv");
  return f;
}

const char* kind_name(LimitKind k) { return k == LimitKind::fixed_point ? "fixed-point" : "periodic"; }

template <Scalar T>
int cmd_simulate(const Options& o, const Scenario& s, Output& out) {
  const auto op = require_operator<T>(s);
  const auto points = require_points<T>(s);
  const std::size_t n = require_count(s.n, "--n", 0, 10);
  const std::string fmt = format_of(o, "csv");

  auto trajectories = parallel_map(points.size(), [&](std::size_t i) { return iterate(op, points[i], n); });
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    std::ostringstream body;
    if (fmt == "csv") {
      if (!out.to_files() && points.size() > 1) body << "# point " << i << "\n";
      io::write_trajectory_csv(body, trajectories[i].states);
    } else {
      body << io::trajectory_to_json(op, trajectories[i].states).dump(2) << "\n";
    }
    out.emit("trajectory_" + std::to_string(i) + "." + fmt, body.str());
  }

  if (s.tol_given) {
    auto profiles = parallel_map(points.size(), [&](std::size_t i) {
      return limit_profile(op, points[i], s.tol, s.budget);
    });
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const auto& p = profiles[i];
      out.summary() << "# point " << i << ": " << kind_name(p.kind) << ", period " << p.period << ", n0 "
                    << p.forecast.n0 << ", d_n <= " << scalar_traits<double>::format(s.tol) << " at n = "
                    << p.converged_at << "\n";
    }
  }
  return kOk;
}

int cmd_classify(const Options& o, const Scenario& s, Output& out) {
  // Classification depends on s(mu) only; the exact backend decides it.
  const auto op = require_operator<Rational>(s);
  const auto report = classify(op);
  (void)o;
  out.emit("classification.json", io::to_json(report).dump(2) + "\n");
  return kOk;
}

int cmd_subgroups(const Options&, const Scenario& s, Output& out) {
  const auto& spec = require_group(s);
  json list = json::array();
  for (const auto& u : enumerate_subgroups(spec)) list.push_back({{"order", u.order()}, {"members", io::to_json(u)}});
  out.emit("subgroups.json", json{{"group", io::to_json(spec)}, {"subgroups", list}}.dump(2) + "\n");
  return kOk;
}

int cmd_invariance(const Options& o, const Scenario& s, Output& out) {
  const auto& spec = require_group(s);
  std::optional<ElementSet> a;
  if (o.set) {
    a = io::set_from_json(spec, load_json(*o.set, "set"));
  } else if (!s.mu.is_null()) {
    a = support(require_operator<Rational>(s).mu());
  } else {
    throw ValidationError("invariance needs --set or --mu");
  }
  if (a->empty()) throw ValidationError("--set must be nonempty");
  json table = json::array();
  json invariant = json::array();
  for (const auto& u : enumerate_subgroups(spec)) {
    const bool inv = is_invariant(u, *a);
    table.push_back({{"subgroup", io::to_json(u)}, {"invariant", inv}});
    if (inv) invariant.push_back(io::to_json(u));
  }
  const auto coset = is_coset(*a);
  json report{{"group", io::to_json(spec)},
              {"set", io::to_json(*a)},
              {"is_coset", coset ? io::to_json(*coset) : json(nullptr)},
              {"invariant_subgroups", invariant},
              {"subgroups", table}};
  out.emit("invariance.json", report.dump(2) + "\n");
  return kOk;
}

int cmd_rate(const Options& o, const Scenario& s, Output& out) {
  if (s.backend != "float") throw ValidationError("rate requires the float backend");
  const auto op = require_operator<double>(s);
  const auto points = require_points<double>(s);
  const std::size_t n_max = require_count(s.n, "--n (n_max)", 2, 12);
  const std::string fmt = format_of(o, "csv");
  auto series = parallel_map(points.size(), [&](std::size_t i) { return convergence_rate(op, points[i], n_max); });

  for (std::size_t i = 0; i < series.size(); ++i) {
    const bool empty = std::none_of(series[i].begin(), series[i].end(), [](const auto& r) { return r.rate; });
    std::ostringstream body;
    if (fmt == "csv") {
      if (points.size() > 1 && !out.to_files()) body << "# point " << i << "\n";
      if (empty) body << "# r-series empty: point starts on its limit cycle or never drops below 1\n";
      body << "n,d_n,r_n\n";
      for (const auto& r : series[i]) {
        body << r.n << ',' << scalar_traits<double>::format(r.distance) << ',';
        if (r.rate) body << scalar_traits<double>::format(*r.rate);
        body << '\n';
      }
    } else {
      json rows = json::array();
      for (const auto& r : series[i])
        rows.push_back({{"n", r.n},
                        {"d_n", r.distance},
                        {"r_n", r.rate ? json(*r.rate) : json(nullptr)},
                        {"terminal", r.terminal}});
      body << json{{"point", i}, {"r_series_empty", empty}, {"samples", rows}}.dump(2) << "\n";
    }
    out.emit("rate_" + std::to_string(i) + "." + fmt, body.str());
  }
  return kOk;
}

template <Scalar T>
int cmd_ergodic(const Options&, const Scenario& s, Output& out) {
  const auto op = require_operator<T>(s);
  const auto points = require_points<T>(s);
  const std::size_t n = require_count(s.n, "--n", 1, 100);
  auto averages = parallel_map(points.size(), [&](std::size_t i) { return ergodic_average(op, points[i], n); });
  json list = json::array();
  for (std::size_t i = 0; i < averages.size(); ++i)
    list.push_back({{"point", i}, {"n", n}, {"average", io::to_json(averages[i])}});
  out.emit("ergodic.json", list.dump(2) + "\n");
  return kOk;
}

template <Scalar T>
int dispatch_backend(const Options& o, const Scenario& s, Output& out) {
  if (o.command == "simulate") return cmd_simulate<T>(o, s, out);
  return cmd_ergodic<T>(o, s, out);
}

int dispatch(const Options& o, std::ostream& out) {
  const Scenario s = build_scenario(o);
  Output output(o, out);
  if (o.command == "classify") return cmd_classify(o, s, output);
  if (o.command == "subgroups") return cmd_subgroups(o, s, output);
  if (o.command == "invariance") return cmd_invariance(o, s, output);
  if (o.command == "rate") return cmd_rate(o, s, output);
  if (s.backend == "rational") return dispatch_backend<Rational>(o, s, output);
  return dispatch_backend<double>(o, s, output);
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--scenario", o.scenario, "Scenario JSON file");
  sub->add_option("--group", o.group, "Cyclic orders, e.g. [2,3]");
  sub->add_option("--mu", o.mu, "Heredity measure: inline JSON or file (point or operator JSON)");
  sub->add_option("--backend", o.backend, "rational | float");
  sub->add_option("--seed", o.seed, "Seed for sampled initial points");
  sub->add_option("--points", o.points, "Sample count, or inline JSON / file with a list of points");
  sub->add_option("--n", o.n, "Iterations (simulate, ergodic) or n_max (rate)");
  sub->add_option("--tol", o.tol, "Convergence tolerance for the limit summary");
  sub->add_option("--budget", o.budget, "Iteration budget for the limit summary");
  sub->add_option("--out-dir", o.out_dir, "Write reports into this directory");
  sub->add_option("--format", o.format, "json | csv");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate and classify (G, mu)-quadratic stochastic operators", "gmqso"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"simulate", "Iterate the operator and export trajectories"},
      {"classify", "Regularity, invariant subgroups, periodic orbits and fixed points"},
      {"subgroups", "List all subgroups of the group"},
      {"invariance", "Which subgroups are invariant for a set (default s(mu))"},
      {"rate", "Convergence-rate series n, d_n, r_n"},
      {"ergodic", "Cesaro averages of trajectories"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    if (std::string(name) == "invariance") sub->add_option("--set", o.set, "Element set A as JSON");
    sub->callback([&o, n = std::string(name)] { o.command = n; });
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    return dispatch(o, out);
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return kCapacity;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
}

}  // namespace gmqso::cli
