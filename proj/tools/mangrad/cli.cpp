#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mangrad/designs.hpp"
#include "mangrad/errors.hpp"
#include "mangrad/groundstate.hpp"
#include "mangrad/rgd.hpp"
#include "mangrad/saddlelab.hpp"
#include "mangrad/sampler.hpp"
#include "mangrad/stats.hpp"

namespace mangrad::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using linalg::Complex;

namespace {

class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

class CheckFailed : public Error {
 public:
  using Error::Error;
};

// A JSON object whose keys are checked against an allow-list.
class Section {
 public:
  Section(const json& j, std::string where, std::set<std::string> allowed)
      : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(label() + " must be a JSON object");
    for (const auto& [key, value] : j.items())
      if (!allowed.count(key)) throw ConfigError("unknown key '" + name(key) + "'");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing key '" + name(key) + "'");
    return j_.at(key);
  }
  std::string name(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      raw(key);
    }
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError("key '" + name(key) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("key '" + name(key) + "' must be finite");
    return d;
  }

  std::optional<double> maybe_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::size_t count(const std::string& key,
                    std::optional<std::size_t> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      raw(key);
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ConfigError("key '" + name(key) + "' must be a non-negative integer");
    return v.get<std::size_t>();
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError("key '" + name(key) + "' must be a boolean");
    return j_.at(key).get<bool>();
  }

  std::string text(const std::string& key,
                   std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      raw(key);
    }
    if (!j_.at(key).is_string()) throw ConfigError("key '" + name(key) + "' must be a string");
    return j_.at(key).get<std::string>();
  }

  RealVector numbers(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError("key '" + name(key) + "' must be an array of numbers");
    RealVector out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("key '" + name(key) + "' must contain numbers only");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Section sub(const std::string& key, std::set<std::string> allowed) const {
    return Section(raw(key), name(key), std::move(allowed));
  }

  const json& json_value() const { return j_; }

 private:
  std::string label() const { return where_.empty() ? "config" : "'" + where_ + "'"; }
  const json& j_;
  std::string where_;
};

struct Loaded {
  json doc;
  fs::path dir;
};

Loaded load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Loaded l;
  try {
    in >> l.doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  l.dir = fs::path(path).parent_path();
  return l;
}

struct Globals {
  std::uint64_t seed = 0;
  fs::path output_dir;
  std::size_t threads = 0;
};

const std::set<std::string> kGlobalKeys{"seed", "output_dir", "threads"};

std::set<std::string> with_globals(std::set<std::string> keys) {
  keys.insert(kGlobalKeys.begin(), kGlobalKeys.end());
  return keys;
}

Globals read_globals(const Section& s, const Options& opts) {
  Globals g;
  if (s.has("seed")) {
    const json& v = s.raw("seed");
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ConfigError("key 'seed' must be a non-negative integer");
    g.seed = v.get<std::uint64_t>();
  }
  if (opts.seed) g.seed = *opts.seed;
  g.output_dir = opts.out ? fs::path(*opts.out) : fs::path(s.text("output_dir", "out"));
  if (s.has("threads")) {
    const json& v = s.raw("threads");
    if (v.is_string() && v.get<std::string>() == "auto")
      g.threads = 0;
    else if (v.is_number_integer() && v.get<long long>() >= 1)
      g.threads = v.get<std::size_t>();
    else
      throw ConfigError("key 'threads' must be \"auto\" or a positive integer");
  }
  return g;
}

std::string iso_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << body;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

class Run {
 public:
  Run(std::string command, const Options& opts, const Globals& g)
      : command_(std::move(command)), opts_(opts), globals_(g), started_(iso_now()) {
    std::error_code ec;
    fs::create_directories(g.output_dir, ec);
    if (ec) throw ConfigError("cannot create output_dir '" + g.output_dir.string() + "'");
  }

  fs::path path(const std::string& file) const { return globals_.output_dir / file; }

  // Timestamps live only here so every other output is reproducible.
  void finish(int exit_code) const {
    write_json(path("meta.json"), {{"command", command_},
                                   {"config", opts_.config_path},
                                   {"seed", globals_.seed},
                                   {"check", opts_.check},
                                   {"started_at", started_},
                                   {"finished_at", iso_now()},
                                   {"exit_code", exit_code}});
  }

 private:
  std::string command_;
  const Options& opts_;
  Globals globals_;
  std::string started_;
};

std::string csv_number(double v) { return format_double(v); }

// ---------------------------------------------------------------- rgd-run

HermitianMatrix read_seed_h(const Section& parent, const std::string& key, std::size_t n) {
  const Section s = parent.sub(key, {"x", "y", "z", "matrix"});
  ComplexMatrix h(n);
  if (s.has("matrix")) {
    if (s.has("x") || s.has("y") || s.has("z"))
      throw ConfigError("'" + s.name("matrix") + "' excludes Pauli coefficients");
    const json& m = s.raw("matrix");
    if (!m.is_array() || m.size() != n * n)
      throw ConfigError("'" + s.name("matrix") + "' needs n^2 [re, im] entries");
    for (std::size_t k = 0; k < n * n; ++k) {
      const json& z = m[k];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw ConfigError("'" + s.name("matrix") + "' entries must be [re, im] pairs");
      h(k / n, k % n) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  } else {
    if (n != 2) throw ConfigError("'" + parent.name(key) + "': Pauli coefficients need n = 2");
    h = linalg::pauli_x() * Complex(s.number("x", 0.0)) +
        linalg::pauli_y() * Complex(s.number("y", 0.0)) +
        linalg::pauli_z() * Complex(s.number("z", 0.0));
  }
  const double r = h.frobenius_norm();
  if (r == 0.0) throw ConfigError("'" + parent.name(key) + "' must be nonzero");
  try {
    return HermitianMatrix::checked(h * Complex(1.0 / r));
  } catch (const UsageError&) {
    throw ConfigError("'" + parent.name(key) + "' must be Hermitian");
  }
}

struct BuiltProblem {
  EnsembleProblem ensemble;
  ManifoldKind kind = ManifoldKind::euclidean(1);
  std::optional<groundstate::GroundStateProblem> ground_state;
};

ManifoldKind real_kind(const Section& s, std::size_t n) {
  const std::string m = s.text("manifold", "euclidean");
  try {
    if (m == "euclidean") return ManifoldKind::euclidean(n);
    if (m == "sphere") return ManifoldKind::sphere(n);
  } catch (const UsageError& e) {
    throw ConfigError("'" + s.name("manifold") + "': " + e.what());
  }
  throw ConfigError("key '" + s.name("manifold") + "' must be \"euclidean\" or \"sphere\"");
}

std::function<ManifoldPoint(std::size_t, RngStream&)> start_rule(const Section& s,
                                                                  const ManifoldKind& kind) {
  if (!s.has("x0"))
    return [kind](std::size_t, RngStream& rng) { return random_point(kind, rng); };
  const RealVector x0 = s.numbers("x0");
  if (x0.size() != kind.n()) throw ConfigError("key '" + s.name("x0") + "' has the wrong length");
  ManifoldPoint p = kind.type() == ManifoldKind::Type::Sphere ? ManifoldPoint::sphere(x0)
                                                              : ManifoldPoint::euclidean(x0);
  return [p](std::size_t, RngStream&) { return p; };
}

BuiltProblem build_problem(const Section& top) {
  const Section probe = top.sub("problem", {"type", "n_qubits", "a_eigenvalues", "rho_eigenvalues",
                                            "initial", "manifold", "coefficients", "a", "b", "n",
                                            "x0", "target"});
  const std::string type = probe.text("type");
  BuiltProblem out;
  if (type == "ground_state") {
    const Section s = top.sub("problem", {"type", "n_qubits", "a_eigenvalues", "rho_eigenvalues",
                                          "initial"});
    groundstate::GroundStateProblem gs;
    gs.n_qubits = s.count("n_qubits");
    gs.a_eigenvalues = s.numbers("a_eigenvalues");
    gs.rho_eigenvalues = s.numbers("rho_eigenvalues");
    const std::string init = s.text("initial", "haar");
    if (init == "haar")
      gs.initial = groundstate::InitialPolicy::HaarRandomUnitary;
    else if (init == "identity")
      gs.initial = groundstate::InitialPolicy::FixedIdentity;
    else
      throw ConfigError("key '" + s.name("initial") + "' must be \"haar\" or \"identity\"");
    try {
      gs.validate();
    } catch (const UsageError& e) {
      throw ConfigError("'problem': " + std::string(e.what()));
    }
    out.kind = ManifoldKind::special_unitary(gs.dim());
    out.ground_state = gs;
    return out;
  }
  if (type == "quadratic") {
    const Section s = top.sub("problem", {"type", "manifold", "coefficients", "x0", "target"});
    const RealVector c = s.numbers("coefficients");
    if (c.empty()) throw ConfigError("key '" + s.name("coefficients") + "' must be nonempty");
    out.kind = real_kind(s, c.size());
    out.ensemble.cost = std::make_shared<DiagonalQuadratic>(c, out.kind);
    out.ensemble.initial_point = start_rule(s, out.kind);
    out.ensemble.target = s.maybe_number("target");
    return out;
  }
  if (type == "saddle") {
    const Section s = top.sub("problem", {"type", "manifold", "a", "b", "n", "x0", "target"});
    const std::size_t n = s.count("n");
    out.kind = real_kind(s, n);
    try {
      out.ensemble.cost = std::make_shared<QuadraticSaddle>(s.numbers("a"), s.numbers("b"), n,
                                                            out.kind.type());
    } catch (const UsageError& e) {
      throw ConfigError("'problem': " + std::string(e.what()));
    }
    out.ensemble.initial_point = start_rule(s, out.kind);
    out.ensemble.target = s.maybe_number("target");
    return out;
  }
  throw ConfigError("key 'problem.type' must be \"ground_state\", \"quadratic\" or \"saddle\"");
}

DirectionLaw build_law(const Section& top, const ManifoldKind& kind, const fs::path& base) {
  if (!top.has("law")) return HaarLaw{};
  const Section s = top.sub("law", {"type", "seed_h", "unitaries_file", "weights"});
  const std::string type = s.text("type");
  if (type == "haar") return HaarLaw{};
  if (type == "coordinate_axes") {
    if (kind.type() != ManifoldKind::Type::Euclidean)
      throw ConfigError("'law': coordinate_axes needs a Euclidean problem");
    DiscreteLaw law;
    for (std::size_t j = 0; j < kind.n(); ++j)
      law.fields.push_back([j, n = kind.n()](const ManifoldPoint&) {
        RealVector e(n, 0.0);
        e[j] = 1.0;
        return TangentVector::real(std::move(e));
      });
    if (s.has("weights")) {
      const RealVector w = s.numbers("weights");
      if (w.size() != kind.n()) throw ConfigError("key '" + s.name("weights") + "' has the wrong length");
      law.weights = [w](const ManifoldPoint&) { return w; };
    }
    return law;
  }
  if (type == "clifford_conjugates" || type == "design_conjugates") {
    if (kind.type() != ManifoldKind::Type::SpecialUnitary)
      throw ConfigError("'law': " + type + " needs a ground_state problem");
    designs::FiniteUnitarySet set = [&] {
      if (type == "clifford_conjugates") return designs::clifford_1q();
      fs::path file = s.text("unitaries_file");
      if (file.is_relative()) file = base / file;
      try {
        return designs::FiniteUnitarySet::load(file.string());
      } catch (const UsageError& e) {
        throw ConfigError("'" + s.name("unitaries_file") + "': " + e.what());
      }
    }();
    if (set.n() != kind.n()) throw ConfigError("'law': unitary set dimension differs from the problem");
    const HermitianMatrix seed = read_seed_h(s, "seed_h", set.n());
    try {
      return DesignConjugatesLaw(std::move(set), seed);
    } catch (const UsageError& e) {
      throw ConfigError("'" + s.name("seed_h") + "': " + e.what());
    }
  }
  throw ConfigError(
      "key 'law.type' must be \"haar\", \"coordinate_axes\", \"clifford_conjugates\" or "
      "\"design_conjugates\"");
}

RgdConfig build_rgd(const Section& top, std::uint64_t seed) {
  RgdConfig c;
  c.seed = seed;
  if (!top.has("rgd")) return c;
  const Section s = top.sub("rgd", {"eta_policy", "eta", "max_iter", "grad_tol", "f_tol", "window",
                                    "certificate_slack", "trajectory_stride"});
  const std::string policy = s.text("eta_policy", "from_smoothness");
  if (policy == "from_smoothness")
    c.eta_policy = EtaPolicy::FromSmoothness;
  else if (policy == "explicit")
    c.eta_policy = EtaPolicy::Explicit;
  else
    throw ConfigError("key '" + s.name("eta_policy") + "' must be \"from_smoothness\" or \"explicit\"");
  c.eta = s.maybe_number("eta");
  c.max_iter = s.count("max_iter", c.max_iter);
  c.grad_tol = s.number("grad_tol", c.grad_tol);
  c.f_tol = s.number("f_tol", c.f_tol);
  c.window = s.count("window", c.window);
  c.certificate_slack = s.number("certificate_slack", c.certificate_slack);
  c.record_stride = s.count("trajectory_stride", c.record_stride);
  if (!(c.grad_tol > 0.0)) throw ConfigError("key 'rgd.grad_tol' must be positive");
  if (!(c.f_tol > 0.0)) throw ConfigError("key 'rgd.f_tol' must be positive");
  if (c.window == 0) throw ConfigError("key 'rgd.window' must be positive");
  return c;
}

}  // namespace

int cmd_rgd_run(const Options& opts, std::ostream& out) {
  const Loaded cfg = load_config(opts.config_path);
  const Section top(cfg.doc, "",
                    with_globals({"problem", "law", "rgd", "n_realizations", "check"}));
  const Globals g = read_globals(top, opts);
  BuiltProblem problem = build_problem(top);
  const DirectionLaw law = build_law(top, problem.kind, cfg.dir);
  const RgdConfig rgd = build_rgd(top, g.seed);
  const std::size_t n = top.count("n_realizations", 1);
  if (n == 0) throw ConfigError("key 'n_realizations' must be positive");
  std::optional<double> min_rate;
  std::optional<std::size_t> max_saddles;
  if (top.has("check")) {
    const Section c = top.sub("check", {"min_success_rate", "max_strict_saddle_endpoints"});
    min_rate = c.maybe_number("min_success_rate");
    if (c.has("max_strict_saddle_endpoints")) max_saddles = c.count("max_strict_saddle_endpoints");
  }

  // Validate the step size before any computation.
  try {
    if (problem.ground_state)
      resolve_eta(rgd, problem.ground_state->cost());
    else
      resolve_eta(rgd, *problem.ensemble.cost);
  } catch (const UsageError& e) {
    throw ConfigError("'rgd': " + std::string(e.what()));
  }

  Run run("rgd-run", opts, g);
  json summary;
  EnsembleSummary ensemble;
  if (problem.ground_state) {
    auto report = groundstate::saddle_statistics(*problem.ground_state, law, rgd, n, g.threads);
    summary = report.ensemble.to_json();
    summary["saddle"] = report.to_json();
    summary["saddle"].erase("ensemble");
    ensemble = std::move(report.ensemble);
  } else {
    ensemble = ensemble_run(problem.ensemble, law, rgd, n, g.threads);
    summary = ensemble.to_json();
  }
  if (rgd.record_stride > 0)
    for (const auto& r : ensemble.results) {
      char name[48];
      std::snprintf(name, sizeof name, "trajectory_%04zu.csv", r.realization);
      write_file(run.path(name), r.record.to_csv());
    }

  int code = kOk;
  std::vector<std::string> failures;
  if (ensemble.certificate_violations > 0) {
    failures.push_back("descent certificate violated");
    code = kNumericError;
  }
  if (opts.check && code == kOk) {
    if (min_rate && ensemble.success_rate() < *min_rate) failures.push_back("success rate below check.min_success_rate");
    if (max_saddles && ensemble.strict_saddle_endpoints > *max_saddles)
      failures.push_back("too many strict-saddle endpoints");
    if (!failures.empty()) code = kCheckFailed;
  }
  summary["check_failures"] = failures;
  write_json(run.path("summary.json"), summary);
  run.finish(code);
  out << "rgd-run: " << ensemble.successes << "/" << n << " successes, "
      << ensemble.strict_saddle_endpoints << " strict-saddle endpoints, eta = "
      << format_double(ensemble.eta) << "\n";
  for (const auto& f : failures) out << "rgd-run: " << f << "\n";
  return code;
}

// ------------------------------------------------------- saddle-hitting

namespace {

std::string samples_csv(const std::vector<saddle::HittingSample>& s) {
  std::string body = "realization,tau,censored\n";
  for (std::size_t r = 0; r < s.size(); ++r)
    body += std::to_string(r) + "," + csv_number(s[r].tau) + "," + (s[r].censored ? "1" : "0") + "\n";
  return body;
}

}  // namespace

int cmd_saddle_hitting(const Options& opts, std::ostream& out) {
  const Loaded cfg = load_config(opts.config_path);
  const Section top(cfg.doc, "",
                    with_globals({"a", "b", "eta", "phi0", "n_steps", "dt", "t_max",
                                  "n_realizations", "variance_matched", "c", "grid_step",
                                  "check"}));
  const Globals g = read_globals(top, opts);
  saddle::AngleProcessParams p;
  p.a = top.number("a", p.a);
  p.b = top.number("b", p.b);
  p.eta = top.number("eta", p.eta);
  p.phi0 = top.number("phi0", p.phi0);
  p.n_steps = top.count("n_steps", p.n_steps);
  const double t_max = top.number("t_max", static_cast<double>(p.n_steps) * p.eta);
  const double dt = top.number("dt", 0.001);
  const std::size_t n = top.count("n_realizations", 500);
  const bool matched = top.flag("variance_matched", false);
  const double c = top.number("c", 0.05);
  const double grid_step = top.number("grid_step", t_max / 200.0);
  double max_ds = 0.15, max_da = 0.15;
  std::optional<double> max_sa;
  if (top.has("check")) {
    const Section s = top.sub("check", {"max_ks_discrete_sde", "max_ks_discrete_analytic",
                                        "max_ks_sde_analytic"});
    max_ds = s.number("max_ks_discrete_sde", max_ds);
    max_da = s.number("max_ks_discrete_analytic", max_da);
    max_sa = s.maybe_number("max_ks_sde_analytic");
  }
  try {
    p.validate();
    if (!(dt > 0.0) || !(dt <= t_max)) throw UsageError("need 0 < dt <= t_max");
    if (n == 0) throw UsageError("n_realizations must be positive");
    if (!(grid_step > 0.0)) throw UsageError("grid_step must be positive");
    saddle::deterministic_tail_time(c);
  } catch (const UsageError& e) {
    throw ConfigError(std::string("saddle-hitting: ") + e.what());
  }
  const auto conv = matched ? saddle::DiffusionConvention::VarianceMatched
                            : saddle::DiffusionConvention::AsPrinted;

  Run run("saddle-hitting", opts, g);
  const auto discrete = saddle::angle_hitting_ensemble(p, n, g.seed, 0, g.threads);
  const auto sde = saddle::sde_hitting_ensemble(p, dt, t_max, conv, n, g.seed,
                                                std::uint64_t{1} << 32, g.threads);
  const saddle::Ecdf e_discrete(discrete, static_cast<double>(p.n_steps) * p.eta);
  const saddle::Ecdf e_sde(sde, t_max);
  const auto lin = saddle::linearize_at_saddle(p, conv);
  const saddle::CombinedApproximation approx(c, lin.kappa, lin.sigma);
  const auto analytic = [&](double t) { return approx.cdf(t); };

  write_file(run.path("discrete_samples.csv"), samples_csv(discrete));
  write_file(run.path("sde_samples.csv"), samples_csv(sde));
  std::string grid = "t,discrete,sde,analytic\n";
  const auto steps = static_cast<std::size_t>(std::floor(t_max / grid_step + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * grid_step;
    grid += csv_number(t) + "," + csv_number(e_discrete(t)) + "," + csv_number(e_sde(t)) + "," +
            csv_number(analytic(t)) + "\n";
  }
  write_file(run.path("ecdf.csv"), grid);

  json summary = {{"n_realizations", n},
                  {"diffusion", matched ? "variance_matched" : "as_printed"},
                  {"censored_fraction",
                   {{"discrete", e_discrete.censored_fraction()}, {"sde", e_sde.censored_fraction()}}},
                  {"ks",
                   {{"discrete_sde", saddle::ks_distance(e_discrete, e_sde)},
                    {"discrete_analytic", saddle::ks_distance(analytic, e_discrete)},
                    {"sde_analytic", saddle::ks_distance(analytic, e_sde)}}},
                  {"analytic", {{"c", c}, {"kappa", lin.kappa}, {"sigma", lin.sigma},
                                {"tail_time", approx.tail_time()}}}};
  json warnings = json::array();
  if (e_discrete.sorted().empty() || e_sde.sorted().empty())
    warnings.push_back("empty ECDF: all samples censored");
  summary["warnings"] = warnings;

  int code = kOk;
  std::vector<std::string> failures;
  if (opts.check) {
    if (summary["ks"]["discrete_sde"].get<double>() > max_ds) failures.push_back("ks discrete_sde");
    if (summary["ks"]["discrete_analytic"].get<double>() > max_da)
      failures.push_back("ks discrete_analytic");
    if (max_sa && summary["ks"]["sde_analytic"].get<double>() > *max_sa)
      failures.push_back("ks sde_analytic");
    if (!failures.empty()) code = kCheckFailed;
  }
  summary["check_failures"] = failures;
  write_json(run.path("summary.json"), summary);
  run.finish(code);
  out << "saddle-hitting: KS discrete/sde " << format_double(summary["ks"]["discrete_sde"])
      << ", discrete/analytic " << format_double(summary["ks"]["discrete_analytic"]) << "\n";
  for (const auto& w : warnings) out << "saddle-hitting: warning: " << w.get<std::string>() << "\n";
  return code;
}

// ----------------------------------------------------------- ou-hitting

int cmd_ou_hitting(const Options& opts, std::ostream& out) {
  const Loaded cfg = load_config(opts.config_path);
  const Section top(cfg.doc, "",
                    with_globals({"kappa", "sigma", "c", "dt", "t_max", "n_realizations", "grid",
                                  "histogram_bins"}));
  const Globals g = read_globals(top, opts);
  saddle::OuParams p;
  p.kappa = top.number("kappa", p.kappa);
  p.sigma = top.number("sigma", p.sigma);
  p.c = top.number("c", p.c);
  p.dt = top.number("dt", p.dt);
  p.t_max = top.number("t_max", p.t_max);
  const std::size_t n = top.count("n_realizations", 10000);
  RealVector grid;
  if (top.has("grid"))
    grid = top.numbers("grid");
  else
    for (int k = 1; k <= 10; ++k) grid.push_back(0.5 * k);
  const std::size_t bins = top.count("histogram_bins", 50);
  try {
    p.validate();
    if (n == 0) throw UsageError("n_realizations must be positive");
    if (bins == 0) throw UsageError("histogram_bins must be positive");
    for (double t : grid)
      if (!(t > 0.0 && t <= p.t_max)) throw UsageError("grid points must lie in (0, t_max]");
  } catch (const UsageError& e) {
    throw ConfigError(std::string("ou-hitting: ") + e.what());
  }

  Run run("ou-hitting", opts, g);
  const auto samples = saddle::ou_hitting_ensemble(p, n, g.seed, 0, g.threads);
  const saddle::Ecdf e(samples, p.t_max);
  write_file(run.path("samples.csv"), samples_csv(samples));

  std::string table = "t,empirical,lower_bound,standard_error\n";
  bool dominance = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  double looseness = 0.0;
  for (double t : grid) {
    const double f = e(t), bound = saddle::ou_hitting_lower_cdf(t, p);
    const double se = std::sqrt(f * (1.0 - f) / static_cast<double>(n));
    dominance = dominance && f >= bound - 3.0 * se;
    worst_margin = std::min(worst_margin, f - bound);
    looseness = std::max(looseness, f - bound);
    table += csv_number(t) + "," + csv_number(f) + "," + csv_number(bound) + "," + csv_number(se) + "\n";
  }
  write_file(run.path("ecdf.csv"), table);

  std::string hist = "bin_lo,bin_hi,density\n";
  const double width = p.t_max / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (const auto& s : samples)
    if (!s.censored)
      ++counts[std::min(bins - 1, static_cast<std::size_t>(s.tau / width))];
  for (std::size_t k = 0; k < bins; ++k)
    hist += csv_number(k * width) + "," + csv_number((k + 1) * width) + "," +
            csv_number(static_cast<double>(counts[k]) / (static_cast<double>(n) * width)) + "\n";
  write_file(run.path("histogram.csv"), hist);

  json summary = {{"n_realizations", n},
                  {"kappa", p.kappa},
                  {"sigma", p.sigma},
                  {"c", p.c},
                  {"dt", p.dt},
                  {"censored_fraction", e.censored_fraction()},
                  {"dominance_pass", dominance},
                  {"min_margin", worst_margin},
                  {"looseness", looseness},
                  {"c_over_sigma_scale", p.sigma > 0.0 ? p.c * std::sqrt(p.kappa) / p.sigma : 0.0}};
  const int code = opts.check && !dominance ? kCheckFailed : kOk;
  write_json(run.path("summary.json"), summary);
  run.finish(code);
  out << "ou-hitting: dominance " << (dominance ? "holds" : "FAILS") << ", looseness "
      << format_double(looseness) << "\n";
  return code;
}

// -------------------------------------------------------- design-verify

int cmd_design_verify(const Options& opts, std::ostream& out) {
  const Loaded cfg = load_config(opts.config_path);
  const Section top(cfg.doc, "", with_globals({"set", "n", "seed_h"}));
  const Globals g = read_globals(top, opts);
  const json& set_spec = top.raw("set");
  designs::FiniteUnitarySet set = [&] {
    if (set_spec.is_string()) {
      const auto name = set_spec.get<std::string>();
      if (name == "clifford_1q") return designs::clifford_1q();
      if (name == "identity") {
        const std::size_t n = top.count("n", 2);
        if (n < 2) throw ConfigError("key 'n' must be >= 2");
        return designs::FiniteUnitarySet(n, {ComplexMatrix::identity(n)});
      }
      throw ConfigError("key 'set' must be \"clifford_1q\", \"identity\" or {\"file\": path}");
    }
    const Section s = top.sub("set", {"file"});
    fs::path file = s.text("file");
    if (file.is_relative()) file = cfg.dir / file;
    try {
      return designs::FiniteUnitarySet::load(file.string());
    } catch (const UsageError& e) {
      throw ConfigError("'set.file': " + std::string(e.what()));
    }
  }();
  const HermitianMatrix seed = [&] {
    if (top.has("seed_h")) return read_seed_h(top, "seed_h", set.n());
    ComplexMatrix z(set.n());
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return HermitianMatrix::symmetrized(z * Complex(1.0 / std::sqrt(2.0)));
  }();

  Run run("design-verify", opts, g);
  const auto report = designs::verify_design(set, seed);
  json j = report.to_json();
  j["size"] = set.size();
  j["n"] = set.n();
  write_json(run.path("design_report.json"), j);
  const int code = report.passes ? kOk : kCheckFailed;
  run.finish(code);
  out << "design-verify: " << (report.passes ? "passes" : "fails") << " (commutant dim "
      << report.commutant_dim << ", moment deviation " << format_double(report.moment_deviation)
      << ")\n";
  return code;
}

// ---------------------------------------------------------- stats-check

int cmd_stats_check(const Options& opts, std::ostream& out) {
  const Loaded cfg = load_config(opts.config_path);
  const Section top(cfg.doc, "", with_globals({"ks", "tail", "moments"}));
  const Globals g = read_globals(top, opts);

  std::optional<std::pair<std::size_t, std::size_t>> ks;
  if (top.has("ks")) {
    const Section s = top.sub("ks", {"N", "samples"});
    ks.emplace(s.count("N"), s.count("samples", 100000));
    if (ks->first < 5)
      throw ConfigError("key 'ks.N': the Kolmogorov-distance bounds require N >= 5");
    if (ks->second == 0) throw ConfigError("key 'ks.samples' must be positive");
  }
  struct Tail {
    std::size_t n;
    double k;
    std::size_t samples;
  };
  std::vector<Tail> tails;
  if (top.has("tail")) {
    const json& arr = top.raw("tail");
    if (!arr.is_array()) throw ConfigError("key 'tail' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Section s(arr[i], "tail[" + std::to_string(i) + "]", {"N", "k", "samples"});
      Tail t{s.count("N"), s.number("k"), s.count("samples", 100000)};
      if (t.n < 2) throw ConfigError("key '" + s.name("N") + "' must be >= 2");
      if (!(t.k > 0.0)) throw ConfigError("key '" + s.name("k") + "' must be positive");
      if (t.samples == 0) throw ConfigError("key '" + s.name("samples") + "' must be positive");
      tails.push_back(t);
    }
  }
  std::vector<std::size_t> moment_ns;
  std::size_t moment_samples = 100000;
  if (top.has("moments")) {
    const Section s = top.sub("moments", {"N", "samples"});
    for (double v : s.numbers("N")) {
      if (v < 2 || v != std::floor(v)) throw ConfigError("key 'moments.N' needs integers >= 2");
      moment_ns.push_back(static_cast<std::size_t>(v));
    }
    moment_samples = s.count("samples", moment_samples);
    if (moment_samples < 2) throw ConfigError("key 'moments.samples' must be >= 2");
  }

  Run run("stats-check", opts, g);
  json report = json::object();
  bool pass = true;
  if (ks) {
    RngStream rng(g.seed, 0);
    const auto r = stats::ks_bound_check(ks->first, ks->second, rng);
    report["ks"] = r.to_json();
    pass = pass && r.pass();
  }
  report["tail"] = json::array();
  for (std::size_t i = 0; i < tails.size(); ++i) {
    RngStream rng(g.seed, 1 + i);
    const auto r = stats::tail_bound_check(tails[i].n, tails[i].k, tails[i].samples, rng);
    report["tail"].push_back(r.to_json());
    pass = pass && r.pass;
  }
  report["moments"] = json::array();
  for (std::size_t i = 0; i < moment_ns.size(); ++i) {
    RngStream rng(g.seed, 1000 + i);
    const auto r = stats::moment_check(moment_ns[i], moment_samples, rng);
    report["moments"].push_back(r.to_json());
    pass = pass && r.pass;
  }
  report["pass"] = pass;
  write_json(run.path("stats_report.json"), report);
  const int code = opts.check && !pass ? kCheckFailed : kOk;
  run.finish(code);
  out << "stats-check: " << (pass ? "all checks pass" : "some checks fail") << "\n";
  return code;
}

// ----------------------------------------------------------------- main

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized tangent-direction gradient descent experiments"};
  app.require_subcommand(1);
  Options opts;
  std::uint64_t seed = 0;
  std::string out_dir;
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Options&, std::ostream&);
  };
  const Entry entries[] = {
      {"rgd-run", "Run descent ensembles", cmd_rgd_run},
      {"saddle-hitting", "Saddle passage times: discrete process, SDE, analytic", cmd_saddle_hitting},
      {"ou-hitting", "Ornstein-Uhlenbeck hitting times against the lower bound", cmd_ou_hitting},
      {"design-verify", "Verify unitary 2-design conditions", cmd_design_verify},
      {"stats-check", "Beta-law, Kolmogorov-bound and tail checks", cmd_stats_check},
  };
  std::vector<CLI::App*> subs;
  std::vector<CLI::Option*> seed_opts, out_opts;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", opts.config_path, "JSON config file")->required();
    sub->add_flag("--check", opts.check, "Exit 4 when an acceptance check fails");
    seed_opts.push_back(sub->add_option("--seed", seed, "Override the config seed"));
    out_opts.push_back(sub->add_option("--out", out_dir, "Override output_dir"));
    subs.push_back(sub);
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    if (seed_opts[k]->count()) opts.seed = seed;
    if (out_opts[k]->count()) opts.out = out_dir;
    try {
      return entries[k].fn(opts, out);
    } catch (const CheckFailed& e) {
      err << "error: " << e.what() << "\n";
      return kCheckFailed;
    } catch (const UsageError& e) {
      err << "config error: " << e.what() << "\n";
      return kConfigError;
    } catch (const CapabilityError& e) {
      err << "config error: " << e.what() << "\n";
      return kConfigError;
    } catch (const json::exception& e) {
      err << "config error: " << e.what() << "\n";
      return kConfigError;
    } catch (const Error& e) {
      err << "numeric error: " << e.what() << "\n";
      return kNumericError;
    }
  }
  return kConfigError;
}

}  // namespace mangrad::cli
