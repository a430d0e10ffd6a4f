// Batch experiment driver: one subcommand per experiment kind, JSON config files with
// flag overrides, results.csv / summary.json / manifest.json per run.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hlab/experiments.hpp"
#include "hlab/parallel.hpp"
#include "hlab/special_fn.hpp"

#ifndef HLAB_VERSION
#define HLAB_VERSION "unknown"
#endif

using nlohmann::json;
using namespace hlab;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double to_double(const json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
  }
  throw ConfigError("'" + key + "' must be a number or \"inf\"");
}

json from_double(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

// Reads keys of a JSON object into fields; every key must be consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
  }
  ~Reader() = default;

  const json* find(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }
  std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError("unknown config key '" + (path_.empty() ? it.key() : path_ + "." + it.key()) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class T>
void read_value(const json& j, const std::string& key, T& out);

template <class T>
void read_value(const json& j, const std::string& key, std::vector<T>& out) {
  if (!j.is_array()) throw ConfigError("'" + key + "' must be an array");
  out.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    T v{};
    read_value(j[i], key + "[" + std::to_string(i) + "]", v);
    out.push_back(std::move(v));
  }
}

template <>
void read_value(const json& j, const std::string& key, double& out) { out = to_double(j, key); }

template <>
void read_value(const json& j, const std::string& key, int& out) {
  if (!j.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  out = j.get<int>();
}

template <>
void read_value(const json& j, const std::string& key, std::uint64_t& out) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ConfigError("'" + key + "' must be a non-negative integer");
  }
  out = j.get<std::uint64_t>();
}

template <>
void read_value(const json& j, const std::string& key, bool& out) {
  if (!j.is_boolean()) throw ConfigError("'" + key + "' must be a boolean");
  out = j.get<bool>();
}

template <>
void read_value(const json& j, const std::string& key, std::string& out) {
  if (!j.is_string()) throw ConfigError("'" + key + "' must be a string");
  out = j.get<std::string>();
}

template <>
void read_value(const json& j, const std::string& key, std::pair<double, double>& out) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("'" + key + "' must be a [p, q] pair");
  out = {to_double(j[0], key), to_double(j[1], key)};
}

template <>
void read_value(const json& j, const std::string& key, HorizontalProfile& out) {
  std::string s;
  read_value(j, key, s);
  if (s == "delta") out = HorizontalProfile::delta;
  else if (s == "gaussian") out = HorizontalProfile::gaussian;
  else throw ConfigError("'" + key + "' must be \"delta\" or \"gaussian\"");
}

template <>
void read_value(const json& j, const std::string& key, MultiplierKind& out) {
  std::string s;
  read_value(j, key, s);
  if (s == "sublaplacian") out = MultiplierKind::sublaplacian;
  else if (s == "full_laplacian") out = MultiplierKind::full_laplacian;
  else throw ConfigError("'" + key + "' must be \"sublaplacian\" or \"full_laplacian\"");
}

json to_json_value(double v) { return from_double(v); }
json to_json_value(int v) { return v; }
json to_json_value(std::uint64_t v) { return v; }
json to_json_value(bool v) { return v; }
json to_json_value(const std::string& v) { return v; }
json to_json_value(const std::pair<double, double>& v) { return json::array({from_double(v.first), from_double(v.second)}); }
json to_json_value(HorizontalProfile v) { return v == HorizontalProfile::delta ? "delta" : "gaussian"; }
json to_json_value(MultiplierKind v) { return v == MultiplierKind::sublaplacian ? "sublaplacian" : "full_laplacian"; }
template <class T>
json to_json_value(const std::vector<T>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json_value(x));
  return a;
}

// Field visitors: one function per config struct drives both reading and echoing.
struct ReadVisitor {
  Reader& r;
  template <class T>
  void operator()(const char* key, T& field) {
    if (const json* j = r.find(key)) read_value(*j, r.where(key), field);
  }
  template <class T, class F>
  void nested(const char* key, T& field, F visit);
};

struct WriteVisitor {
  json& j;
  template <class T>
  void operator()(const char* key, const T& field) { j[key] = to_json_value(field); }
  template <class T, class F>
  void nested(const char* key, T& field, F visit) {
    json sub = json::object();
    WriteVisitor w{sub};
    visit(w, field);
    j[key] = sub;
  }
};

template <class T, class F>
void ReadVisitor::nested(const char* key, T& field, F visit) {
  if (const json* j = r.find(key)) {
    Reader sub(*j, r.where(key));
    ReadVisitor v{sub};
    visit(v, field);
    sub.finish();
  }
}

template <class V>
void visit_restriction(V& v, RestrictionOptions& o) {
  v("profile", o.profile);
  v("gaussian_b", o.gaussian_b);
  v("K", o.K);
  v("radial_nodes", o.radial_nodes);
  v("radial_extent", o.radial_extent);
  v("central_window", o.central_window);
  v("central_step", o.central_step);
  v("central_points", o.central_points);
  v("sphere_points", o.sphere_points);
  v("dilate", o.dilate);
  v("multiplier", o.multiplier);
  v("alpha", o.alpha);
}

template <class V>
void visit_knapp_options(V& v, KnappOptions& o) {
  v("theta_points", o.theta_points);
  v("frequency_spacing", o.frequency_spacing);
  v("radial_points", o.radial_points);
  v("axial_points", o.axial_points);
  v("radial_extent", o.radial_extent);
  v("axial_extent", o.axial_extent);
  v("scale", o.scale);
}

template <class V>
void visit_algebra(V& v, AlgebraConfig& c) {
  v("points", c.points);
  v("half_extent", c.half_extent);
  v("kmax", c.kmax);
  v("samples", c.samples);
  v("seed", c.seed);
  v("idempotence_tol", c.idempotence_tol);
  v("orthogonality_tol", c.orthogonality_tol);
  v("adjoint_tol", c.adjoint_tol);
  v("runtime_budget", c.runtime_budget);
}

template <class V>
void visit_eigen(V& v, EigenConfig& c) {
  v("points", c.points);
  v("half_extent", c.half_extent);
  v("kmax", c.kmax);
  v("seed", c.seed);
  v("twisted_tol", c.twisted_tol);
  v("mu", c.mu);
  v("K", c.K);
  v("central_points", c.central_points);
  v("central_half_extent", c.central_half_extent);
  v("group_tol", c.group_tol);
  v("metivier_mu", c.metivier_mu);
  v("metivier_K", c.metivier_K);
  v("metivier_points", c.metivier_points);
  v("metivier_step", c.metivier_step);
  v("metivier_tol", c.metivier_tol);
}

template <class V>
void visit_reconstruction(V& v, ReconstructionConfig& c) {
  v("horizontal_points", c.horizontal_points);
  v("horizontal_half_extent", c.horizontal_half_extent);
  v("central_points", c.central_points);
  v("central_half_extent", c.central_half_extent);
  v("K", c.K);
  v("lambda_max", c.lambda_max);
  v("lambda_nodes", c.lambda_nodes);
  v("metivier_K", c.metivier_K);
  v("rho_max", c.rho_max);
  v("rho_nodes", c.rho_nodes);
  v("sphere_points", c.sphere_points);
  v("metivier_points", c.metivier_points);
  v("central_samples", c.central_samples);
  v("seed", c.seed);
  v("tol", c.tol);
  v("plancherel_K", c.plancherel_K);
  v("plancherel_lambda_nodes", c.plancherel_lambda_nodes);
  v("plancherel_lambda_max", c.plancherel_lambda_max);
  v("plancherel_tol", c.plancherel_tol);
}

template <class V>
void visit_symplectic(V& v, SymplecticConfig& c) {
  v("matrices", c.matrices);
  v("max_n", c.max_n);
  v("seed", c.seed);
  v("residual_tol", c.residual_tol);
  v("max_condition_inverse", c.max_condition_inverse);
  v("kmax", c.kmax);
  v("points", c.points);
  v("independence_tol", c.independence_tol);
}

template <class V>
void visit_equivalence(V& v, EquivalenceConfig& c) {
  v("points", c.points);
  v("half_extent", c.half_extent);
  v("central_points", c.central_points);
  v("central_half_extent", c.central_half_extent);
  v("mu", c.mu);
  v("K", c.K);
  v("tol", c.tol);
}

struct ProjectorChecksConfig {
  std::vector<std::string> sections = {"algebra", "eigen", "reconstruction", "plancherel", "symplectic", "equivalence"};
  AlgebraConfig algebra;
  EigenConfig eigen;
  ReconstructionConfig reconstruction;
  SymplecticConfig symplectic;
  EquivalenceConfig equivalence;
};

template <class V>
void visit_projector(V& v, ProjectorChecksConfig& c) {
  v("sections", c.sections);
  v.nested("algebra", c.algebra, [](auto& w, auto& x) { visit_algebra(w, x); });
  v.nested("eigen", c.eigen, [](auto& w, auto& x) { visit_eigen(w, x); });
  v.nested("reconstruction", c.reconstruction, [](auto& w, auto& x) { visit_reconstruction(w, x); });
  v.nested("symplectic", c.symplectic, [](auto& w, auto& x) { visit_symplectic(w, x); });
  v.nested("equivalence", c.equivalence, [](auto& w, auto& x) { visit_equivalence(w, x); });
}

template <class V>
void visit_slopes(V& v, SlopeConfig& c) {
  v("mus", c.mus);
  v("pairs", c.pairs);
  v("tol", c.tol);
  v.nested("options", c.options, [](auto& w, auto& x) { visit_restriction(w, x); });
}

template <class V>
void visit_fractional(V& v, FractionalConfig& c) {
  v("mus", c.mus);
  v("alpha", c.alpha);
  v("p", c.p);
  v("q", c.q);
  v("tol", c.tol);
  v.nested("options", c.options, [](auto& w, auto& x) { visit_restriction(w, x); });
}

template <class V>
void visit_case(V& v, MetivierRestrictionCase& c) {
  v("structure", c.structure);
  v("r", c.exps.r);
  v("p", c.exps.p);
  v("q", c.exps.q);
  v("mus", c.mus);
  v.nested("options", c.options, [](auto& w, auto& x) { visit_restriction(w, x); });
}

template <class V>
void visit_metivier(V& v, MetivierRestrictionConfig& c) {
  v("tol", c.tol);
  v("probe_out_of_range", c.probe_out_of_range);
  if constexpr (std::is_same_v<V, ReadVisitor>) {
    if (const json* j = v.r.find("cases")) {
      if (!j->is_array()) throw ConfigError("'cases' must be an array");
      c.cases.clear();
      for (std::size_t i = 0; i < j->size(); ++i) {
        Reader sub((*j)[i], "cases[" + std::to_string(i) + "]");
        ReadVisitor rv{sub};
        MetivierRestrictionCase mc;
        visit_case(rv, mc);
        sub.finish();
        c.cases.push_back(std::move(mc));
      }
    }
  } else {
    json a = json::array();
    for (auto& mc : c.cases) {
      json o = json::object();
      WriteVisitor w{o};
      visit_case(w, mc);
      a.push_back(o);
    }
    v.j["cases"] = a;
  }
}

template <class V>
void visit_opnorm(V& v, OpnormConfig& c) {
  v("points", c.points);
  v("half_extent", c.half_extent);
  v("ks", c.ks);
  v("ps", c.ps);
  v("starts", c.starts);
  v("seed", c.seed);
  v("tol", c.tol);
  v("closed_ks", c.closed_ks);
  v("closed_tol", c.closed_tol);
}

template <class V>
void visit_knapp(V& v, KnappConfig& c) {
  v("d", c.d);
  v("deltas", c.deltas);
  v("r_blowup", c.r_blowup);
  v("r_critical", c.r_critical);
  v("tol", c.tol);
  v.nested("options", c.options, [](auto& w, auto& x) { visit_knapp_options(w, x); });
}

template <class V>
void visit_series(V& v, SeriesConfig& c) {
  v("samples", c.samples);
  v("seed", c.seed);
  v("n", c.n);
  v("margin", c.margin);
  v("levels", c.levels);
}

struct Options {
  std::string config;
  std::string out = "hlab_out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool probe = false;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

template <class C, class F>
void parse(const json& j, C& cfg, F visit) {
  Reader r(j, "");
  ReadVisitor rv{r};
  visit(rv, cfg);
  r.finish();
}

// Effective configuration after defaults and flag overrides.
template <class C, class F>
json echo_of(C& cfg, F visit) {
  json echo = json::object();
  WriteVisitor wv{echo};
  visit(wv, cfg);
  return echo;
}

std::string timestamp_utc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_outputs(const Options& o, const std::string& kind, const json& config_echo, const ExperimentResult& res,
                   double wall, const std::string& started) {
  namespace fs = std::filesystem;
  fs::create_directories(o.out);
  {
    std::ofstream csv(fs::path(o.out) / "results.csv", std::ios::binary);
    res.table.write_csv(csv);
  }
  json summary;
  summary["kind"] = kind;
  summary["passed"] = res.passed();
  json checks = json::array();
  for (const auto& c : res.checks) {
    checks.push_back({{"name", c.name}, {"value", from_double(c.value)}, {"bound", from_double(c.bound)},
                      {"pass", c.pass}, {"detail", c.detail}});
  }
  summary["checks"] = checks;
  json metrics = json::object();
  for (const auto& [k, v] : res.metrics) metrics[k] = from_double(v);
  summary["metrics"] = metrics;
  std::ofstream(fs::path(o.out) / "summary.json") << summary.dump(2) << '\n';

  json manifest;
  manifest["kind"] = kind;
  manifest["version"] = HLAB_VERSION;
  manifest["compiler"] = __VERSION__;
  manifest["config_file"] = o.config;
  manifest["config"] = config_echo;
  manifest["seed_override"] = o.seed ? json(*o.seed) : json(nullptr);
  manifest["threads"] = o.threads;
  manifest["probe_out_of_range"] = o.probe;
  manifest["started_utc"] = started;
  manifest["wall_time_s"] = wall;
  std::ofstream(fs::path(o.out) / "manifest.json") << manifest.dump(2) << '\n';
}

int report(const ExperimentResult& res) {
  for (const auto& c : res.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << format_number(c.value)
              << (c.pass ? " <= " : " > ") << format_number(c.bound);
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << '\n';
  }
  return res.passed() ? 0 : 1;
}

ExperimentResult run_kind(const std::string& kind, const Options& o, json& echo) {
  const json j = load_config(o.config);
  auto seed = [&](std::uint64_t& s) {
    if (o.seed) s = *o.seed;
  };
  if (kind == "projector_checks") {
    ProjectorChecksConfig c;
    parse(j, c, [](auto& v, auto& x) { visit_projector(v, x); });
    for (auto* s : {&c.algebra.seed, &c.eigen.seed, &c.reconstruction.seed, &c.symplectic.seed}) seed(*s);
    const std::set<std::string> known = {"algebra", "eigen", "reconstruction", "plancherel", "symplectic", "equivalence"};
    for (const auto& s : c.sections) {
      if (!known.count(s)) throw ConfigError("unknown projector_checks section '" + s + "'");
    }
    echo = echo_of(c, [](auto& v, auto& x) { visit_projector(v, x); });
    ExperimentResult res;
    res.kind = kind;
    auto has = [&](const char* s) { return std::find(c.sections.begin(), c.sections.end(), s) != c.sections.end(); };
    if (has("algebra")) res.merge(check_projection_algebra(c.algebra));
    if (has("eigen")) res.merge(check_eigenrelations(c.eigen));
    if (has("reconstruction")) res.merge(check_reconstruction(c.reconstruction));
    if (has("plancherel")) res.merge(check_plancherel(c.reconstruction));
    if (has("symplectic")) res.merge(check_symplectic(c.symplectic));
    if (has("equivalence")) res.merge(check_d1_equivalence(c.equivalence));
    return res;
  }
  if (kind == "heisenberg_slopes") {
    SlopeConfig c;
    parse(j, c, [](auto& v, auto& x) { visit_slopes(v, x); });
    echo = echo_of(c, [](auto& v, auto& x) { visit_slopes(v, x); });
    return run_heisenberg_slopes(c);
  }
  if (kind == "full_laplacian_slopes") {
    SlopeConfig c = full_laplacian_defaults();
    parse(j, c, [](auto& v, auto& x) { visit_slopes(v, x); });
    echo = echo_of(c, [](auto& v, auto& x) { visit_slopes(v, x); });
    return run_full_laplacian_slopes(c);
  }
  if (kind == "fractional") {
    FractionalConfig c;
    parse(j, c, [](auto& v, auto& x) { visit_fractional(v, x); });
    if (!(c.alpha < 1.0)) throw ConfigError("fractional: alpha must be < 1");
    echo = echo_of(c, [](auto& v, auto& x) { visit_fractional(v, x); });
    return run_fractional(c);
  }
  if (kind == "metivier_restriction") {
    MetivierRestrictionConfig c = MetivierRestrictionConfig::defaults();
    parse(j, c, [](auto& v, auto& x) { visit_metivier(v, x); });
    if (o.probe) c.probe_out_of_range = true;
    echo = echo_of(c, [](auto& v, auto& x) { visit_metivier(v, x); });
    return run_metivier_restriction(c);
  }
  if (kind == "opnorm_gamma") {
    OpnormConfig c;
    parse(j, c, [](auto& v, auto& x) { visit_opnorm(v, x); });
    seed(c.seed);
    echo = echo_of(c, [](auto& v, auto& x) { visit_opnorm(v, x); });
    return run_opnorm_gamma(c);
  }
  if (kind == "knapp") {
    KnappConfig c;
    parse(j, c, [](auto& v, auto& x) { visit_knapp(v, x); });
    echo = echo_of(c, [](auto& v, auto& x) { visit_knapp(v, x); });
    return run_knapp(c);
  }
  if (kind == "series_table") {
    SeriesConfig c;
    parse(j, c, [](auto& v, auto& x) { visit_series(v, x); });
    seed(c.seed);
    echo = echo_of(c, [](auto& v, auto& x) { visit_series(v, x); });
    return run_series_table(c);
  }
  throw ConfigError("unknown experiment kind '" + kind + "'");
}

void list_builtins() {
  std::cout << "Built-in Metivier structures:\n";
  for (const auto& name : builtin_structure_names()) {
    const MetivierStructure st = builtin_structure(name);
    std::cout << "  " << name << "  (d = " << st.d << ", n = " << st.n << ")\n";
  }
  std::cout << "\nDefault grids:\n";
  const AlgebraConfig a;
  std::cout << "  projector_checks algebra: " << a.points << "^2 nodes on [-" << a.half_extent << ", " << a.half_extent
            << ")^2, k <= " << a.kmax << ", " << a.samples << " inputs\n";
  const EigenConfig e;
  std::cout << "  projector_checks eigen: " << e.points << "^2 horizontal, " << e.central_points << " central nodes on [-"
            << e.central_half_extent << ", " << e.central_half_extent << ")\n";
  const ReconstructionConfig r;
  std::cout << "  projector_checks reconstruction: " << r.horizontal_points << "^2 x " << r.central_points
            << " nodes, lambda in (0, " << r.lambda_max << "] with " << r.lambda_nodes << " nodes\n";
  const RestrictionOptions ro;
  std::cout << "  heisenberg_slopes: K = " << ro.K << ", " << ro.radial_nodes << " radial nodes on [0, "
            << ro.radial_extent << " mu^-1/2], central window [0, " << ro.central_window << " / mu) step "
            << ro.central_step << " / mu\n";
  const SlopeConfig fl = full_laplacian_defaults();
  std::cout << "  full_laplacian_slopes: K = " << fl.options.K << ", radial extent " << fl.options.radial_extent
            << ", central window [0, " << fl.options.central_window << ") step " << fl.options.central_step << "\n";
  const OpnormConfig op;
  std::cout << "  opnorm_gamma: " << op.points << "^2 nodes on [-" << op.half_extent << ", " << op.half_extent
            << ")^2\n";
  const KnappConfig kn;
  std::cout << "  knapp: d = " << kn.d << ", " << kn.options.theta_points << " cap nodes, " << kn.options.radial_points
            << " x " << kn.options.axial_points << " meridian grid\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral projector laboratory for Heisenberg and Metivier groups"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  const std::vector<std::string> kinds = {"projector_checks", "heisenberg_slopes", "full_laplacian_slopes",
                                          "fractional",       "metivier_restriction", "opnorm_gamma",
                                          "knapp",            "series_table"};
  for (const auto& k : kinds) {
    auto* sub = app.add_subcommand(k, "Run the " + k + " experiment");
    sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override every seed in the config");
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_flag("--probe-out-of-range", o.probe, "Allow exponents outside the theorem range");
  }
  app.add_subcommand("list_builtins", "List built-in structures and default grids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->get_name() == "list_builtins") {
    list_builtins();
    return 0;
  }
  if (chosen->count("--seed")) o.seed = seed;
  set_threads(o.threads);

  const std::string kind = chosen->get_name();
  const std::string started = timestamp_utc();
  const auto t0 = std::chrono::steady_clock::now();
  json echo;
  ExperimentResult res;
  try {
    res = run_kind(kind, o, echo);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const RangeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const AliasingError& e) {  // grid too coarse for the requested frequencies
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_outputs(o, kind, echo, res, wall, started);
  } catch (const std::exception& e) {
    std::cerr << "error writing outputs: " << e.what() << '\n';
    return 1;
  }
  return report(res);
}
