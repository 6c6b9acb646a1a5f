#include "offo/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace offo {

std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::adagb2:
      return "adagb2";
    case SolverKind::ml:
      return "ml";
    case SolverKind::dd:
      return "dd";
    case SolverKind::mldd:
      return "ml-dd";
  }
  return "ml";
}

SolverKind solver_kind_from_string(const std::string& s) {
  if (s == "adagb2") return SolverKind::adagb2;
  if (s == "ml") return SolverKind::ml;
  if (s == "dd") return SolverKind::dd;
  if (s == "ml-dd" || s == "mldd" || s == "hybrid") return SolverKind::mldd;
  throw ConfigError("unknown solver '" + s + "' (expected adagb2, ml, dd or ml-dd)");
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  const char* b = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(b, &end);
  if (end == b || *end != '\0' || errno == ERANGE) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("expected true or false, got '" + s + "'");
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Field int_field(const char* key, T ExperimentConfig::*m) {
  return {key,
          [m, key](ExperimentConfig& c, const std::string& v) {
            const long long x = parse_int(v);
            if constexpr (std::is_unsigned_v<T>) {
              if (x < 0) throw ConfigError(std::string(key) + " must be nonnegative");
            }
            c.*m = static_cast<T>(x);
          },
          [m](const ExperimentConfig& c) { return std::to_string(c.*m); }};
}

Field double_field(const char* key, double ExperimentConfig::*m) {
  return {key, [m](ExperimentConfig& c, const std::string& v) { c.*m = parse_double(v); },
          [m](const ExperimentConfig& c) { return fmt_double(c.*m); }};
}

Field bool_field(const char* key, bool ExperimentConfig::*m) {
  return {key, [m](ExperimentConfig& c, const std::string& v) { c.*m = parse_bool(v); },
          [m](const ExperimentConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}

Field string_field(const char* key, std::string ExperimentConfig::*m) {
  return {key, [m](ExperimentConfig& c, const std::string& v) { c.*m = v; },
          [m](const ExperimentConfig& c) { return c.*m; }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> f = [] {
    std::vector<Field> v = {
        string_field("problem", &C::problem),
        int_field("n", &C::n),
        {"scale",
         [](C& c, const std::string& s) {
           if (s != "inverse_h") parse_double(s);
           c.scale = s;
         },
         [](const C& c) { return c.scale == "inverse_h" ? c.scale : fmt_double(parse_double(c.scale)); }},
        bool_field("minsurf_sqrt", &C::minsurf_sqrt),
        {"solver", [](C& c, const std::string& s) { c.solver = solver_kind_from_string(s); },
         [](const C& c) { return to_string(c.solver); }},
        int_field("levels", &C::levels),
        int_field("subdomains", &C::subdomains),
        int_field("overlap", &C::overlap),
        string_field("variant", &C::variant),
        string_field("coarse_model", &C::coarse_model),
        bool_field("truncation", &C::truncation),
        int_field("pre", &C::pre),
        int_field("post", &C::post),
        int_field("coarsest", &C::coarsest),
        int_field("dd_iterations", &C::dd_iterations),
        int_field("taylor_iterations", &C::taylor_iterations),
        int_field("subdomain_iterations", &C::subdomain_iterations),
        int_field("coarse_iterations", &C::coarse_iterations),
        int_field("coarsening", &C::coarsening),
        bool_field("coarse_first", &C::coarse_first),
        bool_field("divide_kappa_1st", &C::divide_kappa_1st),
        int_field("threads", &C::threads),
        double_field("varsigma", &C::varsigma),
        double_field("kappa_1st", &C::kappa_1st),
        double_field("kappa_2nd", &C::kappa_2nd),
        double_field("kappa_gs", &C::kappa_gs),
        double_field("kappa_s", &C::kappa_s),
        double_field("tau", &C::tau),
        bool_field("first_order", &C::first_order),
        double_field("learning_rate", &C::learning_rate),
        string_field("curvature", &C::curvature),
        bool_field("taylor_on_nogain", &C::taylor_on_nogain),
        string_field("noise", &C::noise),
        double_field("noise_variance", &C::noise_variance),
        double_field("noise_decay", &C::noise_decay),
        double_field("stop_absolute", &C::stop_absolute),
        double_field("stop_relative", &C::stop_relative),
        int_field("max_cycles", &C::max_cycles),
        int_field("seed", &C::seed),
        bool_field("report_f", &C::report_f),
        string_field("output", &C::output),
    };
    std::sort(v.begin(), v.end(), [](const Field& a, const Field& b) { return a.key < b.key; });
    return v;
  }();
  return f;
}

const Field* find_field(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

bool is_config_key(const std::string& key) { return find_field(key) != nullptr; }

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value,
                      const std::string& where) {
  const std::string prefix = where.empty() ? "" : where + ": ";
  const Field* f = find_field(key);
  if (f == nullptr) throw ConfigError(prefix + "unknown key '" + key + "'");
  try {
    f->set(c, value);
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + key + ": " + e.what());
  }
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
  };
  if (problem != "membrane" && problem != "minsurf" && problem != "poisson1d") {
    fail("problem", "unknown problem '" + problem + "' (expected membrane, minsurf or poisson1d)");
  }
  if (n < 2) fail("n", "need at least 2 cells");
  if (!(energy_scale() > 0.0) || !std::isfinite(energy_scale())) fail("scale", "must be positive");
  const int depth = solver == SolverKind::ml ? levels - 1
                    : solver == SolverKind::mldd ? coarsening
                                                 : 0;
  if (solver == SolverKind::ml && levels < 1) fail("levels", "must be at least 1");
  if (solver == SolverKind::mldd && coarsening < 1) fail("coarsening", "must be at least 1");
  if (depth > 0 && (n % (1 << depth) != 0 || (n >> depth) < 2)) {
    std::ostringstream os;
    os << n << " cells cannot be coarsened " << depth << " times by a factor of 2";
    fail(solver == SolverKind::ml ? "levels" : "coarsening", os.str());
  }
  try {
    schwarz_variant_from_string(variant);
  } catch (const ContractError& e) {
    fail("variant", e.what());
  }
  if (solver == SolverKind::dd || solver == SolverKind::mldd) {
    if (subdomains < 1) fail("subdomains", "must be at least 1");
    if (overlap < 0) fail("overlap", "must be nonnegative");
    if (dd_iterations < 0) fail("dd_iterations", "must be nonnegative");
    if (subdomain_iterations < 1) fail("subdomain_iterations", "must be at least 1");
    if (threads < 0) fail("threads", "must be nonnegative");
  }
  if (solver == SolverKind::dd && dd_iterations + taylor_iterations < 1) {
    fail("dd_iterations", "a cycle needs at least one iteration");
  }
  if (taylor_iterations < 0) fail("taylor_iterations", "must be nonnegative");
  if (coarse_iterations < 0) fail("coarse_iterations", "must be nonnegative");
  if (pre < 0) fail("pre", "must be nonnegative");
  if (post < 0) fail("post", "must be nonnegative");
  if (coarsest < 1) fail("coarsest", "must be at least 1");
  try {
    coarse_model_from_string(coarse_model);
  } catch (const ContractError& e) {
    fail("coarse_model", e.what());
  }
  if (curvature != "automatic" && curvature != "finite_difference" && curvature != "zero") {
    fail("curvature", "expected automatic, finite_difference or zero");
  }
  try {
    parameters().validate();
  } catch (const ContractError& e) {
    fail("constants", e.what());
  }
  try {
    noise_schedule();
  } catch (const ContractError& e) {
    fail("noise", e.what());
  }
  if (!(stop_absolute >= 0.0)) fail("stop_absolute", "must be nonnegative");
  if (!(stop_relative >= 0.0)) fail("stop_relative", "must be nonnegative");
  if (max_cycles < 1) fail("max_cycles", "must be at least 1");
}

double ExperimentConfig::energy_scale() const {
  if (scale == "inverse_h") return static_cast<double>(n);
  return parse_double(scale);
}

ProblemOptions ExperimentConfig::problem_options() const {
  ProblemOptions o;
  o.scale = energy_scale();
  o.minsurf_sqrt = minsurf_sqrt;
  return o;
}

Parameters ExperimentConfig::parameters() const {
  Parameters p;
  p.varsigma = varsigma;
  p.kappa_1st = kappa_1st;
  p.kappa_2nd = kappa_2nd;
  p.kappa_gs = kappa_gs;
  p.step.kappa_s = kappa_s;
  p.step.tau = tau;
  p.step.first_order = first_order;
  p.step.learning_rate = learning_rate;
  p.curvature = curvature == "zero"                ? CurvatureOracle::Mode::zero
                : curvature == "finite_difference" ? CurvatureOracle::Mode::finite_difference
                                                   : CurvatureOracle::Mode::automatic;
  p.taylor_on_nogain = taylor_on_nogain;
  return p;
}

StopRule ExperimentConfig::stop_rule() const {
  return {stop_absolute, stop_relative, static_cast<std::size_t>(max_cycles)};
}

NoiseSchedule ExperimentConfig::noise_schedule() const {
  NoiseSchedule s;
  try {
    s.kind = noise_kind_from_string(noise);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  if (s.kind != NoiseSchedule::Kind::none) s.variance = noise_variance;
  if (s.kind == NoiseSchedule::Kind::exponential) s.decay = noise_decay;
  s.validate();
  return s;
}

MultilevelOptions ExperimentConfig::multilevel_options() const {
  MultilevelOptions o;
  o.params = parameters();
  o.schedule = {pre, post, coarsest};
  o.model = coarse_model_from_string(coarse_model);
  o.truncation = truncation;
  o.stop = stop_rule();
  return o;
}

DDOptions ExperimentConfig::dd_options() const {
  DDOptions o;
  o.params = parameters();
  o.variant = schwarz_variant_from_string(variant);
  o.decomposition_iterations = dd_iterations;
  o.taylor_iterations = taylor_iterations;
  o.subdomain_iterations = subdomain_iterations;
  o.divide_kappa_1st = divide_kappa_1st;
  o.threads = static_cast<unsigned>(threads);
  o.noise = noise_schedule();
  o.seed = seed;
  o.stop = stop_rule();
  return o;
}

HybridOptions ExperimentConfig::hybrid_options() const {
  HybridOptions o;
  o.dd = dd_options();
  o.coarse_iterations = coarse_iterations;
  o.coarse_first = coarse_first;
  o.model = coarse_model_from_string(coarse_model);
  o.truncation = truncation;
  return o;
}

std::string ExperimentConfig::canonical() const {
  std::string s;
  for (const Field& f : fields()) s += f.key + "=" + f.get(*this) + "\n";
  return s;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

ExperimentConfig parse_config_yaml(const std::string& text, const std::string& name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << name << ":" << e.mark.line + 1 << ": malformed YAML: " << e.msg;
    throw ConfigError(os.str());
  }
  ExperimentConfig c;
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  auto where = [&](const YAML::Node& node) {
    std::ostringstream os;
    os << name << ":" << node.Mark().line + 1;
    return os.str();
  };
  if (!root.IsMap()) throw ConfigError(where(root) + ": expected a mapping of keys to values");
  std::vector<std::string> seen;
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError(where(kv.first) + ": duplicate key '" + key + "'");
    }
    seen.push_back(key);
    if (!kv.second.IsScalar()) {
      throw ConfigError(where(kv.second) + ": " + key + ": expected a scalar value");
    }
    set_config_value(c, key, kv.second.Scalar(), where(kv.first));
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    // Point at the key's line when the file set it.
    const std::string msg = e.what();
    const std::string key = msg.substr(0, msg.find(':'));
    const YAML::Node& croot = root;
    if (croot[key]) throw ConfigError(where(croot[key]) + ": " + msg);
    throw ConfigError(name + ": " + msg);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_yaml(ss.str(), path);
}

}  // namespace offo
