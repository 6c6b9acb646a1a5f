#pragma once

// Experiment configuration: a flat YAML mapping whose keys are the long
// names of the CLI flags. Flags override file values.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "offo/hybrid.hpp"
#include "offo/multilevel.hpp"
#include "offo/noise.hpp"
#include "offo/problems.hpp"

namespace offo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolverKind { adagb2, ml, dd, mldd };

std::string to_string(SolverKind k);
SolverKind solver_kind_from_string(const std::string& s);

struct ExperimentConfig {
  std::string problem = "membrane";
  int n = 32;                    // cells per direction on the finest mesh
  std::string scale = "inverse_h";  // number, or inverse_h for 1/h
  bool minsurf_sqrt = false;

  SolverKind solver = SolverKind::ml;
  int levels = 3;
  int subdomains = 4;
  int overlap = 2;
  std::string variant = "wras";
  std::string coarse_model = "tau";
  bool truncation = false;
  int pre = 3;
  int post = 3;
  int coarsest = 5;
  int dd_iterations = 10;
  int taylor_iterations = 1;
  int subdomain_iterations = 1;
  int coarse_iterations = 10;
  int coarsening = 3;  // hybrid: coarse space is 2^coarsening times coarser
  bool coarse_first = true;
  bool divide_kappa_1st = true;
  int threads = 0;

  double varsigma = 0.01;
  double kappa_1st = 0.95;
  double kappa_2nd = 10.0;
  double kappa_gs = 1.0;
  double kappa_s = 1.0;
  double tau = 1.0;
  bool first_order = false;
  double learning_rate = 1e-2;
  std::string curvature = "automatic";
  bool taylor_on_nogain = true;

  std::string noise = "none";
  double noise_variance = 0.0;
  double noise_decay = 0.0;

  double stop_absolute = 1e-7;
  double stop_relative = 1e-9;
  std::uint64_t max_cycles = 100000;
  std::uint64_t seed = 0;
  bool report_f = true;
  std::string output;

  // Throws ConfigError naming the offending key.
  void validate() const;

  double energy_scale() const;
  ProblemOptions problem_options() const;
  Parameters parameters() const;
  StopRule stop_rule() const;
  NoiseSchedule noise_schedule() const;
  MultilevelOptions multilevel_options() const;
  DDOptions dd_options() const;
  HybridOptions hybrid_options() const;

  // key=value lines in key order, doubles with 17 significant digits.
  std::string canonical() const;
  std::string hash() const;  // FNV-1a 64 of canonical(), 16 hex digits
};

// Applies key/value pairs (CLI flags or parsed YAML scalars). `where`
// prefixes error messages, e.g. "config.yaml:12".
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value,
                      const std::string& where = "");

bool is_config_key(const std::string& key);
const std::vector<std::string>& config_keys();

// Unknown keys, malformed YAML and bad values raise ConfigError with
// file:line context. The result is validated.
ExperimentConfig parse_config_yaml(const std::string& text, const std::string& name = "<config>");
ExperimentConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace offo
