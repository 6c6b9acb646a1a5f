// offo: run experiments, summarize traces, check invariants.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "offo/config.hpp"
#include "offo/runner.hpp"
#include "offo/summary.hpp"
#include "offo/trace.hpp"
#include "offo/verify.hpp"

namespace {

int do_run(const std::string& config_path, const std::map<std::string, std::string>& flags,
           bool quiet, bool no_write) {
  using namespace offo;
  ExperimentConfig c;
  try {
    if (!config_path.empty()) c = load_config(config_path);
    for (const auto& [k, v] : flags) set_config_value(c, k, v, "--" + k);
    c.validate();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  RunOutcome out;
  try {
    out = run_experiment(c);
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  std::string where;
  if (!no_write) {
    where = trace_base_path(c);
    save_trace(out.trace, where);
  }
  if (!quiet) {
    const TraceSummary& s = out.trace.summary;
    std::printf("%s %s: %s after %zu cycles, |Xi| = %.3e, %s = %.1f\n", c.problem.c_str(),
                to_string(c.solver).c_str(), s.converged ? "converged" : "budget exhausted",
                s.cycles, s.final_xi, out.trace.meta.cost_kind.c_str(), s.cost);
    if (!where.empty()) std::printf("trace: %s.jsonl (config %s)\n", where.c_str(), c.hash().c_str());
  }
  return out.exit_code;
}

int do_summarize(const std::vector<std::string>& files, bool csv_only) {
  using namespace offo;
  std::vector<Trace> traces;
  try {
    for (const auto& f : files) traces.push_back(load_trace(f));
    const std::vector<SummaryTable> tables = summarize(traces);
    for (const auto& t : tables) {
      std::cout << (csv_only ? render_csv(t) : render_text(t)) << '\n';
    }
    if (!csv_only) std::cout << "rows\n";
    std::cout << trace_rows_csv(traces);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int do_verify(bool quick) {
  const std::vector<offo::CheckResult> results = offo::run_invariant_suite(quick);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%s %s (%.1fs): %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Objective-function-free multilevel and domain decomposition experiments"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run one experiment and write its trace");
  std::string config_path;
  bool quiet = false, no_write = false;
  run->add_option("-c,--config", config_path, "YAML experiment file")->check(CLI::ExistingFile);
  run->add_flag("-q,--quiet", quiet, "No summary line");
  run->add_flag("--no-write", no_write, "Do not write the trace files");
  std::map<std::string, std::string> values;
  for (const std::string& key : offo::config_keys()) {
    std::string names = "--" + key;
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (dashed != key) names += ",--" + dashed;
    run->add_option_function<std::string>(
        names, [&values, key](const std::string& v) { values[key] = v; }, "Override " + key);
  }

  CLI::App* sum = app.add_subcommand("summarize", "Cost tables from trace files");
  std::vector<std::string> files;
  bool csv_only = false;
  sum->add_option("traces", files, "Trace files (.jsonl)")->required();
  sum->add_flag("--csv", csv_only, "Machine-readable tables only");

  CLI::App* ver = app.add_subcommand("verify", "Run the invariant suite");
  bool quick = false;
  ver->add_flag("--quick", quick, "Smaller randomized suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : offo::kExitInvalid;
  }

  if (*run) return do_run(config_path, values, quiet, no_write);
  if (*sum) return do_summarize(files, csv_only);
  return do_verify(quick);
}
