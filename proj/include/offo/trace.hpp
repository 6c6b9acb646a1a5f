#pragma once

// Run traces: one JSON object per line (a metadata line, one line per cycle,
// a closing summary line) plus a CSV mirror of the cycle lines.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace offo {

struct TraceMeta {
  std::string config_hash;
  std::string git_revision;
  std::uint64_t seed = 0;
  std::string problem;
  int cells = 0;
  std::size_t dof = 0;
  std::string solver;
  std::string cost_kind;  // C_ML, C_DD or C_ML-DD
  int levels = 1;
  int subdomains = 0;
  int overlap = 0;
  std::string variant;
  std::string noise;
  // Entries of each record's evaluations, in order (e.g. level sizes).
  std::vector<std::size_t> sizes;

  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

struct TraceRecord {
  std::size_t cycle = 0;
  double d_norm = 0.0;
  double xi_norm = 0.0;
  std::optional<double> f;  // filled by the reporting pass only
  double cost = 0.0;
  double wall_time = 0.0;
  std::vector<std::uint64_t> evaluations;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct TraceSummary {
  bool converged = false;
  std::string stop_reason;
  std::size_t cycles = 0;
  double final_xi = 0.0;
  double cost = 0.0;
  std::size_t fallbacks = 0;
  std::size_t nonfinite_curvatures = 0;
  std::size_t unequal_subdomain_counts = 0;
  bool event_e = false;

  friend bool operator==(const TraceSummary&, const TraceSummary&) = default;
};

struct Trace {
  TraceMeta meta;
  std::vector<TraceRecord> records;
  TraceSummary summary;

  friend bool operator==(const Trace&, const Trace&) = default;
};

void write_jsonl(std::ostream& os, const Trace& trace);
Trace read_jsonl(std::istream& is);
void write_csv(std::ostream& os, const Trace& trace);

std::string to_jsonl(const Trace& trace);
Trace parse_jsonl(const std::string& text);

// <base>.jsonl and <base>.csv
void save_trace(const Trace& trace, const std::string& base);
Trace load_trace(const std::string& path);

}  // namespace offo
