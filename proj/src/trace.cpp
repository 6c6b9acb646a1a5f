#include "offo/trace.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "offo/core.hpp"

namespace offo {

using nlohmann::json;

namespace {

// JSON has no literals for non-finite numbers.
json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::runtime_error("trace: bad number '" + s + "'");
  }
  return j.get<double>();
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_jsonl(std::ostream& os, const Trace& t) {
  const TraceMeta& m = t.meta;
  json meta = {{"type", "meta"},          {"config_hash", m.config_hash}, {"git_revision", m.git_revision},
               {"seed", m.seed},          {"problem", m.problem},         {"cells", m.cells},
               {"dof", m.dof},            {"solver", m.solver},           {"cost_kind", m.cost_kind},
               {"levels", m.levels},      {"subdomains", m.subdomains},   {"overlap", m.overlap},
               {"variant", m.variant},    {"noise", m.noise},             {"sizes", m.sizes}};
  os << meta.dump() << '\n';
  for (const TraceRecord& r : t.records) {
    json j = {{"type", "cycle"},
              {"cycle", r.cycle},
              {"d_norm", number(r.d_norm)},
              {"xi_norm", number(r.xi_norm)},
              {"f", r.f ? number(*r.f) : json(nullptr)},
              {"cost", number(r.cost)},
              {"wall_time", number(r.wall_time)},
              {"evaluations", r.evaluations}};
    os << j.dump() << '\n';
  }
  const TraceSummary& s = t.summary;
  json sum = {{"type", "summary"},
              {"converged", s.converged},
              {"stop_reason", s.stop_reason},
              {"cycles", s.cycles},
              {"final_xi", number(s.final_xi)},
              {"cost", number(s.cost)},
              {"fallbacks", s.fallbacks},
              {"nonfinite_curvatures", s.nonfinite_curvatures},
              {"unequal_subdomain_counts", s.unequal_subdomain_counts},
              {"event_e", s.event_e}};
  os << sum.dump() << '\n';
}

Trace read_jsonl(std::istream& is) {
  Trace t;
  std::string line;
  std::size_t lineno = 0;
  bool have_meta = false, have_summary = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "meta") {
        TraceMeta& m = t.meta;
        m.config_hash = j.at("config_hash").get<std::string>();
        m.git_revision = j.at("git_revision").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.problem = j.at("problem").get<std::string>();
        m.cells = j.at("cells").get<int>();
        m.dof = j.at("dof").get<std::size_t>();
        m.solver = j.at("solver").get<std::string>();
        m.cost_kind = j.at("cost_kind").get<std::string>();
        m.levels = j.at("levels").get<int>();
        m.subdomains = j.at("subdomains").get<int>();
        m.overlap = j.at("overlap").get<int>();
        m.variant = j.at("variant").get<std::string>();
        m.noise = j.at("noise").get<std::string>();
        m.sizes = j.at("sizes").get<std::vector<std::size_t>>();
        have_meta = true;
      } else if (type == "cycle") {
        TraceRecord r;
        r.cycle = j.at("cycle").get<std::size_t>();
        r.d_norm = number(j.at("d_norm"));
        r.xi_norm = number(j.at("xi_norm"));
        if (!j.at("f").is_null()) r.f = number(j.at("f"));
        r.cost = number(j.at("cost"));
        r.wall_time = number(j.at("wall_time"));
        r.evaluations = j.at("evaluations").get<std::vector<std::uint64_t>>();
        t.records.push_back(std::move(r));
      } else if (type == "summary") {
        TraceSummary& s = t.summary;
        s.converged = j.at("converged").get<bool>();
        s.stop_reason = j.at("stop_reason").get<std::string>();
        s.cycles = j.at("cycles").get<std::size_t>();
        s.final_xi = number(j.at("final_xi"));
        s.cost = number(j.at("cost"));
        s.fallbacks = j.at("fallbacks").get<std::size_t>();
        s.nonfinite_curvatures = j.at("nonfinite_curvatures").get<std::size_t>();
        s.unequal_subdomain_counts = j.at("unequal_subdomain_counts").get<std::size_t>();
        s.event_e = j.at("event_e").get<bool>();
        have_summary = true;
      } else {
        throw std::runtime_error("unknown record type '" + type + "'");
      }
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "trace line " << lineno << ": " << e.what();
      throw std::runtime_error(os.str());
    }
  }
  if (!have_meta) throw std::runtime_error("trace: missing metadata line");
  if (!have_summary) throw std::runtime_error("trace: missing summary line");
  return t;
}

void write_csv(std::ostream& os, const Trace& t) {
  os << "cycle,d_norm,xi_norm,f,cost,wall_time";
  for (std::size_t i = 0; i < t.meta.sizes.size(); ++i) os << ",evals_" << i;
  os << '\n';
  for (const TraceRecord& r : t.records) {
    os << r.cycle << ',' << csv_number(r.d_norm) << ',' << csv_number(r.xi_norm) << ','
       << (r.f ? csv_number(*r.f) : "") << ',' << csv_number(r.cost) << ','
       << csv_number(r.wall_time);
    for (std::uint64_t e : r.evaluations) os << ',' << e;
    os << '\n';
  }
}

std::string to_jsonl(const Trace& trace) {
  std::ostringstream os;
  write_jsonl(os, trace);
  return os.str();
}

Trace parse_jsonl(const std::string& text) {
  std::istringstream is(text);
  return read_jsonl(is);
}

void save_trace(const Trace& trace, const std::string& base) {
  const std::filesystem::path p(base + ".jsonl");
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream js(base + ".jsonl");
  std::ofstream cs(base + ".csv");
  if (!js || !cs) throw std::runtime_error("cannot write trace '" + base + "'");
  write_jsonl(js, trace);
  write_csv(cs, trace);
}

Trace load_trace(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open trace '" + path + "'");
  return read_jsonl(is);
}

}  // namespace offo
