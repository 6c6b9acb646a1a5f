#include "offo/summary.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace offo {

namespace {

std::string cost_cell(const Trace& t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0f%s", t.summary.cost, t.summary.converged ? "" : "*");
  return buf;
}

std::string problem_label(const Trace& t) {
  return t.meta.problem + " n=" + std::to_string(t.meta.cells);
}

}  // namespace

std::vector<SummaryTable> summarize(const std::vector<Trace>& traces) {
  if (traces.empty()) throw std::invalid_argument("summarize: no traces");
  const std::string label = problem_label(traces.front());
  for (const Trace& t : traces) {
    if (problem_label(t) != label) {
      throw std::invalid_argument("summarize: traces mix problems (" + label + " and " +
                                  problem_label(t) + ")");
    }
  }

  std::vector<SummaryTable> tables;

  // Cost versus number of levels.
  std::map<int, const Trace*> by_levels;
  for (const Trace& t : traces) {
    if (t.meta.solver == "adagb2" || t.meta.solver == "ml") by_levels[t.meta.levels] = &t;
  }
  if (!by_levels.empty()) {
    SummaryTable tab{"C_ML versus levels (* = not converged)", {"problem"}, {}};
    std::vector<std::string> row{label};
    for (const auto& [levels, t] : by_levels) {
      tab.header.push_back(levels == 1 ? "1 (ADAGB2)" : std::to_string(levels));
      row.push_back(cost_cell(*t));
    }
    tab.rows.push_back(std::move(row));
    tables.push_back(std::move(tab));
  }

  // Cost versus subdomains and overlap.
  std::map<std::pair<int, int>, const Trace*> dd;
  std::set<int> overlaps;
  const Trace* single = by_levels.count(1) ? by_levels[1] : nullptr;
  for (const Trace& t : traces) {
    if (t.meta.solver == "dd") {
      dd[{t.meta.subdomains, t.meta.overlap}] = &t;
      overlaps.insert(t.meta.overlap);
    }
  }
  if (!dd.empty()) {
    SummaryTable tab{"C_DD versus subdomains (rows) and overlap (columns)", {"subdomains"}, {}};
    for (int o : overlaps) tab.header.push_back(std::to_string(o));
    if (single != nullptr) {
      std::vector<std::string> row{"1 (ADAGB2)", cost_cell(*single)};
      row.resize(tab.header.size(), "--");
      tab.rows.push_back(std::move(row));
    }
    std::set<int> ms;
    for (const auto& [key, t] : dd) ms.insert(key.first);
    for (int M : ms) {
      std::vector<std::string> row{std::to_string(M)};
      for (int o : overlaps) {
        auto it = dd.find({M, o});
        row.push_back(it == dd.end() ? "--" : cost_cell(*it->second));
      }
      tab.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(tab));
  }

  // Decomposition versus hybrid at equal subdomain count and overlap.
  std::map<std::pair<int, int>, const Trace*> hybrid;
  for (const Trace& t : traces) {
    if (t.meta.solver == "ml-dd") hybrid[{t.meta.subdomains, t.meta.overlap}] = &t;
  }
  if (!hybrid.empty()) {
    SummaryTable tab{"C_DD and C_ML-DD per subdomain count",
                     {"subdomains", "overlap", "C_DD", "cycles DD", "C_ML-DD", "cycles ML-DD"},
                     {}};
    for (const auto& [key, h] : hybrid) {
      auto it = dd.find(key);
      tab.rows.push_back({std::to_string(key.first), std::to_string(key.second),
                          it == dd.end() ? "--" : cost_cell(*it->second),
                          it == dd.end() ? "--" : std::to_string(it->second->summary.cycles),
                          cost_cell(*h), std::to_string(h->summary.cycles)});
    }
    tables.push_back(std::move(tab));
  }
  return tables;
}

std::string render_text(const SummaryTable& table) {
  std::vector<std::size_t> width(table.header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], row[i].size());
    }
  };
  widen(table.header);
  for (const auto& r : table.rows) widen(r);
  std::ostringstream os;
  os << table.title << '\n';
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string cell = i < row.size() ? row[i] : "";
      if (i > 0) os << " | ";
      // First column left aligned, numbers right aligned.
      if (i == 0) {
        os << cell << std::string(width[i] - cell.size(), ' ');
      } else {
        os << std::string(width[i] - cell.size(), ' ') << cell;
      }
    }
    os << '\n';
  };
  line(table.header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  os << std::string(total + 3 * (width.size() - 1), '-') << '\n';
  for (const auto& r : table.rows) line(r);
  return os.str();
}

std::string render_csv(const SummaryTable& table) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return os.str();
}

std::string trace_rows_csv(const std::vector<Trace>& traces) {
  std::ostringstream os;
  os << "problem,cells,solver,levels,subdomains,overlap,variant,noise,seed,cycles,cost,cost_kind,"
        "final_xi,converged,config_hash\n";
  for (const Trace& t : traces) {
    char xi[64], cost[64];
    std::snprintf(xi, sizeof xi, "%.17g", t.summary.final_xi);
    std::snprintf(cost, sizeof cost, "%.17g", t.summary.cost);
    os << t.meta.problem << ',' << t.meta.cells << ',' << t.meta.solver << ',' << t.meta.levels << ','
       << t.meta.subdomains << ',' << t.meta.overlap << ',' << t.meta.variant << ',' << t.meta.noise
       << ',' << t.meta.seed << ',' << t.summary.cycles << ',' << cost << ',' << t.meta.cost_kind
       << ',' << xi << ',' << (t.summary.converged ? "true" : "false") << ',' << t.meta.config_hash
       << '\n';
  }
  return os.str();
}

}  // namespace offo
