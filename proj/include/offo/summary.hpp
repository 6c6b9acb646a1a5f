#pragma once

// Cost tables over a set of traces of one problem.

#include <string>
#include <vector>

#include "offo/trace.hpp"

namespace offo {

struct SummaryTable {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Cost versus levels (single-level and multilevel traces), cost versus
// subdomains and overlap (decomposition traces, the single-level run as one
// subdomain) and the decomposition/hybrid comparison per subdomain count.
// Throws std::invalid_argument for an empty set or traces of different
// problems.
std::vector<SummaryTable> summarize(const std::vector<Trace>& traces);

std::string render_text(const SummaryTable& table);
std::string render_csv(const SummaryTable& table);

// One machine-readable line per trace.
std::string trace_rows_csv(const std::vector<Trace>& traces);

}  // namespace offo
