#pragma once

#include <span>
#include <string>
#include <vector>

#include "qcd/cli/config.hpp"
#include "qcd/common.hpp"

namespace qcd::cli {

Json to_json(cplx z);
Json to_json(std::span<const cplx> values);
// Multiset: sorted by (Re, Im) before writing.
Json multiset_to_json(std::vector<cplx> values);

// Top-level report. The timestamp is the only field that varies between
// identical runs.
Json make_report(const std::string& command, const Json& config, Json results, Json summary);

// Same document without the timestamp, serialized.
std::string payload(const Json& report);

std::string utc_timestamp();

// Writes indented JSON plus a newline. Throws ConfigError when the path
// cannot be opened.
void write_report(const Json& report, const std::string& path);

}  // namespace qcd::cli
