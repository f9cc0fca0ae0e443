#include "qcd/cli/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "qcd/linalg.hpp"

namespace qcd::cli {

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(std::span<const cplx> values) {
  Json out = Json::array();
  for (const cplx z : values) out.push_back(to_json(z));
  return out;
}

Json multiset_to_json(std::vector<cplx> values) {
  linalg::sort_lex(values);
  return to_json(std::span<const cplx>(values));
}

Json make_report(const std::string& command, const Json& config, Json results, Json summary) {
  Json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = command;
  r["config"] = config;
  r["results"] = std::move(results);
  r["summary"] = std::move(summary);
  r["timestamp"] = utc_timestamp();
  return r;
}

std::string payload(const Json& report) {
  Json copy = report;
  copy.erase("timestamp");
  return copy.dump();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_report(const Json& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file " + path);
  out << report.dump(2) << '\n';
  if (!out) throw ConfigError("failed writing " + path);
}

}  // namespace qcd::cli
