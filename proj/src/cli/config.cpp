#include "qcd/cli/config.hpp"

#include <fstream>
#include <sstream>

namespace qcd::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where.empty() ? what : where + ": " + what);
}

Json check_top_level(Json j) {
  if (!j.is_object()) fail("", "config must be a JSON object");
  if (!j.contains("schema_version")) fail("", "missing schema_version");
  if (!j["schema_version"].is_string() || j["schema_version"].get<std::string>() != kSchemaVersion)
    fail("", std::string("schema_version must be \"") + kSchemaVersion + "\"");
  return j;
}

}  // namespace

Section::Section(const Json& object, std::string where) : object_(object), where_(std::move(where)) {
  if (!object_.is_object()) fail(where_, "expected an object");
}

bool Section::has(const std::string& key) const { return object_.contains(key); }

const Json& Section::raw(const std::string& key) {
  used_.insert(key);
  return object_.at(key);
}

double Section::number(const std::string& key, double fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_number()) fail(where_, key + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where_, key + " must be finite");
  return d;
}

double Section::positive(const std::string& key, double fallback) {
  const double d = number(key, fallback);
  if (!(d > 0.0)) fail(where_, key + " must be > 0");
  return d;
}

int Section::integer(const std::string& key, int fallback, int lo, int hi) {
  const auto v = optional_integer(key, lo, hi);
  return v ? *v : fallback;
}

std::optional<int> Section::optional_integer(const std::string& key, int lo, int hi) {
  if (!has(key)) return std::nullopt;
  const Json& v = raw(key);
  if (!v.is_number_integer()) fail(where_, key + " must be an integer");
  const auto i = v.get<long long>();
  if (i < lo || i > hi) fail(where_, key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(i);
}

std::uint64_t Section::u64(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_number_unsigned()) fail(where_, key + " must be an unsigned 64-bit integer");
  return v.get<std::uint64_t>();
}

bool Section::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_boolean()) fail(where_, key + " must be true or false");
  return v.get<bool>();
}

std::string Section::string(const std::string& key, const std::string& fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_string()) fail(where_, key + " must be a string");
  return v.get<std::string>();
}

cplx Section::complex(const std::string& key, cplx fallback) {
  if (!has(key)) return fallback;
  return parse_complex(raw(key), where_.empty() ? key : where_ + "." + key);
}

std::vector<cplx> Section::complex_list(const std::string& key) {
  if (!has(key)) fail(where_, "missing " + key);
  const Json& v = raw(key);
  if (!v.is_array()) fail(where_, key + " must be an array");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(parse_complex(v[i], where_ + "." + key + "[" + std::to_string(i) + "]"));
  return out;
}

Section Section::section(const std::string& key) {
  return Section(raw(key), where_.empty() ? key : where_ + "." + key);
}

void Section::finish() const {
  for (auto it = object_.begin(); it != object_.end(); ++it)
    if (!used_.count(it.key())) fail(where_, "unknown key \"" + it.key() + "\"");
}

Json parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail("", std::string("invalid JSON: ") + e.what());
  }
  return check_top_level(std::move(j));
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("", "cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

cplx parse_complex(const Json& value, const std::string& where) {
  if (value.is_number()) return {value.get<double>(), 0.0};
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number())
    return {value[0].get<double>(), value[1].get<double>()};
  fail(where, "expected a number or [re, im]");
}

spin_chain::ChainParams parse_chain(Section s) {
  spin_chain::ChainParams c;
  c.inhom = s.complex_list("inhom");
  c.L = static_cast<int>(c.inhom.size());
  if (c.L < 1 || c.L > spin_chain::kMaxSites)
    fail("chain", "inhom must have between 1 and " + std::to_string(spin_chain::kMaxSites) + " entries");
  const int L = s.integer("L", c.L, 1, spin_chain::kMaxSites);
  if (L != c.L) fail("chain", "L does not match the length of inhom");
  c.eta = s.complex("eta", c.eta);
  c.h = s.complex("h", c.h);
  c.v = s.complex("v", c.v);
  s.finish();
  c.validate();
  return c;
}

Json chain_to_json(const spin_chain::ChainParams& c) {
  Json j;
  j["L"] = c.L;
  j["eta"] = Json::array({c.eta.real(), c.eta.imag()});
  j["h"] = Json::array({c.h.real(), c.h.imag()});
  j["v"] = Json::array({c.v.real(), c.v.imag()});
  Json x = Json::array();
  for (const cplx z : c.inhom) x.push_back(Json::array({z.real(), z.imag()}));
  j["inhom"] = x;
  return j;
}

rs::RSState parse_rs_state(Section s) {
  rs::RSState st;
  st.eta = s.complex("eta", st.eta);
  st.x = s.complex_list("x");
  st.p = s.complex_list("p");
  s.finish();
  if (st.x.empty()) fail("state", "x must not be empty");
  if (st.x.size() != st.p.size()) fail("state", "x and p must have equal length");
  if (st.size() > rs::kMaxSubsetParticles) fail("state", "at most 12 particles");
  st.validate();
  return st;
}

Json rs_state_to_json(const rs::RSState& st) {
  Json j;
  j["eta"] = Json::array({st.eta.real(), st.eta.imag()});
  Json x = Json::array(), p = Json::array();
  for (const cplx z : st.x) x.push_back(Json::array({z.real(), z.imag()}));
  for (const cplx z : st.p) p.push_back(Json::array({z.real(), z.imag()}));
  j["x"] = x;
  j["p"] = p;
  return j;
}

}  // namespace qcd::cli
