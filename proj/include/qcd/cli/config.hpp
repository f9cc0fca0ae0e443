#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "qcd/common.hpp"
#include "qcd/ruijsenaars.hpp"
#include "qcd/spin_chain.hpp"

namespace qcd::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

// Values given on the command line; they override the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> trials;
};

// Reads a JSON object key by key and rejects whatever was not consumed.
class Section {
 public:
  Section(const Json& object, std::string where);

  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);

  double number(const std::string& key, double fallback);
  double positive(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback, int lo, int hi);
  std::optional<int> optional_integer(const std::string& key, int lo, int hi);
  std::uint64_t u64(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key, const std::string& fallback);
  cplx complex(const std::string& key, cplx fallback);
  std::vector<cplx> complex_list(const std::string& key);
  Section section(const std::string& key);

  // Throws ConfigError naming the first unknown key.
  void finish() const;

 private:
  const Json& object_;
  std::string where_;
  std::set<std::string> used_;
};

// Parses and checks schema_version. Throws ConfigError.
Json load_config_file(const std::string& path);
Json parse_config_text(const std::string& text);

cplx parse_complex(const Json& value, const std::string& where);

// {"L", "eta", "h", "v", "inhom"}; L may be omitted. Validates.
spin_chain::ChainParams parse_chain(Section section);
Json chain_to_json(const spin_chain::ChainParams& chain);

// {"eta", "x", "p"}. Validates.
rs::RSState parse_rs_state(Section section);
Json rs_state_to_json(const rs::RSState& state);

}  // namespace qcd::cli
