#pragma once

// Run persistence: flat key = value configs, per-run directories and manifests.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "enstro/errors.hpp"

#ifndef ENSTRO_VERSION
#define ENSTRO_VERSION "0.1.0"
#endif

namespace enstro {

inline constexpr const char* kVersion = ENSTRO_VERSION;

enum class ValueType { real, integer, text };

struct ConfigKey {
  std::string name;
  ValueType type = ValueType::real;
  std::string default_value;
  std::string help;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_real(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end && !s.empty();
}

inline bool parse_integer(const std::string& s, long long& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end && !s.empty();
}

inline const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::real: return "real";
    case ValueType::integer: return "integer";
    case ValueType::text: return "string";
  }
  return "?";
}

}  // namespace detail

/// Typed key-value settings over a fixed schema. Values are kept as validated text.
class Config {
 public:
  explicit Config(std::vector<ConfigKey> schema) : schema_(std::move(schema)) {
    for (const auto& k : schema_) values_[k.name] = k.default_value;
  }

  const std::vector<ConfigKey>& schema() const noexcept { return schema_; }

  /// origin names the source in error messages, e.g. "cfg.txt line 3" or "--nu".
  void set(const std::string& key, const std::string& value, const std::string& origin) {
    const ConfigKey* k = find(key);
    if (!k) throw ConfigError(origin + ": unknown key '" + key + "'; valid keys: " + key_list());
    double d;
    long long i;
    if (k->type == ValueType::real && !detail::parse_real(value, d)) {
      throw ConfigError(origin + ": '" + key + "' expects a real number, got '" + value + "'");
    }
    if (k->type == ValueType::integer && !detail::parse_integer(value, i)) {
      throw ConfigError(origin + ": '" + key + "' expects an integer, got '" + value + "'");
    }
    values_[key] = value;
  }

  double real(const std::string& key) const {
    double d = 0.0;
    detail::parse_real(at(key, ValueType::real), d);
    return d;
  }
  long long integer(const std::string& key) const {
    long long i = 0;
    detail::parse_integer(at(key, ValueType::integer), i);
    return i;
  }
  const std::string& text(const std::string& key) const { return at(key, ValueType::text); }

  /// Resolved values of the listed keys, typed.
  nlohmann::json to_json(const std::vector<std::string>& keys) const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& name : keys) {
      const ConfigKey* k = find(name);
      if (!k) continue;
      switch (k->type) {
        case ValueType::real: j[name] = real(name); break;
        case ValueType::integer: j[name] = integer(name); break;
        case ValueType::text: j[name] = text(name); break;
      }
    }
    return j;
  }

  std::string key_list() const {
    std::string s;
    for (const auto& k : schema_) s += (s.empty() ? "" : ", ") + k.name;
    return s;
  }

  const ConfigKey* find(const std::string& name) const {
    for (const auto& k : schema_)
      if (k.name == name) return &k;
    return nullptr;
  }

 private:
  const std::string& at(const std::string& key, ValueType want) const {
    const ConfigKey* k = find(key);
    if (!k) throw ConfigError("unknown key '" + key + "'");
    if (k->type != want) {
      throw ConfigError("key '" + key + "' is a " + detail::type_name(k->type) + ", read as " +
                        detail::type_name(want));
    }
    return values_.at(key);
  }

  std::vector<ConfigKey> schema_;
  std::map<std::string, std::string> values_;
};

/// Applies `key = value` lines; '#' starts a comment, blank lines are skipped.
inline void apply_config(Config& cfg, std::istream& is, const std::string& source) {
  std::string line;
  for (std::size_t no = 1; std::getline(is, line); ++no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + " line " + std::to_string(no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    cfg.set(key, value, where);
  }
}

inline Config load_config(const std::string& path, std::vector<ConfigKey> schema) {
  Config cfg(std::move(schema));
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  apply_config(cfg, is, path);
  return cfg;
}

// ---------------------------------------------------------------------------
// Run directories

/// ENSTRO_RUNS_DIR if set and nonempty, else ./runs.
inline std::filesystem::path runs_root() {
  const char* env = std::getenv("ENSTRO_RUNS_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("runs");
}

inline std::string utc_timestamp(const char* fmt = "%Y-%m-%dT%H:%M:%SZ") {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

/// Creates <root>/<timestamp>_<command>, with a numeric suffix on collision.
inline std::filesystem::path create_run_directory(const std::string& command,
                                                  const std::filesystem::path& root = runs_root()) {
  std::filesystem::create_directories(root);
  const std::string base = utc_timestamp("%Y%m%dT%H%M%SZ") + "_" + command;
  for (int k = 0; k < 1000; ++k) {
    const auto dir = root / (k == 0 ? base : base + "-" + std::to_string(k));
    if (std::filesystem::create_directory(dir)) return dir;
  }
  throw ConfigError("cannot create a run directory under " + root.string());
}

struct AssertionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Manifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::string started;
  std::string finished;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;  ///< file names relative to the run directory
  std::vector<AssertionResult> assertions;
  std::string error;  ///< set when the command aborted
  nlohmann::json results = nlohmann::json::object();

  bool passed() const {
    if (!error.empty()) return false;
    for (const auto& a : assertions)
      if (!a.passed) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["config"] = config;
    j["started"] = started;
    j["finished"] = finished;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    nlohmann::json as = nlohmann::json::array();
    for (const auto& a : assertions) as.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
    j["assertions"] = as;
    j["error"] = error.empty() ? nlohmann::json(nullptr) : nlohmann::json(error);
    j["results"] = results;
    j["passed"] = passed();
    return j;
  }
};

/// Writes manifest.json through a temporary file and a rename. Every listed
/// output must already exist in dir.
inline void write_manifest(const std::filesystem::path& dir, const Manifest& m) {
  for (const auto& f : m.outputs) {
    if (!std::filesystem::exists(dir / f)) throw ConfigError("manifest names missing output " + f);
  }
  const auto tmp = dir / "manifest.json.tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw ConfigError("cannot write " + tmp.string());
    os << m.to_json().dump(2) << '\n';
    if (!os) throw ConfigError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, dir / "manifest.json");
}

}  // namespace enstro
