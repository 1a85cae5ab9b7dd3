#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value store with dotted namespaces (sim.eps=0.05), '#' comments.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    ConfigMap cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      cfg.parse_line(line, path.string() + ":" + std::to_string(lineno));
    }
    return cfg;
  }

  void apply_override(const std::string& kv) { parse_line(kv, "--set " + kv); }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& def = "") const {
    auto it = kv_.find(key);
    consumed_.insert(key);
    return it == kv_.end() ? def : it->second;
  }

  double get_double(const std::string& key, double def) const {
    auto it = kv_.find(key);
    consumed_.insert(key);
    if (it == kv_.end()) return def;
    return parse_double(key, it->second);
  }

  int get_int(const std::string& key, int def) const {
    auto it = kv_.find(key);
    consumed_.insert(key);
    if (it == kv_.end()) return def;
    size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(it->second, &pos);
    } catch (...) {
      throw ConfigError("key '" + key + "': expected integer, got '" + it->second + "'");
    }
    if (pos != it->second.size())
      throw ConfigError("key '" + key + "': expected integer, got '" + it->second + "'");
    return v;
  }

  bool get_bool(const std::string& key, bool def) const {
    auto it = kv_.find(key);
    consumed_.insert(key);
    if (it == kv_.end()) return def;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + it->second + "'");
  }

  unsigned long long get_u64(const std::string& key, unsigned long long def) const {
    auto it = kv_.find(key);
    consumed_.insert(key);
    if (it == kv_.end()) return def;
    try {
      return std::stoull(it->second);
    } catch (...) {
      throw ConfigError("key '" + key + "': expected unsigned integer, got '" + it->second + "'");
    }
  }

  // comma-separated doubles
  std::vector<double> get_list(const std::string& key, std::vector<double> def) const {
    auto it = kv_.find(key);
    consumed_.insert(key);
    if (it == kv_.end()) return def;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_double(key, tok));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

  // keys never consumed by any getter: typos and stale settings
  std::vector<std::string> unconsumed() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_)
      if (!consumed_.count(k)) out.push_back(k);
    return out;
  }

 private:
  static double parse_double(const std::string& key, const std::string& s) {
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (...) {
      throw ConfigError("key '" + key + "': expected number, got '" + s + "'");
    }
    if (pos != s.size())
      throw ConfigError("key '" + key + "': expected number, got '" + s + "'");
    return v;
  }

  void parse_line(const std::string& raw, const std::string& where) {
    std::string line = raw;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto notspace = [](unsigned char c) { return !std::isspace(c); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
    if (line.empty()) return;
    auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(where + ": expected key=value, got '" + line + "'");
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
    val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));
    if (key.empty()) throw ConfigError(where + ": empty key");
    kv_[key] = val;
  }

  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> consumed_;
};

// Typed schema per preset: every config key must be declared here.
struct KeySpec {
  std::string key;
  char type;  // 'd' double, 'i' int, 's' string, 'b' bool, 'l' list
  std::string help;
};

inline void validate_against_schema(const ConfigMap& cfg, const std::vector<KeySpec>& schema) {
  std::map<std::string, char> types;
  for (const auto& ks : schema) types[ks.key] = ks.type;
  for (const auto& [k, v] : cfg.entries()) {
    auto it = types.find(k);
    if (it == types.end()) throw ConfigError("unknown config key '" + k + "'");
    switch (it->second) {
      case 'd': cfg.get_double(k, 0.0); break;
      case 'i': cfg.get_int(k, 0); break;
      case 'b': cfg.get_bool(k, false); break;
      case 'l': cfg.get_list(k, {}); break;
      default: cfg.get_string(k); break;
    }
  }
}

struct ExperimentConfig {
  std::string preset;
  std::filesystem::path out_dir;
  unsigned long long seed = 0;
  ConfigMap map;
};

// Output root: explicit out_dir if absolute, else under $FACSIM_OUT or cwd.
inline std::filesystem::path resolve_out_dir(const std::string& rel) {
  std::filesystem::path p(rel);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("FACSIM_OUT")) return std::filesystem::path(root) / p;
  return std::filesystem::current_path() / p;
}

inline ExperimentConfig load_experiment(const std::filesystem::path& file,
                                        const std::vector<std::string>& overrides) {
  ExperimentConfig ec;
  ec.map = ConfigMap::parse_file(file);
  for (const auto& ov : overrides) ec.map.apply_override(ov);
  ec.preset = ec.map.get_string("preset");
  if (ec.preset.empty()) throw ConfigError("config must set 'preset'");
  ec.seed = ec.map.get_u64("seed", 0);
  ec.out_dir = resolve_out_dir(ec.map.get_string("out_dir", "out/" + ec.preset));
  return ec;
}

}  // namespace fac
