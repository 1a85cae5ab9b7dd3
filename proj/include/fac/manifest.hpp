#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "../../vendor/json.hpp"
#include "fac/config.hpp"
#include "fac/constants.hpp"
#include "fac/version.hpp"

namespace fac {

using json = nlohmann::json;

// Run manifest: config echo, every derived constant consumed by the run,
// produced files, pass/fail summary.
inline json build_manifest(const ExperimentConfig& ec, const DerivedConstants& dc) {
  json m;
  m["version"] = version_string;
  m["preset"] = ec.preset;
  m["seed"] = ec.seed;
  json cfg = json::object();
  for (const auto& [k, v] : ec.map.entries()) cfg[k] = v;
  m["config"] = cfg;
  m["derived_constants"] = {{"n", dc.n},       {"Cn", dc.Cn},     {"kappa", dc.kappa},
                            {"A", dc.A},       {"Wpp0", dc.Wpp0}, {"alpha", dc.alpha},
                            {"c0", dc.c0},     {"mu", dc.mu}};
  m["outputs"] = json::array();
  m["checks"] = json::array();
  return m;
}

inline void manifest_add_output(json& m, const std::string& filename) {
  m["outputs"].push_back(filename);
}

inline void manifest_add_check(json& m, const std::string& name, bool pass,
                               const std::string& detail) {
  m["checks"].push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
}

inline bool manifest_all_pass(const json& m) {
  for (const auto& c : m["checks"])
    if (!c["pass"].get<bool>()) return false;
  return true;
}

inline void write_manifest(const json& m, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << "\n";
}

}  // namespace fac
