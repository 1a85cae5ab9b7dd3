#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "../vendor/CLI11.hpp"
#include "fac/manifest.hpp"
#include "fac/presets.hpp"

namespace fs = std::filesystem;

namespace {

int do_run(const std::string& path, const std::vector<std::string>& sets, bool dry) {
  fac::ExperimentConfig ec;
  try {
    ec = fac::load_experiment(path, sets);
    fac::validate_against_schema(ec.map, fac::preset_schema(ec.preset));
  } catch (const fac::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  if (dry) {
    std::printf("config ok: preset %s, out_dir %s\n", ec.preset.c_str(),
                ec.out_dir.string().c_str());
    return 0;
  }

  fac::DerivedConstants dc;
  try {
    fac::LayerProfile profile = fac::LayerProfile::exact();
    dc = fac::derived_constants(2, profile);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "setup failed: %s\n", e.what());
    return 3;
  }

  fac::PresetOutcome outcome;
  try {
    fs::create_directories(ec.out_dir);
    outcome = fac::run_preset(ec.preset, ec.map, ec.out_dir);
  } catch (const fac::SimAbort& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 3;
  } catch (const fac::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }

  nlohmann::json man = fac::build_manifest(ec, dc);
  for (const auto& c : outcome.checks) {
    fac::manifest_add_check(man, c.name, c.pass, c.detail);
    std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  }
  for (const auto& entry : fs::directory_iterator(ec.out_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      fac::manifest_add_output(man, entry.path().filename().string());
  fac::write_manifest(man, ec.out_dir);
  std::printf("wrote %s\n", (ec.out_dir / "manifest.json").string().c_str());
  return outcome.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"front dynamics simulator for the nonlocal Allen-Cahn equation"};
  app.require_subcommand(1);

  std::string cfg_path;
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "run a preset experiment from a config file");
  run->add_option("config", cfg_path, "key=value config file")->required();
  run->add_option("--set", sets, "override config entries (key=value, repeatable)");

  auto* val = app.add_subcommand("validate-config", "parse and validate a config file");
  val->add_option("config", cfg_path, "key=value config file")->required();
  val->add_option("--set", sets, "override config entries (key=value, repeatable)");

  auto* lp = app.add_subcommand("list-presets", "list presets and their config keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (lp->parsed()) {
    for (const auto& name : fac::preset_names()) {
      std::printf("%s\n", name.c_str());
      for (const auto& k : fac::preset_schema(name))
        std::printf("  %-24s (%c)  %s\n", k.key.c_str(), k.type, k.help.c_str());
    }
    return 0;
  }
  return do_run(cfg_path, sets, val->parsed());
}
