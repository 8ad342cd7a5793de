// psmeta: run figure presets or custom ensembles, and check the model.
//
//   psmeta preset fig3 --out results/
//   psmeta preset fig7 --desk --workers 0
//   psmeta run --config my.cfg
//   psmeta validate --only 1,3
//   psmeta maps

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "psmeta/psmeta.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRunError = 1;

std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PSMETA_OUT"); env && *env) return env;
  return "results";
}

int run_config(psmeta::EnsembleConfig cfg, const std::string& out, const std::optional<std::uint64_t>& seed,
               std::size_t workers) {
  if (seed) cfg.seed = *seed;
  const auto dir = output_dir(out);
  for (const auto& path : psmeta::run_to_files(cfg, dir, {workers})) std::cout << path.string() << '\n';
  return 0;
}

int print_maps() {
  for (char id : {'a', 'b', 'c'}) {
    const auto map = psmeta::shipped_map(id);
    std::cout << "map " << id << ": shortest_path=" << map.goal_distance;
    if (map.distractor_distance) std::cout << " distractor_path=" << *map.distractor_distance;
    std::cout << '\n' << map.render() << '\n';
  }
  return 0;
}

int validate(const std::vector<int>& only, std::size_t workers) {
  bool all = true;
  for (const auto& def : psmeta::criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), def.id) == only.end()) continue;
    const auto result = psmeta::run_criterion(def, {workers});
    std::cout << psmeta::format_result(result) << std::endl;
    all = all && result.passed;
  }
  return all ? 0 : kRunError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projective simulation with meta-learned damping and glow"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out;
  std::uint64_t seed_value = 0;
  std::size_t workers = 1;
  bool desk = false;
  std::string config_path;
  std::string preset_name;
  std::vector<int> only;

  auto* seed_opt = app.add_option("--seed", seed_value, "Override the base seed");
  app.add_option("--out", out, "Output directory (default $PSMETA_OUT, then ./results)");
  app.add_option("--workers", workers, "Worker threads; 0 = one per hardware thread");
  app.add_flag("--desk", desk, "Use the scaled-down preset");
  app.add_option("--config", config_path, "Config file for `run`");

  auto* preset_cmd = app.add_subcommand("preset", "Run a figure preset");
  preset_cmd->add_option("name", preset_name, "fig1, fig2, fig3, fig4, fig7, fig8, fig9 or fig10")->required();
  auto* run_cmd = app.add_subcommand("run", "Run an ensemble described by a config file");
  auto* validate_cmd = app.add_subcommand("validate", "Run the acceptance checks");
  validate_cmd->add_option("--only", only, "Criterion ids to run")->delimiter(',');
  auto* maps_cmd = app.add_subcommand("maps", "Print the shipped grid-world maps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  const auto seed = seed_opt->count() ? std::optional<std::uint64_t>(seed_value) : std::nullopt;
  try {
    if (*maps_cmd) return print_maps();
    if (*validate_cmd) return validate(only, workers);
    if (*preset_cmd) {
      psmeta::EnsembleConfig cfg;
      try {
        const bool suffixed = preset_name.find(':') != std::string::npos;
        cfg = psmeta::preset(desk && !suffixed ? preset_name + ":desk" : preset_name);
      } catch (const psmeta::LookupError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << preset_cmd->help();
        return kUsageError;
      }
      return run_config(std::move(cfg), out, seed, workers);
    }
    if (*run_cmd) {
      if (config_path.empty()) {
        std::cerr << "error: run needs --config PATH\n\n" << run_cmd->help();
        return kUsageError;
      }
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot open " << config_path << '\n';
        return kRunError;
      }
      std::stringstream text;
      text << in.rdbuf();
      return run_config(psmeta::parse_config(text.str()), out, seed, workers);
    }
  } catch (const psmeta::ConfigError& e) {
    std::cerr << (config_path.empty() ? std::string("config") : config_path) << ": " << e.what() << '\n';
    return kRunError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunError;
  }
  return 0;
}
