#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "recomb/experiments.hpp"

namespace {

int list_experiments() {
  for (const auto& info : recomb::experiment_catalog()) {
    std::cout << info.name << "\n  " << info.description << "\n  keys: experiment, seed";
    for (const auto& k : info.keys) std::cout << ", " << k;
    std::cout << "\n";
  }
  return 0;
}

int run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  nlohmann::json config;
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "recombinator: cannot open " << config_path << "\n";
      return 2;
    }
    config = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "recombinator: " << config_path << ": " << e.what() << "\n";
    return 2;
  }
  try {
    const auto out = recomb::run_experiment(config, seed);
    for (const auto& path : recomb::write_outputs(out, out_dir)) std::cout << path.string() << "\n";
    std::cout << out.experiment << ": " << (out.passed ? "pass" : "fail") << "\n";
    return recomb::exit_code(out);
  } catch (const recomb::Error& e) {
    std::cerr << "recombinator: [" << e.module() << "] " << e.what() << "\n";
    return recomb::error_exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "recombinator: config: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recombination dynamics experiments"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run one experiment from a JSON config");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  run_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* list_cmd = app.add_subcommand("list", "Print experiment names and config keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*list_cmd) return list_experiments();
  return run(config_path, seed, out_dir);
}
