#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recomb/error.hpp"

namespace recomb {

/// One CSV table. Cells are preformatted; numbers use format_double.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentOutput {
  std::string experiment;
  std::string config_hash;
  std::uint64_t seed = 0;
  bool passed = false;
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<Table> tables;

  /// {experiment, config_hash, seed, verdict, metrics}.
  nlohmann::json summary() const;
  /// Comment line with the run metadata, then header and body, CRLF line ends.
  std::string csv(const Table& table) const;
  /// Header and body only.
  std::string csv_body(const Table& table) const;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  /// Keys read besides "experiment" and "seed".
  std::vector<std::string> keys;
};

const std::vector<ExperimentInfo>& experiment_catalog();

/// FNV-1a 64 of the compact JSON dump (keys sorted), as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Runs one experiment in memory. `seed_override` replaces config["seed"]
/// before hashing. Config problems raise Error with kind invalid_argument.
ExperimentOutput run_experiment(const nlohmann::json& config, std::optional<std::uint64_t> seed_override = {});

/// Writes <dir>/<experiment>.json and one CSV per table: <experiment>.csv for
/// the first table, <experiment>_<table>.csv for the others.
std::vector<std::filesystem::path> write_outputs(const ExperimentOutput& out, const std::filesystem::path& dir);

/// 0 when the verdict passed, 1 otherwise.
int exit_code(const ExperimentOutput& out);
/// 2 for config and cap errors, 1 for invariant and numerical failures.
int error_exit_code(const Error& error);

/// Ordinary least squares slope of y on x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace recomb
