#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace hdtk {

/// Invalid or missing configuration; `field()` is the dotted path of the
/// offending entry, e.g. `seed` or `u.k`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Criterion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct ExperimentResult {
  nlohmann::json report;
  std::string table_csv;
  bool passed = false;
};

const std::vector<std::string>& experiment_commands();

/// SHA-256 (hex) of the canonical serialization of the config.
std::string config_hash(const nlohmann::json& config);

/// Runs one command. Throws ConfigError for invalid configs and
/// AssertionFailure when an always-on numerical check trips.
ExperimentResult run_experiment(const std::string& command, const nlohmann::json& config);

/// Reads the config, runs it and writes report.json and table.csv into
/// out_dir. Returns 0 on pass, 2 on a failed criterion or assertion, 1 on a
/// config error; diagnostics go to `err`.
int run_cli(const std::string& command, const std::string& config_path, const std::string& out_dir,
            std::ostream& err);

}  // namespace hdtk
