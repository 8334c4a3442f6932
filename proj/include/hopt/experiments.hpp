#pragma once

// Config-driven experiment pipelines. Every run writes its files under
// outputs_dir/<experiment>/<config-hash>/ together with a manifest.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hopt/data_io.hpp"

namespace hopt {

/// Flat `key = value` configuration with `#` comments. Unknown keys are
/// rejected; every known key has a default.
class ExperimentConfig {
 public:
  ExperimentConfig();

  static ExperimentConfig parse(std::istream& in, const std::string& source = "<config>");
  static ExperimentConfig load(const std::filesystem::path& path);

  /// `key=value`
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::size_t get_size(const std::string& key) const { return static_cast<std::size_t>(get_u64(key)); }
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::uint64_t> get_u64s(const std::string& key) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  static const std::map<std::string, std::string>& defaults();

  /// SHA-256 (first 16 hex digits) of every value except where output goes.
  std::string hash(const std::string& experiment) const;

  /// μ > 0 and ν derived from nu_rule.
  double mu() const;
  double nu() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Synthetic or LIBSVM data as described by the config, standardized.
Dataset load_dataset(const ExperimentConfig& cfg);
SyntheticSpec synthetic_spec(const ExperimentConfig& cfg);

struct EmittedFile {
  std::string name;
  std::string sha256;
};

struct RunResult {
  std::filesystem::path directory;
  std::vector<EmittedFile> files;
  std::filesystem::path manifest;
  bool numerical_ok = true;  // false when a gating check inside the run failed
};

const std::vector<std::string>& experiment_names();

/// Runs `experiment`; progress lines go to `log`.
RunResult run_experiment(const std::string& experiment, const ExperimentConfig& cfg, std::ostream& log);

/// Hex SHA-256 of a byte string / file.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace hopt
