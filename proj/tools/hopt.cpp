// hopt <experiment> --config <file> [--set key=value]...
// Exit codes: 0 ok, 1 numerical failure, 2 config / parse / IO error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hopt/error.hpp"
#include "hopt/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Homotopic optimization experiments"};
  std::string experiment;
  std::string config_path;
  std::vector<std::string> overrides;
  bool list = false;

  std::string names;
  for (const auto& n : hopt::experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "One of: " + names);
  app.add_option("--config,-c", config_path, "Config file (key = value)");
  app.add_option("--set,-s", overrides, "Override a config key, key=value")->take_all();
  app.add_flag("--list", list, "List experiments and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list) {
    for (const auto& n : hopt::experiment_names()) std::cout << n << '\n';
    return 0;
  }
  if (experiment.empty()) {
    std::cerr << "error: missing experiment name\n" << app.help();
    return 2;
  }

  try {
    hopt::ExperimentConfig cfg = config_path.empty() ? hopt::ExperimentConfig{}
                                                     : hopt::ExperimentConfig::load(config_path);
    for (const auto& o : overrides) cfg.apply_override(o);
    const hopt::RunResult r = hopt::run_experiment(experiment, cfg, std::cout);
    std::cout << "manifest: " << r.manifest.string() << '\n';
    if (!r.numerical_ok) {
      std::cerr << "error: a numerical check failed, see the emitted CSVs\n";
      return 1;
    }
    return 0;
  } catch (const hopt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case hopt::ErrorKind::ConfigError:
      case hopt::ErrorKind::ParseError:
      case hopt::ErrorKind::IoError:
      case hopt::ErrorKind::InvalidArgument:
      case hopt::ErrorKind::InfeasibleSpec:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
