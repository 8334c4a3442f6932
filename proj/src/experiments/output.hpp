#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hopt/experiments.hpp"

namespace hopt::detail {

/// Writes `content` to dir/name through a temporary file and a rename.
EmittedFile write_output(const std::filesystem::path& dir, const std::string& name,
                         const std::string& content);

void write_manifest(const std::filesystem::path& path, const std::string& experiment,
                    const ExperimentConfig& cfg, const std::vector<EmittedFile>& files,
                    double wall_seconds);

}  // namespace hopt::detail
