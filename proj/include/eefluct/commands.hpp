#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "eefluct/config.hpp"

namespace eefluct {

struct RunReport {
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
  /// False only when a self-check command (hcr-selftest) did not confirm
  /// its inequality.
  bool passed = true;
};

/// Runs one job and writes its CSV output. Progress and warnings go to
/// `log`. Errors propagate as exceptions.
RunReport execute(const RunConfig& cfg, std::ostream& log);

/// execute() with errors turned into a diagnostic on `log`: returns 0 on
/// success, 1 on any error, 3 when a self-check fails.
int run(const RunConfig& cfg, std::ostream& log);

/// Path of the per-realization sample file written by the density command.
std::filesystem::path samples_path(const std::filesystem::path& output);

}  // namespace eefluct
