#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eefluct/disorder.hpp"
#include "eefluct/spectral.hpp"

namespace eefluct {

enum class Command { EntropyScan, Density, Lyapunov, BoundCurve, Factorization, HcrSelftest };

std::string_view command_name(Command command) noexcept;
Command parse_command(std::string_view name);

enum class Profile { Paper, Quick };

/// Fully resolved job description. Produced only by resolve_config, so every
/// instance has passed validation and has its grids filled in.
struct RunConfig {
  Command command = Command::EntropyScan;
  Profile profile = Profile::Paper;
  DisorderSpec disorder{Family::Exponential, 1.0};

  std::size_t n_sites = 5000;
  std::size_t block_len = 2500;
  std::optional<std::size_t> block_start;  ///< centered when unset
  double fermi_energy = 1.0;
  double shift_t = 0.0;
  std::optional<std::size_t> shift_site;

  double alpha = 1.0;  ///< infinity allowed
  std::size_t n_realizations = 2000;
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::string output_path = "eefluct.csv";

  std::vector<std::size_t> l_grid;
  std::vector<double> t_grid;
  std::vector<double> e_grid;
  std::vector<Family> families;
  std::vector<double> deltas;

  std::int64_t lyapunov_steps = 10'000'000;
  int lyapunov_batches = 100;
  std::size_t n_bins = 0;  ///< 0 picks default_bin_count
  std::size_t hcr_draws = 1'000'000;
  double hcr_t = 1.0;

  ChainConfig chain() const;
};

/// Ordered "section.key" -> raw value pairs.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// INI text: `[section]` headers, `key = value` lines, ';' or '#' comments.
/// Keys outside a section are rejected.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::filesystem::path& path);

/// Profile defaults, then `file`, then `overrides` (later wins). Throws
/// ValidationError naming the offending key for unknown keys, malformed
/// values and inconsistent settings.
RunConfig resolve_config(const KeyValues& file, const KeyValues& overrides = {});

/// Complete echo of a resolved config; config_from_json(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& json);

/// Reads the '#'-prefixed metadata line of an output file and returns the
/// config that produced it.
RunConfig config_from_output(const std::filesystem::path& path);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace eefluct
