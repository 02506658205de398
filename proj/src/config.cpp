#include "eefluct/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "eefluct/ensemble.hpp"
#include "eefluct/error.hpp"
#include "eefluct/lyapunov.hpp"

namespace eefluct {

namespace {

[[noreturn]] void invalid(std::string_view key, const std::string& reason) {
  throw Error(ErrorKind::ValidationError, std::string(key) + ": " + reason);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view raw) {
  const std::string text = trim(raw);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    invalid(key, "expected a nonnegative integer, got '" + text + "'");
  }
  return value;
}

double parse_real(std::string_view key, std::string_view raw, bool allow_inf = false) {
  const std::string text = trim(raw);
  if (allow_inf && (text == "inf" || text == "infinity")) {
    return std::numeric_limits<double>::infinity();
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    invalid(key, "expected a finite number, got '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_list(std::string_view raw) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in{std::string(raw)};
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view raw, Parse&& parse) {
  std::vector<T> out;
  for (const auto& item : split_list(raw)) out.push_back(parse(item));
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"run.command", [](RunConfig& c, auto, auto v) { c.command = parse_command(trim(v)); }},
      {"run.seed",
       [](RunConfig& c, auto k, auto v) { c.master_seed = parse_integer<std::uint64_t>(k, v); }},
      {"run.n_realizations",
       [](RunConfig& c, auto k, auto v) { c.n_realizations = parse_integer<std::size_t>(k, v); }},
      {"run.alpha", [](RunConfig& c, auto k, auto v) { c.alpha = parse_real(k, v, true); }},
      {"run.workers", [](RunConfig& c, auto k, auto v) { c.workers = parse_integer<int>(k, v); }},
      {"run.output", [](RunConfig& c, auto, auto v) { c.output_path = trim(v); }},
      {"disorder.family",
       [](RunConfig& c, auto, auto v) {
         c.disorder = DisorderSpec(parse_family(trim(v)), c.disorder.delta());
       }},
      {"disorder.delta",
       [](RunConfig& c, auto k, auto v) {
         const double delta = parse_real(k, v);
         if (!(delta > 0.0)) invalid(k, "must be positive");
         c.disorder = DisorderSpec(c.disorder.family(), delta);
       }},
      {"chain.n_sites",
       [](RunConfig& c, auto k, auto v) { c.n_sites = parse_integer<std::size_t>(k, v); }},
      {"chain.block_len",
       [](RunConfig& c, auto k, auto v) { c.block_len = parse_integer<std::size_t>(k, v); }},
      {"chain.block_start",
       [](RunConfig& c, auto k, auto v) { c.block_start = parse_integer<std::size_t>(k, v); }},
      {"chain.fermi_energy",
       [](RunConfig& c, auto k, auto v) { c.fermi_energy = parse_real(k, v); }},
      {"chain.shift_t", [](RunConfig& c, auto k, auto v) { c.shift_t = parse_real(k, v); }},
      {"chain.shift_site",
       [](RunConfig& c, auto k, auto v) { c.shift_site = parse_integer<std::size_t>(k, v); }},
      {"grid.L",
       [](RunConfig& c, auto k, auto v) {
         c.l_grid = parse_list<std::size_t>(
             v, [&](const std::string& s) { return parse_integer<std::size_t>(k, s); });
       }},
      {"grid.t",
       [](RunConfig& c, auto k, auto v) {
         c.t_grid = parse_list<double>(v, [&](const std::string& s) { return parse_real(k, s); });
       }},
      {"grid.E",
       [](RunConfig& c, auto k, auto v) {
         c.e_grid = parse_list<double>(v, [&](const std::string& s) { return parse_real(k, s); });
       }},
      {"grid.families",
       [](RunConfig& c, auto, auto v) {
         c.families = parse_list<Family>(v, [](const std::string& s) { return parse_family(s); });
       }},
      {"grid.deltas",
       [](RunConfig& c, auto k, auto v) {
         c.deltas = parse_list<double>(v, [&](const std::string& s) { return parse_real(k, s); });
       }},
      {"lyapunov.n_steps",
       [](RunConfig& c, auto k, auto v) { c.lyapunov_steps = parse_integer<std::int64_t>(k, v); }},
      {"lyapunov.n_batches",
       [](RunConfig& c, auto k, auto v) { c.lyapunov_batches = parse_integer<int>(k, v); }},
      {"density.n_bins",
       [](RunConfig& c, auto k, auto v) { c.n_bins = parse_integer<std::size_t>(k, v); }},
      {"hcr.draws",
       [](RunConfig& c, auto k, auto v) { c.hcr_draws = parse_integer<std::size_t>(k, v); }},
      {"hcr.t", [](RunConfig& c, auto k, auto v) { c.hcr_t = parse_real(k, v); }},
  };
  return table;
}

RunConfig profile_defaults(Profile profile) {
  RunConfig cfg;
  cfg.profile = profile;
  if (profile == Profile::Quick) {
    cfg.n_sites = 1000;
    cfg.block_len = 501;
    cfg.n_realizations = 200;
    cfg.lyapunov_steps = 1'000'000;
    cfg.hcr_draws = 100'000;
  }
  return cfg;
}

Profile parse_profile(std::string_view raw) {
  const std::string v = trim(raw);
  if (v == "paper") return Profile::Paper;
  if (v == "quick") return Profile::Quick;
  invalid("run.profile", "expected paper or quick, got '" + v + "'");
}

std::string_view profile_name(Profile p) { return p == Profile::Quick ? "quick" : "paper"; }

std::vector<std::size_t> default_length_grid(std::size_t n_sites) {
  std::vector<std::size_t> grid;
  for (std::size_t k = 0; k <= 20; ++k) {
    const std::size_t len = std::min(n_sites, 2 * (k * n_sites / 40) + 1);
    if (grid.empty() || grid.back() != len) grid.push_back(len);
  }
  return grid;
}

void finalize(RunConfig& c) {
  if (c.n_sites == 0) invalid("chain.n_sites", "must be positive");
  if (c.block_len == 0) invalid("chain.block_len", "must be positive");
  if (c.block_len > c.n_sites) {
    invalid("chain.block_len", "block length " + std::to_string(c.block_len) +
                                   " exceeds chain.n_sites = " + std::to_string(c.n_sites));
  }
  if (c.block_start && *c.block_start + c.block_len > c.n_sites) {
    invalid("chain.block_start", "block does not fit in the chain");
  }
  if (c.shift_t < 0.0) invalid("chain.shift_t", "must be nonnegative");
  if (c.shift_site && *c.shift_site >= c.n_sites) invalid("chain.shift_site", "outside the chain");
  if (!(c.alpha > 0.0)) invalid("run.alpha", "must be positive");
  if (c.n_realizations < 2) invalid("run.n_realizations", "must be at least 2");
  if (c.workers < 1) invalid("run.workers", "must be at least 1");
  if (c.output_path.empty()) invalid("run.output", "must not be empty");
  if (c.lyapunov_steps < kMinLyapunovSteps) {
    invalid("lyapunov.n_steps", "must be at least " + std::to_string(kMinLyapunovSteps));
  }
  if (c.lyapunov_batches < 2) invalid("lyapunov.n_batches", "must be at least 2");
  if (c.hcr_draws < 2) invalid("hcr.draws", "must be at least 2");
  if (!(c.hcr_t > 0.0)) invalid("hcr.t", "must be positive");

  if (c.l_grid.empty()) c.l_grid = default_length_grid(c.n_sites);
  for (std::size_t len : c.l_grid) {
    if (len == 0 || len > c.n_sites) {
      invalid("grid.L", "block length " + std::to_string(len) + " outside [1, chain.n_sites]");
    }
  }
  if (c.t_grid.empty()) c.t_grid = default_t_grid(c.disorder.delta());
  for (double t : c.t_grid) {
    if (!(t > 0.0)) invalid("grid.t", "shifts must be positive");
  }
  if (c.e_grid.empty()) c.e_grid = {c.fermi_energy};
  if (c.families.empty()) {
    c.families = c.command == Command::Lyapunov
                     ? std::vector<Family>{Family::Uniform, Family::Exponential, Family::HalfCauchy}
                     : std::vector<Family>{c.disorder.family()};
  }
  if (c.deltas.empty()) {
    c.deltas = c.command == Command::Lyapunov ? std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0}
                                              : std::vector<double>{c.disorder.delta()};
  }
  for (double d : c.deltas) {
    if (!(d > 0.0)) invalid("grid.deltas", "disorder parameters must be positive");
  }
}

std::string json_scalar(const nlohmann::json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

}  // namespace

std::string_view command_name(Command command) noexcept {
  switch (command) {
    case Command::EntropyScan: return "entropy-scan";
    case Command::Density: return "density";
    case Command::Lyapunov: return "lyapunov";
    case Command::BoundCurve: return "bound-curve";
    case Command::Factorization: return "factorization";
    case Command::HcrSelftest: return "hcr-selftest";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::EntropyScan, Command::Density, Command::Lyapunov, Command::BoundCurve,
                    Command::Factorization, Command::HcrSelftest}) {
    if (command_name(c) == name) return c;
  }
  invalid("run.command", "unknown command '" + std::string(name) + "'");
}

ChainConfig RunConfig::chain() const {
  ChainConfig c = ChainConfig::centered(n_sites, block_len, fermi_energy);
  if (block_start) c.block.start = *block_start;
  c.shift_t = shift_t;
  c.shift_site = shift_site;
  return c;
}

KeyValues parse_config_text(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  // Boost's reader only knows ';' comments at the start of a line; accept
  // '#' and trailing comments too. No value in the grammar contains either.
  std::string cleaned;
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) {
    cleaned += line.substr(0, line.find_first_of("#;"));
    cleaned += '\n';
  }
  std::istringstream in{cleaned};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::ValidationError, "config line " + std::to_string(e.line()) + ": " +
                                                e.message());
  }
  KeyValues out;
  for (const auto& [section, node] : tree) {
    if (node.empty() && !node.data().empty()) {
      invalid(section, "keys must appear inside a [section]");
    }
    for (const auto& [key, leaf] : node) out.emplace_back(section + "." + key, leaf.data());
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

RunConfig resolve_config(const KeyValues& file, const KeyValues& overrides) {
  KeyValues merged = file;
  merged.insert(merged.end(), overrides.begin(), overrides.end());

  Profile profile = Profile::Paper;
  for (const auto& [key, value] : merged) {
    if (key == "run.profile") profile = parse_profile(value);
  }
  RunConfig cfg = profile_defaults(profile);
  // The command decides some grid defaults, so it goes first.
  for (const auto& [key, value] : merged) {
    if (key == "run.command") cfg.command = parse_command(trim(value));
  }

  const auto& table = setters();
  for (const auto& [key, value] : merged) {
    if (key == "run.profile") continue;
    const auto it = table.find(key);
    if (it == table.end()) invalid(key, "unknown configuration key");
    try {
      it->second(cfg, key, value);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ValidationError) throw;
      if (e.detail().find(key) != std::string::npos) throw;
      invalid(key, e.detail());
    }
  }
  // The block is half the chain unless given explicitly.
  const auto given = [&](std::string_view k) {
    return std::any_of(merged.begin(), merged.end(), [&](const auto& kv) { return kv.first == k; });
  };
  if (given("chain.n_sites") && !given("chain.block_len")) cfg.block_len = std::max<std::size_t>(1, cfg.n_sites / 2);
  finalize(cfg);
  return cfg;
}

nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  json families = json::array();
  for (Family f : c.families) families.push_back(family_name(f));
  return json{
      {"run",
       {{"command", command_name(c.command)},
        {"profile", profile_name(c.profile)},
        {"seed", c.master_seed},
        {"n_realizations", c.n_realizations},
        {"alpha", std::isinf(c.alpha) ? json("inf") : json(c.alpha)},
        {"workers", c.workers},
        {"output", c.output_path}}},
      {"disorder", {{"family", family_name(c.disorder.family())}, {"delta", c.disorder.delta()}}},
      {"chain",
       {{"n_sites", c.n_sites},
        {"block_len", c.block_len},
        {"block_start", c.block_start ? json(*c.block_start) : json(nullptr)},
        {"fermi_energy", c.fermi_energy},
        {"shift_t", c.shift_t},
        {"shift_site", c.shift_site ? json(*c.shift_site) : json(nullptr)}}},
      {"grid",
       {{"L", c.l_grid}, {"t", c.t_grid}, {"E", c.e_grid}, {"families", families}, {"deltas", c.deltas}}},
      {"lyapunov", {{"n_steps", c.lyapunov_steps}, {"n_batches", c.lyapunov_batches}}},
      {"density", {{"n_bins", c.n_bins}}},
      {"hcr", {{"draws", c.hcr_draws}, {"t", c.hcr_t}}},
  };
}

RunConfig config_from_json(const nlohmann::json& json) {
  if (!json.is_object()) throw Error(ErrorKind::ValidationError, "config JSON must be an object");
  KeyValues kv;
  for (const auto& [section, body] : json.items()) {
    if (!body.is_object()) invalid(section, "expected a section object");
    for (const auto& [key, value] : body.items()) {
      if (value.is_null()) continue;
      std::string text;
      if (value.is_array()) {
        for (const auto& item : value) {
          if (!text.empty()) text += ',';
          text += json_scalar(item);
        }
      } else {
        text = json_scalar(value);
      }
      kv.emplace_back(section + "." + key, text);
    }
  }
  return resolve_config(kv);
}

RunConfig config_from_output(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.empty() || line.front() != '#') {
    throw Error(ErrorKind::ValidationError, path.string() + " has no metadata header line");
  }
  const auto meta = nlohmann::json::parse(line.substr(1), nullptr, false);
  if (meta.is_discarded() || !meta.contains("config")) {
    throw Error(ErrorKind::ValidationError, path.string() + ": malformed metadata header");
  }
  return config_from_json(meta.at("config"));
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

}  // namespace eefluct
