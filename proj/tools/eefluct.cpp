// eefluct: ensemble simulations of block entanglement entropy in the
// one-dimensional Anderson model.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eefluct/commands.hpp"
#include "eefluct/config.hpp"
#include "eefluct/error.hpp"
#include "eefluct/version.hpp"

namespace {

eefluct::KeyValues parse_overrides(const std::vector<std::string>& sets) {
  eefluct::KeyValues out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw eefluct::Error(eefluct::ErrorKind::ValidationError,
                           "--set expects section.key=value, got '" + s + "'");
    }
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disorder-ensemble statistics of block entanglement entropy"};
  app.set_version_flag("--version", std::string(eefluct::version_string()));

  std::string command;
  std::string config_path;
  std::string rerun_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> output;
  std::optional<std::string> family;
  std::optional<std::string> delta;
  std::optional<std::string> n_realizations;
  std::optional<std::string> sites;
  std::optional<std::string> block;
  std::optional<std::string> alpha;
  std::optional<std::string> energy;
  bool quick = false;
  bool paper = false;

  app.add_option("command", command,
                 "entropy-scan | density | lyapunov | bound-curve | factorization | hcr-selftest");
  app.add_option("-c,--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--rerun", rerun_path, "rerun the job recorded in an output file's header")
      ->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override a config key: section.key=value (repeatable)");
  app.add_option("-s,--seed", seed, "master seed");
  app.add_option("-j,--workers", workers, "worker threads");
  app.add_option("-o,--output", output, "output CSV path");
  app.add_option("--family", family, "uniform | exponential | half-cauchy");
  app.add_option("--delta", delta, "disorder scale");
  app.add_option("-n,--realizations", n_realizations, "number of disorder realizations");
  app.add_option("--sites", sites, "chain length N");
  app.add_option("--block", block, "block length L");
  app.add_option("--alpha", alpha, "Renyi index (positive, or inf)");
  app.add_option("--energy", energy, "Fermi energy");
  auto* quick_flag = app.add_flag("--quick", quick, "desk-scale profile (N=1000, n=200)");
  app.add_flag("--paper", paper, "paper-scale profile (default)")->excludes(quick_flag);

  CLI11_PARSE(app, argc, argv);

  try {
    eefluct::RunConfig cfg;
    if (!rerun_path.empty()) {
      if (!command.empty() || !config_path.empty() || !sets.empty()) {
        throw eefluct::Error(eefluct::ErrorKind::ValidationError,
                             "--rerun cannot be combined with a command, --config or --set");
      }
      cfg = eefluct::config_from_output(rerun_path);
      // Only the destination and parallelism may change on a rerun.
      if (output) cfg.output_path = *output;
      if (workers) cfg.workers = *workers;
    } else {
      if (command.empty()) {
        std::cerr << app.help();
        return 2;
      }
      eefluct::KeyValues file;
      if (!config_path.empty()) file = eefluct::read_config_file(config_path);
      eefluct::KeyValues flags{{"run.command", command}};
      if (quick) flags.emplace_back("run.profile", "quick");
      if (paper) flags.emplace_back("run.profile", "paper");
      auto put = [&](const char* key, const std::optional<std::string>& v) {
        if (v) flags.emplace_back(key, *v);
      };
      put("disorder.family", family);
      put("disorder.delta", delta);
      put("run.n_realizations", n_realizations);
      put("chain.n_sites", sites);
      put("chain.block_len", block);
      put("run.alpha", alpha);
      put("chain.fermi_energy", energy);
      put("run.output", output);
      if (seed) flags.emplace_back("run.seed", std::to_string(*seed));
      if (workers) flags.emplace_back("run.workers", std::to_string(*workers));
      for (auto& kv : parse_overrides(sets)) flags.push_back(std::move(kv));
      cfg = eefluct::resolve_config(file, flags);
    }
    return eefluct::run(cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
