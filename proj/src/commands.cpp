#include "eefluct/commands.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "eefluct/ensemble.hpp"
#include "eefluct/error.hpp"
#include "eefluct/lyapunov.hpp"
#include "eefluct/output.hpp"
#include "eefluct/parallel.hpp"
#include "eefluct/statistics.hpp"
#include "eefluct/version.hpp"

namespace eefluct {

namespace {

using nlohmann::json;

std::string num(double x) { return format_number(x); }
std::string num(std::size_t x) { return std::to_string(x); }
std::string num(std::int64_t x) { return std::to_string(x); }

json metadata(const RunConfig& cfg, std::string_view kind, const json& summary) {
  return json{{"tool", "eefluct"},
              {"version", version_string()},
              {"command", command_name(cfg.command)},
              {"file", kind},
              {"master_seed", cfg.master_seed},
              {"config", to_json(cfg)},
              {"summary", summary}};
}

json stats_json(const EnsembleStats& s) {
  return json{{"n_realizations", s.n_realizations}, {"mean", s.mean},
              {"variance", s.variance},             {"coeff_variation", s.coeff_variation},
              {"stderr_mean", s.stderr_mean},       {"stderr_cv", s.stderr_cv},
              {"degenerate", s.degenerate}};
}

EnsembleOptions ensemble_options(const RunConfig& cfg) {
  return {cfg.n_realizations, cfg.master_seed, cfg.workers};
}

void warn_regime(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.chain().in_bipartite_regime()) {
    log << "warning: block length " << cfg.block_len << " and chain length " << cfg.n_sites
        << " are outside the 1 << L << N regime\n";
  }
}

RunReport finish(const RunConfig& cfg, const CsvTable& table, json summary, std::ostream& log) {
  const std::filesystem::path out = cfg.output_path;
  write_file_atomic(out, table.render(metadata(cfg, "main", summary)));
  log << "wrote " << out.string() << " (" << table.n_rows() << " rows)\n";
  return {{out}, std::move(summary), true};
}

RunReport entropy_scan(const RunConfig& cfg, std::ostream& log) {
  log << "entropy-scan: " << family_name(cfg.disorder.family()) << " delta=" << cfg.disorder.delta()
      << " N=" << cfg.n_sites << " lengths=" << cfg.l_grid.size()
      << " realizations=" << cfg.n_realizations << "\n";
  const auto points = entropy_vs_length(cfg.disorder, cfg.n_sites, cfg.l_grid, cfg.fermi_energy,
                                        cfg.alpha, ensemble_options(cfg));
  CsvTable table({"block_len", "n_realizations", "mean", "variance", "coeff_variation",
                  "stderr_mean", "stderr_cv"});
  for (const auto& p : points) {
    table.add_row({num(p.block_len), num(p.stats.n_realizations), num(p.stats.mean),
                   num(p.stats.variance), num(p.stats.coeff_variation), num(p.stats.stderr_mean),
                   num(p.stats.stderr_cv)});
  }
  return finish(cfg, table, json::object(), log);
}

RunReport density(const RunConfig& cfg, std::ostream& log) {
  if (cfg.n_realizations < kMinDensitySamples) {
    throw Error(ErrorKind::TooFewSamples,
                "density needs at least " + std::to_string(kMinDensitySamples) +
                    " realizations, got " + std::to_string(cfg.n_realizations));
  }
  warn_regime(cfg, log);
  log << "density: " << family_name(cfg.disorder.family()) << " delta=" << cfg.disorder.delta()
      << " N=" << cfg.n_sites << " L=" << cfg.block_len << " alpha=" << cfg.alpha
      << " realizations=" << cfg.n_realizations << "\n";
  const auto samples = run_ensemble(cfg.disorder, cfg.chain(), cfg.alpha, ensemble_options(cfg));
  const auto values = entropies(samples);
  const std::size_t bins = cfg.n_bins > 0 ? cfg.n_bins : default_bin_count(values.size());
  const auto [est, fit] = density_estimate(values, bins);
  const EnsembleStats stats = statistics(values);

  const json summary{{"stats", stats_json(stats)},
                     {"gaussian", {{"mu", fit.mu}, {"sigma", fit.sigma}, {"fit_error", fit.fit_error}}},
                     {"n_bins", bins}};

  CsvTable sample_table({"realization_index", "seed", "entropy"});
  for (const auto& s : samples) sample_table.add_row({num(s.index), num(s.seed), num(s.entropy)});
  const auto sample_file = samples_path(cfg.output_path);
  write_file_atomic(sample_file, sample_table.render(metadata(cfg, "samples", summary)));

  CsvTable table({"bin_lo", "bin_hi", "bin_center", "density", "gaussian"});
  const double norm = 1.0 / (fit.sigma * std::sqrt(2.0 * M_PI));
  for (std::size_t i = 0; i < est.density.size(); ++i) {
    const double z = (est.bin_center(i) - fit.mu) / fit.sigma;
    table.add_row({num(est.bin_edges[i]), num(est.bin_edges[i + 1]), num(est.bin_center(i)),
                   num(est.density[i]), num(norm * std::exp(-0.5 * z * z))});
  }
  log << "mean=" << stats.mean << " C_V=" << stats.coeff_variation
      << " gaussian fit error=" << fit.fit_error << "\n";
  RunReport report = finish(cfg, table, summary, log);
  report.files.push_back(sample_file);
  return report;
}

RunReport lyapunov(const RunConfig& cfg, std::ostream& log) {
  struct Job {
    Family family;
    double delta;
    std::size_t energy_index;
  };
  std::vector<Job> jobs;
  for (Family f : cfg.families) {
    for (double d : cfg.deltas) {
      for (std::size_t i = 0; i < cfg.e_grid.size(); ++i) jobs.push_back({f, d, i});
    }
  }
  log << "lyapunov: " << jobs.size() << " points, " << cfg.lyapunov_steps << " steps each\n";

  LyapunovOptions options;
  options.n_steps = cfg.lyapunov_steps;
  options.n_batches = cfg.lyapunov_batches;
  std::vector<LyapunovResult> results(jobs.size());
  // Energy i uses stream i for every (family, delta), so rows of one energy
  // see the same uniforms.
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t j) {
    Rng rng(derive_seed(cfg.master_seed, jobs[j].energy_index));
    results[j] = lyapunov_exponent(DisorderSpec(jobs[j].family, jobs[j].delta),
                                   cfg.e_grid[jobs[j].energy_index], options, rng);
  });

  CsvTable table(
      {"family", "delta", "energy", "gamma", "gamma_stderr", "radius", "n_steps", "seed"});
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& r = results[j];
    table.add_row({std::string(family_name(jobs[j].family)), num(jobs[j].delta), num(r.energy),
                   num(r.gamma), num(r.std_error), num(r.radius), num(r.n_steps),
                   num(derive_seed(cfg.master_seed, jobs[j].energy_index))});
  }
  return finish(cfg, table, json::object(), log);
}

RunReport bound_curve(const RunConfig& cfg, std::ostream& log) {
  // Rejects the uniform family before any ensemble work.
  fisher_gap(cfg.disorder, cfg.t_grid.front());
  warn_regime(cfg, log);
  log << "bound-curve: " << family_name(cfg.disorder.family()) << " delta=" << cfg.disorder.delta()
      << " N=" << cfg.n_sites << " L=" << cfg.block_len << " shifts=" << cfg.t_grid.size()
      << " realizations=" << cfg.n_realizations << "\n";
  const BoundCurve curve =
      cv_lower_curve(cfg.disorder, cfg.chain(), cfg.t_grid, ensemble_options(cfg));

  const double half_mean = 0.5 * curve.unshifted.mean;
  const double gap_at_max = fisher_gap(cfg.disorder, curve.argmax_t).value;
  const json summary{{"unshifted", stats_json(curve.unshifted)},
                     {"measured_cv", curve.measured_cv},
                     {"measured_cv_stderr", curve.measured_cv_stderr},
                     {"argmax_t", curve.argmax_t},
                     {"max_ratio", curve.max_ratio},
                     {"max_ratio_stderr", curve.max_ratio_stderr},
                     {"violations", curve.violations},
                     {"variance_floor", half_mean * half_mean / gap_at_max}};

  CsvTable table({"t", "gap", "mean_shifted", "cv_lower", "cv_lower_stderr", "measured_cv",
                  "measured_cv_stderr"});
  for (std::size_t j = 0; j < curve.t_grid.size(); ++j) {
    table.add_row({num(curve.t_grid[j]), num(curve.gap[j]), num(curve.mean_shifted[j]),
                   num(curve.cv_lower[j]), num(curve.cv_lower_stderr[j]), num(curve.measured_cv),
                   num(curve.measured_cv_stderr)});
  }
  log << "measured C_V=" << curve.measured_cv << " max C_V(t)/C_V=" << curve.max_ratio
      << " at t=" << curve.argmax_t << "\n";
  if (curve.violations > 0) {
    log << "warning: bound exceeds measured C_V + 2 stderr at " << curve.violations
        << " grid point(s)\n";
  }
  return finish(cfg, table, summary, log);
}

RunReport factorization(const RunConfig& cfg, std::ostream& log) {
  log << "factorization: " << family_name(cfg.disorder.family()) << " delta=" << cfg.disorder.delta()
      << " N=" << cfg.n_sites << " L=" << cfg.block_len
      << " realizations=" << cfg.n_realizations << "\n";
  const FactorizationResult r = variance_factorization_check(
      cfg.disorder, cfg.n_sites, cfg.block_len, cfg.fermi_energy, ensemble_options(cfg));
  if (r.status == FactorizationStatus::SkippedWeakLocalization) {
    log << "warning: localization radius " << r.localization_radius
        << " is too large for this geometry; check skipped\n";
  } else if (r.status == FactorizationStatus::Undefined) {
    log << "warning: single-cut variance is zero; ratio undefined\n";
  }
  CsvTable table({"var_block", "var_single_cut", "ratio", "status", "localization_radius"});
  table.add_row({num(r.var_block), num(r.var_single_cut), num(r.ratio),
                 std::string(to_string(r.status)), num(r.localization_radius)});
  return finish(cfg, table, json::object(), log);
}

RunReport hcr_selftest(const RunConfig& cfg, std::ostream& log) {
  const ScalarHcrCheck c = scalar_hcr_check(cfg.disorder, cfg.hcr_t, cfg.hcr_draws, cfg.master_seed);
  CsvTable table({"n_draws", "t", "gap", "mean_phi", "mean_phi_shifted", "bound", "variance",
                  "variance_stderr", "exact_bound", "exact_variance", "margin_sigmas"});
  table.add_row({num(c.n_draws), num(c.t), num(c.gap), num(c.mean_phi), num(c.mean_phi_shifted),
                 num(c.bound), num(c.variance), num(c.variance_stderr), num(c.exact_bound),
                 num(c.exact_variance), num(c.margin_sigmas)});
  const bool ok = c.margin_sigmas > 3.0;
  log << "hcr-selftest: Var=" << c.variance << " bound=" << c.bound << " margin=" << c.margin_sigmas
      << " stderr -> " << (ok ? "PASS" : "FAIL") << "\n";
  RunReport report = finish(cfg, table, json{{"passed", ok}}, log);
  report.passed = ok;
  return report;
}

}  // namespace

std::filesystem::path samples_path(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p.replace_extension();
  p += ".samples.csv";
  return p;
}

RunReport execute(const RunConfig& cfg, std::ostream& log) {
  switch (cfg.command) {
    case Command::EntropyScan: return entropy_scan(cfg, log);
    case Command::Density: return density(cfg, log);
    case Command::Lyapunov: return lyapunov(cfg, log);
    case Command::BoundCurve: return bound_curve(cfg, log);
    case Command::Factorization: return factorization(cfg, log);
    case Command::HcrSelftest: return hcr_selftest(cfg, log);
  }
  throw Error(ErrorKind::ValidationError, "unhandled command");
}

int run(const RunConfig& cfg, std::ostream& log) {
  try {
    return execute(cfg, log).passed ? 0 : 3;
  } catch (const std::exception& e) {
    log << "error: " << command_name(cfg.command) << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace eefluct
