#include "eefluct/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "eefluct/error.hpp"
#include "eefluct/lyapunov.hpp"
#include "eefluct/parallel.hpp"

namespace eefluct {

namespace {

void check_options(const EnsembleOptions& options) {
  if (options.n_realizations < 2) {
    throw Error(ErrorKind::ValidationError, "an ensemble needs at least two realizations");
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorKind::InvalidAlpha, "Renyi index must be positive, got " + std::to_string(alpha));
  }
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  Eigen::Map<Eigen::VectorXd>(out.data(), m.rows()) = m.col(j);
  return out;
}

}  // namespace

std::vector<double> realization_potential(const PotentialLaw& law, std::size_t n_sites,
                                          std::uint64_t master_seed, std::size_t index) {
  Rng rng(derive_seed(master_seed, index));
  return sample_potential(law, n_sites, rng);
}

std::vector<EntropySample> run_ensemble(const PotentialLaw& law, const ChainConfig& cfg,
                                        double alpha, const EnsembleOptions& options) {
  check_options(options);
  check_alpha(alpha);
  cfg.validate();
  std::vector<EntropySample> out(options.n_realizations);
  parallel_for(options.n_realizations, options.workers, [&](std::size_t k) {
    const auto potential = realization_potential(law, cfg.n_sites, options.master_seed, k);
    out[k] = {k, derive_seed(options.master_seed, k), block_entropy(potential, cfg, alpha)};
  });
  return out;
}

std::vector<double> entropies(std::span<const EntropySample> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.entropy);
  return out;
}

Eigen::MatrixXd entropy_vs_length_samples(const PotentialLaw& law, std::size_t n_sites,
                                          std::span<const std::size_t> lengths, double fermi_energy,
                                          double alpha, const EnsembleOptions& options) {
  check_options(options);
  check_alpha(alpha);
  if (lengths.empty()) throw Error(ErrorKind::ValidationError, "block length grid is empty");
  std::vector<Block> blocks;
  for (std::size_t len : lengths) blocks.push_back(centered_block(n_sites, len));
  ChainConfig::centered(n_sites, lengths.front(), fermi_energy).validate();

  Eigen::MatrixXd out(static_cast<Eigen::Index>(options.n_realizations),
                      static_cast<Eigen::Index>(blocks.size()));
  parallel_for(options.n_realizations, options.workers, [&](std::size_t k) {
    const auto potential = realization_potential(law, n_sites, options.master_seed, k);
    const Eigenpairs eig = eigendecompose(build_operator(potential), fermi_energy);
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          renyi_entropy(occupation_spectrum(eig, fermi_energy, blocks[j]), alpha);
    }
  });
  return out;
}

std::vector<LengthPoint> entropy_vs_length(const PotentialLaw& law, std::size_t n_sites,
                                           std::span<const std::size_t> lengths,
                                           double fermi_energy, double alpha,
                                           const EnsembleOptions& options) {
  const Eigen::MatrixXd samples =
      entropy_vs_length_samples(law, n_sites, lengths, fermi_energy, alpha, options);
  std::vector<LengthPoint> out;
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    out.push_back({lengths[j], statistics(column(samples, static_cast<Eigen::Index>(j)))});
  }
  return out;
}

Eigen::MatrixXd shift_scan_samples(const PotentialLaw& law, const ChainConfig& cfg,
                                   std::span<const double> shifts, double alpha,
                                   const EnsembleOptions& options) {
  check_options(options);
  check_alpha(alpha);
  cfg.validate();
  for (double t : shifts) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw Error(ErrorKind::ValidationError, "shifts must be finite and nonnegative");
    }
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(options.n_realizations),
                      static_cast<Eigen::Index>(shifts.size()));
  parallel_for(options.n_realizations, options.workers, [&](std::size_t k) {
    const auto potential = realization_potential(law, cfg.n_sites, options.master_seed, k);
    ChainConfig shifted = cfg;
    for (std::size_t j = 0; j < shifts.size(); ++j) {
      shifted.shift_t = shifts[j];
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          block_entropy(potential, shifted, alpha);
    }
  });
  return out;
}

EnsembleStats shifted_mean_entropy(const PotentialLaw& law, const ChainConfig& cfg, double t,
                                   const EnsembleOptions& options) {
  const double shifts[] = {t};
  return statistics(column(shift_scan_samples(law, cfg, shifts, 1.0, options), 0));
}

EnsembleStats decoupled_mean_entropy(const PotentialLaw& law, const ChainConfig& cfg,
                                     const EnsembleOptions& options) {
  check_options(options);
  cfg.validate();
  const std::size_t removed = cfg.effective_shift_site();
  const std::size_t n = cfg.n_sites;
  if (n < 2) throw Error(ErrorKind::ValidationError, "cannot delete a site from a one-site chain");

  std::vector<std::size_t> sites;
  for (std::size_t x = cfg.block.start; x < cfg.block.end(); ++x) {
    if (x != removed) sites.push_back(x > removed ? x - 1 : x);
  }

  std::vector<double> values(options.n_realizations);
  parallel_for(options.n_realizations, options.workers, [&](std::size_t k) {
    auto potential = realization_potential(law, n, options.master_seed, k);
    potential.erase(potential.begin() + static_cast<std::ptrdiff_t>(removed));
    Operator1D op = build_operator(potential);
    // The chain splits at the deleted site.
    if (removed > 0 && removed < n - 1) op.off_diagonal[removed - 1] = 0.0;
    const Eigenpairs eig = eigendecompose(op, cfg.fermi_energy);
    values[k] = von_neumann_entropy(occupation_spectrum(eig, cfg.fermi_energy, sites));
  });
  return statistics(values);
}

std::vector<double> default_t_grid(double delta, std::size_t n_points) {
  if (n_points < 2) throw Error(ErrorKind::ValidationError, "t grid needs at least two points");
  std::vector<double> grid(n_points);
  const double lo = std::log(0.05 * delta);
  const double hi = std::log(50.0 * delta);
  for (std::size_t i = 0; i < n_points; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1));
  }
  return grid;
}

BoundCurve cv_lower_curve(const DisorderSpec& spec, const ChainConfig& cfg,
                          std::span<const double> t_grid, const EnsembleOptions& options) {
  if (t_grid.empty()) throw Error(ErrorKind::ValidationError, "t grid is empty");
  check_options(options);
  if (options.n_realizations < 3) {
    throw Error(ErrorKind::ValidationError, "bound curve needs at least three realizations");
  }

  BoundCurve curve;
  curve.t_grid.assign(t_grid.begin(), t_grid.end());
  for (double t : t_grid) {
    if (!(t > 0.0)) throw Error(ErrorKind::ValidationError, "t grid values must be positive");
    curve.gap.push_back(fisher_gap(spec, t).value);
  }

  ChainConfig base = cfg;
  base.shift_t = 0.0;
  std::vector<double> shifts{0.0};
  shifts.insert(shifts.end(), t_grid.begin(), t_grid.end());
  const Eigen::MatrixXd samples = shift_scan_samples(spec, base, shifts, 1.0, options);

  const std::vector<double> plain = column(samples, 0);
  curve.unshifted = statistics(plain);
  curve.measured_cv = curve.unshifted.coeff_variation;
  curve.measured_cv_stderr = curve.unshifted.stderr_cv;

  const std::size_t n = options.n_realizations;
  const auto nd = static_cast<double>(n);
  const std::size_t n_t = t_grid.size();
  const Eigen::VectorXd sums = samples.colwise().sum();
  const std::vector<double> cv_reps = leave_one_out_cv(plain);

  // lower_reps(i, j): C_V(t_j) with realization i left out.
  Eigen::MatrixXd lower_reps(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_t));
  for (std::size_t j = 0; j < n_t; ++j) {
    const auto col = static_cast<Eigen::Index>(j + 1);
    const double scale = std::numbers::sqrt2 / std::sqrt(curve.gap[j]);
    curve.mean_shifted.push_back(sums[col] / nd);
    curve.cv_lower.push_back(scale * std::abs(1.0 - sums[col] / sums[0]));
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double ratio = (sums[col] - samples(row, col)) / (sums[0] - samples(row, 0));
      lower_reps(row, static_cast<Eigen::Index>(j)) = scale * std::abs(1.0 - ratio);
    }
    curve.cv_lower_stderr.push_back(jackknife_stderr(
        std::vector<double>(lower_reps.col(static_cast<Eigen::Index>(j)).data(),
                            lower_reps.col(static_cast<Eigen::Index>(j)).data() + n)));
    if (curve.cv_lower[j] > curve.measured_cv + 2.0 * curve.measured_cv_stderr) ++curve.violations;
  }

  const auto best = std::max_element(curve.cv_lower.begin(), curve.cv_lower.end());
  curve.argmax_t = curve.t_grid[static_cast<std::size_t>(best - curve.cv_lower.begin())];
  curve.max_ratio = *best / curve.measured_cv;

  std::vector<double> ratio_reps(n);
  for (std::size_t i = 0; i < n; ++i) {
    ratio_reps[i] = lower_reps.row(static_cast<Eigen::Index>(i)).maxCoeff() / cv_reps[i];
  }
  curve.max_ratio_stderr = jackknife_stderr(ratio_reps);
  return curve;
}

std::string_view to_string(FactorizationStatus status) noexcept {
  switch (status) {
    case FactorizationStatus::Ok: return "ok";
    case FactorizationStatus::Undefined: return "undefined";
    case FactorizationStatus::SkippedWeakLocalization: return "skipped-weak-localization";
  }
  return "unknown";
}

FactorizationResult variance_factorization_check(const PotentialLaw& law, std::size_t n_sites,
                                                 std::size_t block_len, double fermi_energy,
                                                 const EnsembleOptions& options) {
  check_options(options);
  const ChainConfig cfg = ChainConfig::centered(n_sites, block_len, fermi_energy);
  cfg.validate();
  if (n_sites < 2) throw Error(ErrorKind::ValidationError, "chain needs at least two sites");
  const Block half{0, n_sites / 2};

  FactorizationResult out;
  out.ratio = std::numeric_limits<double>::quiet_NaN();
  out.localization_radius = std::numeric_limits<double>::infinity();
  if (law) {
    // A stream index no realization uses.
    Rng rng(derive_seed(options.master_seed, std::numeric_limits<std::uint64_t>::max()));
    LyapunovOptions lyap;
    lyap.n_steps = 1'000'000;
    out.localization_radius = lyapunov_exponent(law, fermi_energy, lyap, rng).radius;
    const double margin = static_cast<double>(std::min(block_len, n_sites - block_len));
    if (10.0 * out.localization_radius > margin) {
      out.status = FactorizationStatus::SkippedWeakLocalization;
      out.var_block = out.var_single_cut = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
  }

  std::vector<double> s_block(options.n_realizations);
  std::vector<double> s_half(options.n_realizations);
  parallel_for(options.n_realizations, options.workers, [&](std::size_t k) {
    const auto potential = realization_potential(law, n_sites, options.master_seed, k);
    const Eigenpairs eig = eigendecompose(build_operator(potential), fermi_energy);
    s_block[k] = von_neumann_entropy(occupation_spectrum(eig, fermi_energy, cfg.block));
    s_half[k] = von_neumann_entropy(occupation_spectrum(eig, fermi_energy, half));
  });

  out.var_block = statistics(s_block).variance;
  out.var_single_cut = statistics(s_half).variance;
  if (out.var_single_cut > 0.0) {
    out.ratio = out.var_block / out.var_single_cut;
  } else {
    out.status = FactorizationStatus::Undefined;
  }
  return out;
}

}  // namespace eefluct
