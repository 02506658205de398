#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eefluct/disorder.hpp"
#include "eefluct/spectral.hpp"
#include "eefluct/statistics.hpp"

namespace eefluct {

/// Realization k draws its potential from the stream
/// derive_seed(master_seed, k). Every driver below reuses those potentials,
/// so runs that differ only in block length or shift see identical disorder.
struct EnsembleOptions {
  std::size_t n_realizations = 200;
  std::uint64_t master_seed = 1;
  int workers = 1;
};

struct EntropySample {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double entropy = 0.0;
};

/// Potential of realization `index` (before any shift).
std::vector<double> realization_potential(const PotentialLaw& law, std::size_t n_sites,
                                          std::uint64_t master_seed, std::size_t index);

/// One entropy per realization, in index order. Throws ValidationError for
/// fewer than two realizations and RealizationFailure if any realization
/// fails.
std::vector<EntropySample> run_ensemble(const PotentialLaw& law, const ChainConfig& cfg,
                                        double alpha, const EnsembleOptions& options);

std::vector<double> entropies(std::span<const EntropySample> samples);

struct LengthPoint {
  std::size_t block_len = 0;
  EnsembleStats stats;
};

/// Entropy samples for centered blocks of every length in `lengths`; one
/// eigendecomposition per realization serves all lengths. Row = realization,
/// column = length.
Eigen::MatrixXd entropy_vs_length_samples(const PotentialLaw& law, std::size_t n_sites,
                                          std::span<const std::size_t> lengths, double fermi_energy,
                                          double alpha, const EnsembleOptions& options);

std::vector<LengthPoint> entropy_vs_length(const PotentialLaw& law, std::size_t n_sites,
                                           std::span<const std::size_t> lengths,
                                           double fermi_energy, double alpha,
                                           const EnsembleOptions& options);

/// Entropies with the configured shift replaced by each value in `shifts`.
/// Row = realization, column = shift.
Eigen::MatrixXd shift_scan_samples(const PotentialLaw& law, const ChainConfig& cfg,
                                   std::span<const double> shifts, double alpha,
                                   const EnsembleOptions& options);

/// Ensemble statistics of S^t, the entropy with V(shift_site) -> V + t.
EnsembleStats shifted_mean_entropy(const PotentialLaw& law, const ChainConfig& cfg, double t,
                                   const EnsembleOptions& options);

/// Mean entropy of the chain with the shifted site deleted: the block loses
/// that site and the chain splits there. This is the t -> infinity limit of
/// shifted_mean_entropy.
EnsembleStats decoupled_mean_entropy(const PotentialLaw& law, const ChainConfig& cfg,
                                     const EnsembleOptions& options);

/// 24 log-spaced points on [0.05, 50] * delta.
std::vector<double> default_t_grid(double delta, std::size_t n_points = 24);

/// C_V(t) = sqrt(2) |1 - E{S^t} / E{S}| / sqrt(F(t)) on a grid of shifts,
/// next to the measured coefficient of variation of S.
struct BoundCurve {
  std::vector<double> t_grid;
  std::vector<double> gap;            ///< F(t)
  std::vector<double> mean_shifted;   ///< E{S^t}
  std::vector<double> cv_lower;       ///< C_V(t)
  std::vector<double> cv_lower_stderr;
  EnsembleStats unshifted;
  double measured_cv = 0.0;
  double measured_cv_stderr = 0.0;
  double argmax_t = 0.0;
  double max_ratio = 0.0;  ///< max_t C_V(t) / measured C_V
  double max_ratio_stderr = 0.0;
  /// Grid points with cv_lower > measured_cv + 2 stderr_cv.
  std::size_t violations = 0;
};

/// Throws UnsupportedFamily for the uniform family and ValidationError for a
/// non-positive or empty grid.
BoundCurve cv_lower_curve(const DisorderSpec& spec, const ChainConfig& cfg,
                          std::span<const double> t_grid, const EnsembleOptions& options);

enum class FactorizationStatus { Ok, Undefined, SkippedWeakLocalization };

std::string_view to_string(FactorizationStatus status) noexcept;

/// Compares Var{S} of the centered block (two cuts) with Var{S} of the
/// half-chain block [0, N/2) (one cut); the ratio tends to 2.
struct FactorizationResult {
  double var_block = 0.0;
  double var_single_cut = 0.0;
  double ratio = 0.0;  ///< NaN unless status == Ok
  double localization_radius = 0.0;
  FactorizationStatus status = FactorizationStatus::Ok;
};

/// The check is skipped when 10 * radius(E) > min(L, N - L); radius from a
/// 10^6-step Lyapunov estimate.
FactorizationResult variance_factorization_check(const PotentialLaw& law, std::size_t n_sites,
                                                 std::size_t block_len, double fermi_energy,
                                                 const EnsembleOptions& options);

}  // namespace eefluct
