#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace eefluct {

/// Sample moments of an ensemble. Standard errors are leave-one-out
/// jackknife estimates.
struct EnsembleStats {
  std::size_t n_realizations = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  double coeff_variation = 0.0;
  double stderr_mean = 0.0;
  double stderr_cv = 0.0;
  double stderr_variance = 0.0;
  /// All samples equal: variance, C_V and both standard errors are 0.
  bool degenerate = false;
};

/// Throws TooFewSamples for fewer than two samples. With exactly two samples
/// the jackknife errors of C_V and of the variance are NaN.
EnsembleStats statistics(std::span<const double> samples);

/// Leave-one-out coefficients of variation, O(n) overall. Requires n >= 3.
std::vector<double> leave_one_out_cv(std::span<const double> samples);

/// Leave-one-out replicates of `estimator` over `samples`.
template <typename Estimator>
std::vector<double> jackknife_replicates(std::span<const double> samples, Estimator&& estimator) {
  std::vector<double> rest;
  std::vector<double> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    rest.assign(samples.begin(), samples.end());
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(estimator(std::span<const double>(rest)));
  }
  return out;
}

/// sqrt((n - 1) / n * sum (theta_i - mean theta)^2)
double jackknife_stderr(std::span<const double> replicates);

/// Equal-width histogram normalized to unit area.
struct DensityEstimate {
  std::vector<double> bin_edges;
  std::vector<double> density;
  std::size_t n_samples = 0;

  double bin_width() const { return bin_edges.size() > 1 ? bin_edges[1] - bin_edges[0] : 0.0; }
  double bin_center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
};

/// Normal density with mean and standard deviation pinned to the sample
/// moments. fit_error = max_i |density_i - N(center_i)| / max_i density_i.
struct GaussianFit {
  double mu = 0.0;
  double sigma = 0.0;
  double fit_error = 0.0;
};

inline constexpr std::size_t kMinDensitySamples = 50;

/// 40 bins at 2000 samples, scaled as n^(1/3), never fewer than 5.
std::size_t default_bin_count(std::size_t n_samples);

/// Histogram on [min, max] with `n_bins` bins and its moment-pinned Gaussian.
/// Throws TooFewSamples below kMinDensitySamples and DegenerateSample when all
/// samples are equal.
std::pair<DensityEstimate, GaussianFit> density_estimate(std::span<const double> samples,
                                                         std::size_t n_bins);

}  // namespace eefluct
