#include "eefluct/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "eefluct/error.hpp"

namespace eefluct {

double jackknife_stderr(std::span<const double> replicates) {
  const auto n = static_cast<double>(replicates.size());
  if (replicates.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double r : replicates) mean += r;
  mean /= n;
  double ss = 0.0;
  for (double r : replicates) ss += (r - mean) * (r - mean);
  return std::sqrt((n - 1.0) / n * ss);
}

std::vector<double> leave_one_out_cv(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 3) throw Error(ErrorKind::TooFewSamples, "leave-one-out C_V needs at least three samples");
  long double sum = 0.0L;
  for (double x : samples) sum += x;
  const auto nd = static_cast<long double>(n);
  const double mean = static_cast<double>(sum / nd);
  long double s1 = 0.0L;
  long double s2 = 0.0L;
  for (double x : samples) {
    const long double d = x - mean;
    s1 += d;
    s2 += d * d;
  }
  std::vector<double> reps(n);
  const long double m = nd - 1.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = samples[i] - mean;
    const long double r1 = s1 - d;
    const long double r2 = s2 - d * d;
    const double var_i = static_cast<double>((r2 - r1 * r1 / m) / (m - 1.0L));
    reps[i] = std::sqrt(std::max(var_i, 0.0)) / (mean + static_cast<double>(r1 / m));
  }
  return reps;
}

EnsembleStats statistics(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorKind::TooFewSamples, "statistics need at least two samples");

  EnsembleStats out;
  out.n_realizations = n;
  const auto nd = static_cast<double>(n);

  long double sum = 0.0L;
  for (double x : samples) sum += x;
  out.mean = static_cast<double>(sum / nd);

  if (std::all_of(samples.begin(), samples.end(), [&](double x) { return x == samples.front(); })) {
    out.mean = samples.front();
    out.degenerate = true;
    return out;
  }

  // Centered sums; leave-one-out moments follow in O(1) per sample.
  long double s1 = 0.0L;
  long double s2 = 0.0L;
  for (double x : samples) {
    const long double d = x - out.mean;
    s1 += d;
    s2 += d * d;
  }
  out.variance = static_cast<double>((s2 - s1 * s1 / nd) / (nd - 1.0));
  out.coeff_variation = std::sqrt(out.variance) / out.mean;
  out.stderr_mean = std::sqrt(out.variance / nd);

  if (n == 2) {
    out.stderr_cv = std::numeric_limits<double>::quiet_NaN();
    out.stderr_variance = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  std::vector<double> var_reps(n);
  const long double m = nd - 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = samples[i] - out.mean;
    const long double r1 = s1 - d;
    const long double r2 = s2 - d * d;
    var_reps[i] = static_cast<double>((r2 - r1 * r1 / m) / (m - 1.0));
  }
  const std::vector<double> cv_reps = leave_one_out_cv(samples);
  out.stderr_cv = jackknife_stderr(cv_reps);
  out.stderr_variance = jackknife_stderr(var_reps);
  return out;
}

std::size_t default_bin_count(std::size_t n_samples) {
  const double scaled = 40.0 * std::cbrt(static_cast<double>(n_samples) / 2000.0);
  return std::max<std::size_t>(5, static_cast<std::size_t>(std::lround(scaled)));
}

std::pair<DensityEstimate, GaussianFit> density_estimate(std::span<const double> samples,
                                                         std::size_t n_bins) {
  if (samples.size() < kMinDensitySamples) {
    throw Error(ErrorKind::TooFewSamples, "density estimate needs at least " +
                                              std::to_string(kMinDensitySamples) + " samples, got " +
                                              std::to_string(samples.size()));
  }
  if (n_bins == 0) throw Error(ErrorKind::ValidationError, "n_bins must be positive");
  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *min_it;
  const double hi = *max_it;
  if (!(hi > lo)) throw Error(ErrorKind::DegenerateSample, "all samples are equal");

  DensityEstimate est;
  est.n_samples = samples.size();
  const double width = (hi - lo) / static_cast<double>(n_bins);
  est.bin_edges.resize(n_bins + 1);
  for (std::size_t i = 0; i < n_bins; ++i) est.bin_edges[i] = lo + static_cast<double>(i) * width;
  est.bin_edges[n_bins] = hi;

  std::vector<std::size_t> counts(n_bins, 0);
  for (double x : samples) {
    auto bin = static_cast<std::size_t>((x - lo) / width);
    ++counts[std::min(bin, n_bins - 1)];
  }
  est.density.resize(n_bins);
  const double scale = 1.0 / (static_cast<double>(samples.size()) * width);
  for (std::size_t i = 0; i < n_bins; ++i) est.density[i] = static_cast<double>(counts[i]) * scale;

  const EnsembleStats stats = statistics(samples);
  GaussianFit fit;
  fit.mu = stats.mean;
  fit.sigma = std::sqrt(stats.variance);
  const double peak = *std::max_element(est.density.begin(), est.density.end());
  const double norm = 1.0 / (fit.sigma * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < n_bins; ++i) {
    const double z = (est.bin_center(i) - fit.mu) / fit.sigma;
    const double gauss = norm * std::exp(-0.5 * z * z);
    fit.fit_error = std::max(fit.fit_error, std::abs(est.density[i] - gauss) / peak);
  }
  return {std::move(est), fit};
}

}  // namespace eefluct
