#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "eefluct/disorder.hpp"
#include "eefluct/rng.hpp"

namespace eefluct {

/// psi(x+1) = (v + 2 - E) psi(x) - psi(x-1). Returns (psi_next, psi_curr).
constexpr std::pair<double, double> transfer_step(double psi_curr, double psi_prev, double v,
                                                  double energy) noexcept {
  return {(v + 2.0 - energy) * psi_curr - psi_prev, psi_curr};
}

struct LyapunovResult {
  double energy = 0.0;
  double gamma = 0.0;       ///< per site, clamped at 0
  double radius = 0.0;      ///< 1 / gamma, infinity when gamma == 0
  double std_error = 0.0;   ///< batch-means estimate
  std::int64_t n_steps = 0;
};

struct LyapunovOptions {
  std::int64_t n_steps = 1'000'000;
  int n_batches = 100;
  /// Steps between renormalizations of the transfer vector.
  int renormalize_every = 1;
};

inline constexpr std::int64_t kMinLyapunovSteps = 100'000;

/// Lyapunov exponent of the transfer-matrix product at `energy`. Throws
/// ValidationError if n_steps < kMinLyapunovSteps.
LyapunovResult lyapunov_exponent(const PotentialLaw& law, double energy,
                                 const LyapunovOptions& options, Rng& rng);

/// One result per energy. Energy i uses the stream derive_seed(seed, i), so
/// the output does not depend on `workers`.
std::vector<LyapunovResult> radius_curve(const PotentialLaw& law, std::span<const double> energies,
                                         const LyapunovOptions& options, std::uint64_t seed,
                                         int workers = 1);

}  // namespace eefluct
