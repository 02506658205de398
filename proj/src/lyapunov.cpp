#include "eefluct/lyapunov.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "eefluct/error.hpp"
#include "eefluct/parallel.hpp"

namespace eefluct {

namespace {

// Neumaier summation in extended precision.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

}  // namespace

LyapunovResult lyapunov_exponent(const PotentialLaw& law, double energy,
                                 const LyapunovOptions& options, Rng& rng) {
  if (options.n_steps < kMinLyapunovSteps) {
    throw Error(ErrorKind::ValidationError, "lyapunov n_steps must be at least " +
                                                std::to_string(kMinLyapunovSteps));
  }
  if (options.n_batches < 2 || options.n_batches > options.n_steps) {
    throw Error(ErrorKind::ValidationError, "lyapunov n_batches must be in [2, n_steps]");
  }
  if (options.renormalize_every < 1) {
    throw Error(ErrorKind::ValidationError, "renormalize_every must be at least 1");
  }

  const std::int64_t n_batches = options.n_batches;
  const std::int64_t batch_len = options.n_steps / n_batches;
  const int every = options.renormalize_every;

  double psi = 1.0;
  double psi_prev = 0.0;
  CompensatedSum total;
  CompensatedSum batch_sum;
  CompensatedSum batch_sq;

  for (std::int64_t b = 0; b < n_batches; ++b) {
    const std::int64_t len = b + 1 == n_batches ? options.n_steps - b * batch_len : batch_len;
    CompensatedSum log_growth;
    for (std::int64_t s = 0; s < len; ++s) {
      std::tie(psi, psi_prev) = transfer_step(psi, psi_prev, sample(law, rng), energy);
      if ((s + 1) % every == 0 || s + 1 == len) {
        const double norm = std::sqrt(psi * psi + psi_prev * psi_prev);
        psi /= norm;
        psi_prev /= norm;
        log_growth.add(std::log(norm));
      }
    }
    const long double g = log_growth.value();
    total.add(g);
    const long double rate = g / static_cast<long double>(len);
    batch_sum.add(rate);
    batch_sq.add(rate * rate);
  }

  LyapunovResult out;
  out.energy = energy;
  out.n_steps = options.n_steps;
  const double raw = static_cast<double>(total.value() / static_cast<long double>(options.n_steps));
  out.gamma = std::max(raw, 0.0);
  out.radius = out.gamma > 0.0 ? 1.0 / out.gamma : std::numeric_limits<double>::infinity();

  const auto nb = static_cast<long double>(n_batches);
  const long double mean = batch_sum.value() / nb;
  const long double var = std::max(0.0L, (batch_sq.value() - nb * mean * mean) / (nb - 1.0L));
  out.std_error = static_cast<double>(std::sqrt(var / nb));
  return out;
}

std::vector<LyapunovResult> radius_curve(const PotentialLaw& law, std::span<const double> energies,
                                         const LyapunovOptions& options, std::uint64_t seed,
                                         int workers) {
  if (energies.empty()) throw Error(ErrorKind::ValidationError, "energy grid is empty");
  std::vector<LyapunovResult> out(energies.size());
  parallel_for(energies.size(), workers, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    out[i] = lyapunov_exponent(law, energies[i], options, rng);
  });
  return out;
}

}  // namespace eefluct
