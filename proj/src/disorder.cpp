#include "eefluct/disorder.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "eefluct/error.hpp"
#include "eefluct/statistics.hpp"

namespace eefluct {

namespace {

using std::numbers::pi;

constexpr double kGapRelTolerance = 1e-10;

}  // namespace

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::Uniform: return "uniform";
    case Family::Exponential: return "exponential";
    case Family::HalfCauchy: return "half-cauchy";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "uniform") return Family::Uniform;
  if (name == "exponential") return Family::Exponential;
  if (name == "half-cauchy") return Family::HalfCauchy;
  throw Error(ErrorKind::ValidationError,
              "unknown disorder family '" + std::string(name) +
                  "' (expected uniform, exponential or half-cauchy)");
}

DisorderSpec::DisorderSpec(Family family, double delta) : family_(family), delta_(delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::ValidationError,
                "disorder parameter delta must be positive and finite, got " + std::to_string(delta));
  }
}

double pdf(const DisorderSpec& spec, double v) {
  const double d = spec.delta();
  if (v < 0.0) return 0.0;
  switch (spec.family()) {
    case Family::Uniform: return v <= d ? 1.0 / d : 0.0;
    case Family::Exponential: return std::exp(-v / d) / d;
    case Family::HalfCauchy: return 2.0 * d / (pi * (v * v + d * d));
  }
  return 0.0;
}

double survival(const DisorderSpec& spec, double v) {
  const double d = spec.delta();
  if (v <= 0.0) return 1.0;
  switch (spec.family()) {
    case Family::Uniform: return v >= d ? 0.0 : 1.0 - v / d;
    case Family::Exponential: return std::exp(-v / d);
    // 1 - (2/pi) atan(v/d), written to keep precision in the tail.
    case Family::HalfCauchy: return 2.0 / pi * std::atan2(d, v);
  }
  return 0.0;
}

double quantile(const DisorderSpec& spec, double u) {
  const double d = spec.delta();
  switch (spec.family()) {
    case Family::Uniform: return d * u;
    case Family::Exponential: return -d * std::log1p(-u);
    case Family::HalfCauchy: return d * std::tan(0.5 * pi * u);
  }
  return 0.0;
}

double fractional_moment(const DisorderSpec& spec, double kappa) {
  auto integrand = [&](double v) { return std::pow(v, kappa) * pdf(spec, v); };
  double error = 0.0;
  double value = 0.0;
  if (spec.family() == Family::Uniform) {
    value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, spec.delta(),
                                                                         15, 1e-12, &error);
  } else {
    boost::math::quadrature::exp_sinh<double> integrator;
    double l1 = 0.0;
    std::size_t levels = 0;
    try {
      value = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-12,
                                   &error, &l1, &levels);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::QuadratureDivergence,
                  std::string("fractional moment did not converge: ") + e.what());
    }
  }
  if (!std::isfinite(value) || error > 1e-8 * std::max(1.0, std::abs(value))) {
    throw Error(ErrorKind::QuadratureDivergence,
                "fractional moment of order " + std::to_string(kappa) + " did not converge");
  }
  return value;
}

FisherGap fisher_gap(const DisorderSpec& spec, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::ValidationError, "shift t must be nonnegative");
  const double d = spec.delta();
  FisherGap gap{t, 0.0, GapMethod::ClosedForm};
  switch (spec.family()) {
    case Family::Uniform:
      if (t > 0.0) {
        throw Error(ErrorKind::UnsupportedFamily,
                    "F(t) is infinite for the uniform family at t > 0 (compact support)");
      }
      break;
    case Family::Exponential: gap.value = std::expm1(t / d); break;
    case Family::HalfCauchy: gap.value = 2.0 * t / (pi * d) + t * t / (2.0 * d * d); break;
  }
  return gap;
}

FisherGap fisher_gap_quadrature(const DisorderSpec& spec, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::ValidationError, "shift t must be nonnegative");
  if (spec.family() == Family::Uniform && t > 0.0) {
    throw Error(ErrorKind::UnsupportedFamily,
                "F(t) is infinite for the uniform family at t > 0 (compact support)");
  }
  if (t == 0.0) return {0.0, 0.0, GapMethod::Quadrature};

  // J(t) = int_0^inf f(u)^2 / f(u + t) du; the integrand decays like f(u),
  // so [0, 50 delta] carries almost everything and the rest is mapped.
  auto integrand = [&](double u) {
    const double fu = pdf(spec, u);
    return fu == 0.0 ? 0.0 : fu * fu / pdf(spec, u + t);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double split = 50.0 * spec.delta();
  double err_head = 0.0;
  double err_tail = 0.0;
  const double head = GK::integrate(integrand, 0.0, split, 20, 1e-13, &err_head);
  const double tail =
      GK::integrate(integrand, split, std::numeric_limits<double>::infinity(), 20, 1e-13, &err_tail);
  const double j = head + tail;
  if (!std::isfinite(j) || err_head + err_tail > kGapRelTolerance * j) {
    throw Error(ErrorKind::QuadratureDivergence,
                "J(t) quadrature did not converge at t = " + std::to_string(t));
  }
  return {t, std::max(j - 1.0, 0.0), GapMethod::Quadrature};
}

double jensen_floor(const DisorderSpec& spec, double t) {
  const double tail = survival(spec, t);
  return tail > 0.0 ? 1.0 / tail : std::numeric_limits<double>::infinity();
}

HcrBound hcr_bound(double mean_phi, double mean_phi_shifted, const FisherGap& gap) {
  if (gap.value <= 0.0) return {0.0, true};
  const double diff = mean_phi - mean_phi_shifted;
  return {diff * diff / gap.value, false};
}

ScalarHcrCheck scalar_hcr_check(const DisorderSpec& spec, double t, std::size_t n_draws,
                                std::uint64_t seed) {
  if (n_draws < 2) throw Error(ErrorKind::TooFewSamples, "need at least two draws");
  const FisherGap gap = fisher_gap(spec, t);

  Rng rng(seed);
  std::vector<double> phi(n_draws);
  double sum_shifted = 0.0;
  const double shift_factor = std::exp(-t);
  for (auto& p : phi) {
    p = std::exp(-sample(spec, rng));
    sum_shifted += p * shift_factor;
  }

  const EnsembleStats stats = statistics(phi);
  ScalarHcrCheck out;
  out.n_draws = n_draws;
  out.t = t;
  out.gap = gap.value;
  out.mean_phi = stats.mean;
  out.mean_phi_shifted = sum_shifted / static_cast<double>(n_draws);
  out.bound = hcr_bound(out.mean_phi, out.mean_phi_shifted, gap).value;
  out.variance = stats.variance;
  out.variance_stderr = stats.stderr_variance;
  out.margin_sigmas = stats.stderr_variance > 0.0
                          ? (out.variance - out.bound) / stats.stderr_variance
                          : std::numeric_limits<double>::infinity();

  if (spec.family() == Family::Exponential) {
    const double d = spec.delta();
    const double m1 = 1.0 / (1.0 + d);
    const double m2 = 1.0 / (1.0 + 2.0 * d);
    const double diff = m1 * (1.0 - shift_factor);
    out.exact_variance = m2 - m1 * m1;
    out.exact_bound = gap.value > 0.0 ? diff * diff / gap.value : 0.0;
  } else {
    out.exact_variance = std::numeric_limits<double>::quiet_NaN();
    out.exact_bound = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace eefluct
