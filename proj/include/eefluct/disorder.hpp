#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "eefluct/rng.hpp"

namespace eefluct {

/// On-site distribution families. All are supported on [0, inf) (uniform on
/// [0, delta]).
enum class Family { Uniform, Exponential, HalfCauchy };

/// "uniform" | "exponential" | "half-cauchy"
std::string_view family_name(Family family) noexcept;
Family parse_family(std::string_view name);

/// A disorder family together with its scale parameter delta > 0.
class DisorderSpec {
 public:
  DisorderSpec(Family family, double delta);

  Family family() const noexcept { return family_; }
  double delta() const noexcept { return delta_; }

  friend bool operator==(const DisorderSpec&, const DisorderSpec&) = default;

 private:
  Family family_;
  double delta_;
};

/// Law of the on-site potential. An empty value means V = 0 on every site
/// (the clean chain), which several oracles need.
using PotentialLaw = std::optional<DisorderSpec>;

double pdf(const DisorderSpec& spec, double v);

/// P(V > v).
double survival(const DisorderSpec& spec, double v);

/// Inverse CDF on [0, 1).
double quantile(const DisorderSpec& spec, double u);

inline double sample(const DisorderSpec& spec, Rng& rng) { return quantile(spec, rng.uniform()); }

/// One on-site value; always consumes exactly one uniform so that streams
/// stay aligned across laws.
inline double sample(const PotentialLaw& law, Rng& rng) {
  const double u = rng.uniform();
  return law ? quantile(*law, u) : 0.0;
}

/// E{V^kappa}, by quadrature. Finite for kappa < 1 in the half-Cauchy case.
double fractional_moment(const DisorderSpec& spec, double kappa);

enum class GapMethod { ClosedForm, Quadrature };

/// F(t) = J(t) - 1 with J(t) = int f(v - t)^2 / f(v) dv: the chi-square
/// divergence between the on-site law and its copy shifted by t.
struct FisherGap {
  double t = 0.0;
  double value = 0.0;
  GapMethod method = GapMethod::ClosedForm;
};

/// Closed forms: exponential e^{t/delta} - 1, half-Cauchy
/// 2t/(pi delta) + t^2/(2 delta^2). Throws UnsupportedFamily for the uniform
/// family at t > 0 (J is infinite there).
FisherGap fisher_gap(const DisorderSpec& spec, double t);

/// Same quantity by adaptive Gauss-Kronrod quadrature of J(t). Throws
/// QuadratureDivergence if the error estimate does not reach 1e-10 relative.
FisherGap fisher_gap_quadrature(const DisorderSpec& spec, double t);

/// Jensen lower bound J(t) >= 1 / P(V > t); exact for the exponential family.
double jensen_floor(const DisorderSpec& spec, double t);

/// Hammersley-Chapman-Robbins lower bound on Var{phi(xi)}.
struct HcrBound {
  double value = 0.0;
  bool degenerate = false;  ///< F(t) == 0: the bound is 0/0 and reported as 0
};

HcrBound hcr_bound(double mean_phi, double mean_phi_shifted, const FisherGap& gap);

/// Monte Carlo check of the HCR inequality on the scalar toy model
/// phi(xi) = exp(-xi), xi ~ spec. Closed forms are filled in for the
/// exponential family only (NaN otherwise).
struct ScalarHcrCheck {
  std::size_t n_draws = 0;
  double t = 0.0;
  double gap = 0.0;
  double mean_phi = 0.0;
  double mean_phi_shifted = 0.0;
  double bound = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
  double exact_bound = 0.0;
  double exact_variance = 0.0;
  /// (variance - bound) / variance_stderr
  double margin_sigmas = 0.0;
};

ScalarHcrCheck scalar_hcr_check(const DisorderSpec& spec, double t, std::size_t n_draws,
                                std::uint64_t seed);

}  // namespace eefluct
