#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "eefluct/error.hpp"
#include "eefluct/rng.hpp"
#include "eefluct/statistics.hpp"

using namespace eefluct;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> dist(3.0, 0.5);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(rng);
  return out;
}

}  // namespace

TEST_CASE("hand-computed moments") {
  const auto a = statistics(std::vector<double>{1, 1, 1});
  CHECK(a.mean == 1.0);
  CHECK(a.variance == 0.0);
  CHECK(a.coeff_variation == 0.0);
  CHECK(a.degenerate);

  const auto b = statistics(std::vector<double>{0, 2});
  CHECK(b.mean == doctest::Approx(1.0));
  CHECK(b.variance == doctest::Approx(2.0));
  CHECK(b.coeff_variation == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::isnan(b.stderr_cv));

  const auto c = statistics(std::vector<double>{1, 2, 3});
  CHECK(c.mean == doctest::Approx(2.0));
  CHECK(c.variance == doctest::Approx(1.0));
  CHECK(c.coeff_variation == doctest::Approx(0.5));

  CHECK(kind_of([] { statistics(std::vector<double>{1.0}); }) == ErrorKind::TooFewSamples);
}

TEST_CASE("leave-one-out matches brute force") {
  const auto x = normals(37, 5);
  const auto fast = leave_one_out_cv(x);
  const auto slow = jackknife_replicates(x, [](std::span<const double> s) {
    double m = 0, v = 0;
    for (double y : s) m += y;
    m /= double(s.size());
    for (double y : s) v += (y - m) * (y - m);
    return std::sqrt(v / double(s.size() - 1)) / m;
  });
  REQUIRE(fast.size() == slow.size());
  for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
}

TEST_CASE("jackknife standard error of the mean is the textbook one") {
  const auto x = normals(200, 6);
  const auto s = statistics(x);
  CHECK(s.stderr_mean == doctest::Approx(std::sqrt(s.variance / 200.0)).epsilon(1e-10));
}

TEST_CASE("jackknife stderr of C_V shrinks like n^-1/2") {
  // Averaged over independent replicates to tame the noise of a single pair.
  double r = 0.0;
  const int reps = 20;
  for (int k = 0; k < reps; ++k) {
    const auto small = statistics(normals(2000, 100 + k)).stderr_cv;
    const auto large = statistics(normals(4000, 500 + k)).stderr_cv;
    r += large / small;
  }
  r /= reps;
  CHECK(std::abs(r - 1.0 / std::sqrt(2.0)) <= 0.2 / std::sqrt(2.0));
}

TEST_CASE("density estimate") {
  const auto x = normals(100'000, 7);
  const auto [est, fit] = density_estimate(x, 25);
  CHECK(fit.fit_error < 0.03);
  CHECK(fit.mu == doctest::Approx(3.0).epsilon(0.01));
  CHECK(fit.sigma == doctest::Approx(0.5).epsilon(0.01));
  double area = 0.0;
  for (double d : est.density) area += d * est.bin_width();
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.bin_edges.size() == 26);

  CHECK(default_bin_count(2000) == 40);
  CHECK(default_bin_count(16000) == 80);
  CHECK(default_bin_count(50) >= 5);

  CHECK(kind_of([] { density_estimate(std::vector<double>(60, 1.5), 10); }) == ErrorKind::DegenerateSample);
  CHECK(kind_of([] { density_estimate(std::vector<double>(49, 1.5), 10); }) == ErrorKind::TooFewSamples);
}
