#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <doctest.h>

#include "eefluct/disorder.hpp"
#include "eefluct/error.hpp"
#include "eefluct/spectral.hpp"

using namespace eefluct;

namespace {

constexpr double kLn2 = std::numbers::ln2;

OccupationSpectrum occ(std::vector<double> v) { return {std::move(v)}; }

// Random instance generator: size, family, scale, energy and block drawn from
// a fixed stream.
struct Instance {
  std::vector<double> potential;
  double energy;
  Block block;
};

Instance random_instance(Rng& gen, std::size_t max_n = 256) {
  static constexpr Family families[] = {Family::Uniform, Family::Exponential, Family::HalfCauchy};
  const auto n = static_cast<std::size_t>(4 + gen() % (max_n - 3));
  const DisorderSpec spec(families[gen() % 3], 0.05 + 2.0 * gen.uniform());
  Instance inst;
  inst.potential = sample_potential(spec, n, gen);
  inst.energy = -0.5 + 5.0 * gen.uniform();
  const std::size_t l = 1 + gen() % (n - 1);
  inst.block = {gen() % (n - l + 1), l};
  return inst;
}

}  // namespace

TEST_CASE("operator construction") {
  const double zero[] = {0.0, 0.0};
  auto op = build_operator(zero);
  CHECK(op.diagonal == std::vector<double>{2.0, 2.0});
  CHECK(op.off_diagonal == std::vector<double>{-1.0});

  const double v[] = {1.0, 0.0, 2.0};
  CHECK(build_operator(v).diagonal == std::vector<double>{3.0, 2.0, 4.0});
  CHECK(build_operator(v, 5.0, 0).diagonal == std::vector<double>{8.0, 2.0, 4.0});
  CHECK_THROWS_AS(build_operator(v, 1.0, 3), Error);
  CHECK_THROWS_AS(build_operator(std::span<const double>{}), Error);
}

TEST_CASE("small clean chains") {
  const double two[] = {0.0, 0.0};
  const auto e2 = eigendecompose(build_operator(two));
  CHECK(e2.values[0] == doctest::Approx(1.0));
  CHECK(e2.values[1] == doctest::Approx(3.0));

  const double three[] = {0.0, 0.0, 0.0};
  const auto e3 = eigendecompose(build_operator(three));
  CHECK(e3.values[0] == doctest::Approx(2.0 - std::sqrt(2.0)));
  CHECK(e3.values[1] == doctest::Approx(2.0));
  CHECK(e3.values[2] == doctest::Approx(2.0 + std::sqrt(2.0)));

  const auto p = fermi_projection(e2, 2.0);
  CHECK(p.matrix(0, 0) == doctest::Approx(0.5));
  CHECK(p.matrix(0, 1) == doctest::Approx(0.5));
  CHECK(p.matrix(1, 1) == doctest::Approx(0.5));
  const auto o = occupation_spectrum(p, Block{0, 1});
  REQUIRE(o.values.size() == 1);
  CHECK(o.values[0] == doctest::Approx(0.5));
  CHECK(von_neumann_entropy(o) == doctest::Approx(kLn2));
}

TEST_CASE("clean chain spectrum matches the analytic formula") {
  const std::size_t n = 300;
  const std::vector<double> zero(n, 0.0);
  const auto eig = eigendecompose(build_operator(zero));
  for (std::size_t k = 1; k <= n; ++k) {
    const double exact = 2.0 - 2.0 * std::cos(std::numbers::pi * double(k) / double(n + 1));
    CHECK(eig.values[Eigen::Index(k - 1)] == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("empty and full Fermi seas") {
  Rng rng(1);
  const auto v = sample_potential(DisorderSpec(Family::Exponential, 1.0), 40, rng);
  const auto eig = eigendecompose(build_operator(v));
  const auto empty = fermi_projection(eig, eig.values.minCoeff() - 1.0);
  CHECK(empty.matrix.cwiseAbs().maxCoeff() == 0.0);
  const auto zero_occ = occupation_spectrum(empty, Block{5, 10});
  CHECK(std::all_of(zero_occ.values.begin(), zero_occ.values.end(), [](double x) { return x == 0.0; }));
  const auto full = fermi_projection(eig, eig.values.maxCoeff() + 1.0);
  CHECK((full.matrix - Eigen::MatrixXd::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eigenpairs are accurate") {
  Rng gen(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_instance(gen, 64);
    const auto op = build_operator(inst.potential);
    const auto eig = eigendecompose(op);
    const Eigen::MatrixXd h = op.dense();
    const double norm = h.cwiseAbs().colwise().sum().maxCoeff();
    const auto n = eig.vectors.rows();
    CHECK((h * eig.vectors - eig.vectors * eig.values.asDiagonal()).cwiseAbs().maxCoeff() <= 1e-10 * norm);
    CHECK((eig.vectors.transpose() * eig.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    // Dense solver as an independent oracle for the eigenvalues.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(h, Eigen::EigenvaluesOnly);
    CHECK((dense.eigenvalues() - eig.values).cwiseAbs().maxCoeff() < 1e-11 * norm);
  }
}

TEST_CASE("large chains stay orthonormal") {
  // Guards against broken optimized BLAS kernels on large problems.
  Rng rng(5);
  const auto v = sample_potential(DisorderSpec(Family::Exponential, 1.0), 1200, rng);
  const auto eig = eigendecompose(build_operator(v));
  const auto n = eig.vectors.rows();
  CHECK((eig.vectors.transpose() * eig.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("partial eigenvectors match the full decomposition") {
  Rng gen(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_instance(gen);
    const auto op = build_operator(inst.potential);
    const auto full = eigendecompose(op);
    const auto part = eigendecompose(op, inst.energy);
    CHECK(part.values == full.values);
    const auto m = static_cast<Eigen::Index>(full.count_below(inst.energy));
    REQUIRE(part.vectors.cols() == m);
    const auto pf = fermi_projection(full, inst.energy);
    const auto pp = fermi_projection(part, inst.energy);
    CHECK((pf.matrix - pp.matrix).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(fermi_projection(part, full.values.maxCoeff() + 1.0), Error);
  }
}

TEST_CASE("disconnected chains") {
  // A zero hopping splits the chain; the two halves must not talk.
  Rng rng(8);
  const auto v = sample_potential(DisorderSpec(Family::Exponential, 0.5), 60, rng);
  auto op = build_operator(v);
  op.off_diagonal[29] = 0.0;
  const auto eig = eigendecompose(op, 2.5);
  const auto p = fermi_projection(eig, 2.5);
  CHECK(p.matrix.block(0, 30, 30, 30).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p.matrix * p.matrix - p.matrix).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(von_neumann_entropy(occupation_spectrum(p, Block{0, 30})) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("projection invariants on random instances") {
  Rng gen(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = random_instance(gen);
    const auto n = inst.potential.size();
    CAPTURE(n);
    const auto eig = eigendecompose(build_operator(inst.potential));
    const auto p = fermi_projection(eig, inst.energy);

    // Idempotent and symmetric.
    CHECK((p.matrix * p.matrix - p.matrix).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((p.matrix - p.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);

    // Whole chain: occupations are a {0, 1} multiset.
    const auto whole = occupation_spectrum(p, Block{0, n});
    for (double x : whole.values) CHECK(std::min(x, 1.0 - x) < 1e-8);
    CHECK(std::accumulate(whole.values.begin(), whole.values.end(), 0.0) ==
          doctest::Approx(double(eig.count_below(inst.energy))));

    // Block occupations lie in [0, 1] and agree between the two routes.
    const auto a = occupation_spectrum(p, inst.block);
    const auto b = occupation_spectrum(eig, inst.energy, inst.block);
    REQUIRE(a.values.size() == inst.block.length);
    REQUIRE(b.values.size() == inst.block.length);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      CHECK(a.values[i] >= 0.0);
      CHECK(a.values[i] <= 1.0);
      CHECK(std::abs(a.values[i] - b.values[i]) < 1e-10);
    }
    CHECK(std::is_sorted(a.values.rbegin(), a.values.rend()));

    // Renyi entropies are nonincreasing in alpha.
    double prev = INFINITY;
    for (double alpha : std::initializer_list<double>{0.25, 0.5, 1.0, 2.0, 3.0, 10.0, INFINITY}) {
      const double s = renyi_entropy(a, alpha);
      CHECK(s >= 0.0);
      CHECK(s <= prev + 1e-9);
      prev = s;
    }

    // A pure state has equal entropies on complementary regions.
    std::vector<std::size_t> rest;
    for (std::size_t s = 0; s < n; ++s) {
      if (s < inst.block.start || s >= inst.block.end()) rest.push_back(s);
    }
    const auto c = occupation_spectrum(eig, inst.energy, rest);
    for (double alpha : std::initializer_list<double>{0.5, 1.0, 2.0, INFINITY}) {
      CAPTURE(alpha);
      CHECK(renyi_entropy(a, alpha) == doctest::Approx(renyi_entropy(c, alpha)).epsilon(1e-8));
    }
  }
}

TEST_CASE("entropy functionals") {
  CHECK(von_neumann_entropy(occ({0, 1, 1, 0})) == 0.0);
  CHECK(von_neumann_entropy(occ({0.5})) == doctest::Approx(kLn2));
  CHECK(von_neumann_entropy(occ({0.5, 0.25})) == doctest::Approx(kLn2 + 0.5623351446188083));
  CHECK(renyi_entropy(occ({0.5}), 2.0) == doctest::Approx(kLn2));
  CHECK(renyi_entropy(occ({0.5}), INFINITY) == doctest::Approx(kLn2));
  CHECK(renyi_binary_entropy(0.2, INFINITY) == doctest::Approx(-std::log(0.8)));
  CHECK(renyi_binary_entropy(0.3, 2.0) == doctest::Approx(-std::log(0.09 + 0.49)));

  const auto o = occ({0.9, 0.6, 0.31, 0.05});
  const double vn = von_neumann_entropy(o);
  CHECK(renyi_entropy(o, 1.0 + 1e-7) == doctest::Approx(vn).epsilon(1e-6));
  CHECK(renyi_entropy(o, 1.0 - 1e-7) == doctest::Approx(vn).epsilon(1e-6));
  CHECK(renyi_entropy(o, 1.0 + 2e-6) == doctest::Approx(vn).epsilon(1e-5));

  for (double bad : std::initializer_list<double>{0.0, -1.0, NAN}) {
    try {
      renyi_entropy(o, bad);
      FAIL("expected InvalidAlpha");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidAlpha);
    }
  }
}

TEST_CASE("block entropy") {
  ChainConfig cfg;
  cfg.n_sites = 2;
  cfg.block = {0, 1};
  cfg.fermi_energy = 2.0;
  Rng rng(1);
  CHECK(block_entropy(std::nullopt, cfg, 1.0, rng) == doctest::Approx(kLn2));

  // Below the spectrum (which is positive for V >= 0) nothing is occupied.
  ChainConfig low = ChainConfig::centered(200, 50, 0.0);
  Rng r1(3);
  CHECK(block_entropy(DisorderSpec(Family::Exponential, 1.0), low, 1.0, r1) == 0.0);

  const ChainConfig mid = ChainConfig::centered(200, 50, 1.0);
  Rng a(42), b(42);
  const DisorderSpec spec(Family::HalfCauchy, 0.7);
  CHECK(block_entropy(spec, mid, 1.0, a) == block_entropy(spec, mid, 1.0, b));

  ChainConfig bad = mid;
  bad.block = {190, 20};
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(centered_block(10, 11), Error);
  CHECK(centered_block(1000, 501) == Block{249, 501});
  CHECK(ChainConfig::centered(5000, 250, 1.0).in_bipartite_regime());
  CHECK_FALSE(ChainConfig::centered(5000, 2500, 1.0).in_bipartite_regime());
}
