#include "eefluct/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <lapacke.h>

#include "eefluct/error.hpp"

namespace eefluct {

namespace {

std::vector<std::size_t> block_sites(Block block) {
  std::vector<std::size_t> sites(block.length);
  for (std::size_t i = 0; i < block.length; ++i) sites[i] = block.start + i;
  return sites;
}

Eigen::Index occupied_count(const Eigenpairs& eig, double fermi_energy) {
  const auto m = static_cast<Eigen::Index>(eig.count_below(fermi_energy));
  if (m > eig.vectors.cols()) {
    throw Error(ErrorKind::ValidationError,
                "eigenvectors were computed below a lower energy than the Fermi energy");
  }
  return m;
}

void check_sites(std::span<const std::size_t> sites, std::size_t n) {
  for (std::size_t s : sites) {
    if (s >= n) {
      throw Error(ErrorKind::ValidationError,
                  "site " + std::to_string(s) + " outside chain of " + std::to_string(n) + " sites");
    }
  }
}

// Clamps raw eigenvalues to [0, 1], snaps roundoff-level values to 0 or 1, pads with zeros up to `length` and sorts
// in descending order.
OccupationSpectrum finish_spectrum(const Eigen::VectorXd& raw, std::size_t length) {
  OccupationSpectrum occ;
  occ.values.assign(length, 0.0);
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double x = raw[i];
    if (!(x >= -kOccupationHardTolerance && x <= 1.0 + kOccupationHardTolerance)) {
      throw Error(ErrorKind::ProjectionCorrupt,
                  "block occupation " + std::to_string(x) + " outside [0, 1] beyond tolerance");
    }
    double y = std::clamp(x, 0.0, 1.0);
    if (y < kOccupationResolution) y = 0.0;
    if (y > 1.0 - kOccupationResolution) y = 1.0;
    occ.values[static_cast<std::size_t>(i)] = y;
  }
  std::sort(occ.values.begin(), occ.values.end(), std::greater<>());
  return occ;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "block eigenvalue solver did not converge");
  }
  return solver.eigenvalues();
}

template <typename Rows>
OccupationSpectrum gram_spectrum(const Rows& a) {
  const Eigen::Index l = a.rows();
  const Eigen::Index m = a.cols();
  if (m == 0 || l == 0) return finish_spectrum({}, static_cast<std::size_t>(l));
  Eigen::MatrixXd gram;
  if (m >= l) {
    gram = Eigen::MatrixXd::Zero(l, l);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(a);
  } else {
    gram = Eigen::MatrixXd::Zero(m, m);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  }
  return finish_spectrum(symmetric_eigenvalues(gram), static_cast<std::size_t>(l));
}

}  // namespace

Block centered_block(std::size_t n_sites, std::size_t length) {
  if (length > n_sites) {
    throw Error(ErrorKind::ValidationError, "block length " + std::to_string(length) +
                                                " exceeds chain length " + std::to_string(n_sites));
  }
  return {(n_sites - length) / 2, length};
}

ChainConfig ChainConfig::centered(std::size_t n_sites, std::size_t block_len, double fermi_energy) {
  ChainConfig cfg;
  cfg.n_sites = n_sites;
  cfg.block = centered_block(n_sites, block_len);
  cfg.fermi_energy = fermi_energy;
  return cfg;
}

void ChainConfig::validate() const {
  if (n_sites == 0) throw Error(ErrorKind::ValidationError, "chain.n_sites must be positive");
  if (block.end() > n_sites) {
    throw Error(ErrorKind::ValidationError,
                "block [" + std::to_string(block.start) + ", " + std::to_string(block.end()) +
                    ") does not fit in a chain of " + std::to_string(n_sites) + " sites");
  }
  if (!std::isfinite(fermi_energy)) {
    throw Error(ErrorKind::ValidationError, "chain.fermi_energy must be finite");
  }
  if (!(shift_t >= 0.0) || !std::isfinite(shift_t)) {
    throw Error(ErrorKind::ValidationError, "chain.shift_t must be finite and nonnegative");
  }
  if (effective_shift_site() >= n_sites) {
    throw Error(ErrorKind::ValidationError, "chain.shift_site outside the chain");
  }
}

bool ChainConfig::in_bipartite_regime() const noexcept {
  return block.length >= 10 && 10 * block.length <= n_sites;
}

Eigen::MatrixXd Operator1D::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = diagonal[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = off_diagonal[static_cast<std::size_t>(i)];
    h(i + 1, i) = off_diagonal[static_cast<std::size_t>(i)];
  }
  return h;
}

Operator1D build_operator(std::span<const double> potential, double shift_t,
                          std::size_t shift_site) {
  const std::size_t n = potential.size();
  if (n == 0) throw Error(ErrorKind::ValidationError, "potential must have at least one site");
  Operator1D op;
  op.diagonal.resize(n);
  for (std::size_t x = 0; x < n; ++x) op.diagonal[x] = 2.0 + potential[x];
  if (shift_t != 0.0) {
    if (shift_site >= n) throw Error(ErrorKind::ValidationError, "shift site outside the chain");
    op.diagonal[shift_site] += shift_t;
  }
  op.off_diagonal.assign(n - 1, -1.0);
  return op;
}

std::vector<double> sample_potential(const PotentialLaw& law, std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = sample(law, rng);
  return v;
}

std::size_t Eigenpairs::count_below(double energy) const {
  const double* begin = values.data();
  const double* end = begin + values.size();
  return static_cast<std::size_t>(std::lower_bound(begin, end, energy) - begin);
}

namespace {

struct Level {
  double value;
  lapack_int block;  // 1-based index of the unreduced block
};

// Inverse iteration for the selected levels, grouped by block as dstein
// requires. Returns false if any vector failed to converge.
bool inverse_iteration(const Operator1D& op, std::vector<Level> levels,
                       const std::vector<lapack_int>& split_ends, Eigen::MatrixXd& out) {
  const auto n = static_cast<lapack_int>(op.size());
  const auto m = static_cast<lapack_int>(levels.size());
  std::vector<std::size_t> order(levels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return levels[x].block < levels[y].block;
  });
  // LAPACKE inspects all n entries of w for NaNs even though dstein reads m.
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  std::vector<lapack_int> iblock(levels.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    w[i] = levels[order[i]].value;
    iblock[i] = levels[order[i]].block;
  }
  std::vector<double> diag(op.diagonal);
  std::vector<double> off(op.off_diagonal);
  off.push_back(0.0);
  Eigen::MatrixXd z(n, m);
  std::vector<lapack_int> fail(levels.size());
  const lapack_int info = LAPACKE_dstein(LAPACK_COL_MAJOR, n, diag.data(), off.data(), m, w.data(),
                                         iblock.data(), split_ends.data(), z.data(), n, fail.data());
  if (info != 0) return false;
  out.resize(n, m);
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.col(static_cast<Eigen::Index>(order[i])) = z.col(static_cast<Eigen::Index>(i));
  }
  return true;
}

void mrrr_vectors(const Operator1D& op, lapack_int m, Eigen::MatrixXd& out) {
  const auto n = static_cast<lapack_int>(op.size());
  std::vector<double> diag(op.diagonal);
  std::vector<double> off(op.off_diagonal);
  off.push_back(0.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(m));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  out.resize(n, m);
  const lapack_int info =
      LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0, 1, m, &found,
                     w.data(), out.data(), n, m, support.data(), &tryrac);
  if (info != 0 || found != m) {
    throw Error(ErrorKind::ConvergenceFailure,
                "dstemr failed with info = " + std::to_string(info) + " for N = " + std::to_string(n));
  }
}

}  // namespace

Eigenpairs eigendecompose(const Operator1D& op, std::optional<double> vectors_below) {
  const auto n = static_cast<lapack_int>(op.size());
  if (n == 0) throw Error(ErrorKind::ValidationError, "operator has no sites");

  // Eigenvalues block by block, splitting where the chain is disconnected.
  std::vector<Level> levels;
  levels.reserve(op.size());
  std::vector<lapack_int> split_ends;
  lapack_int begin = 0;
  for (lapack_int i = 0; i < n; ++i) {
    if (i + 1 < n && op.off_diagonal[static_cast<std::size_t>(i)] != 0.0) continue;
    const lapack_int len = i + 1 - begin;
    std::vector<double> d(op.diagonal.begin() + begin, op.diagonal.begin() + i + 1);
    std::vector<double> e(op.off_diagonal.begin() + begin, op.off_diagonal.begin() + i);
    const lapack_int info = LAPACKE_dsterf(len, d.data(), e.data());
    if (info != 0) {
      throw Error(ErrorKind::ConvergenceFailure, "dsterf failed with info = " + std::to_string(info) +
                                                     " for N = " + std::to_string(n));
    }
    split_ends.push_back(i + 1);
    for (double x : d) levels.push_back({x, static_cast<lapack_int>(split_ends.size())});
    begin = i + 1;
  }
  std::sort(levels.begin(), levels.end(),
            [](const Level& x, const Level& y) { return x.value < y.value; });

  Eigenpairs eig;
  eig.values.resize(n);
  for (lapack_int i = 0; i < n; ++i) eig.values[i] = levels[static_cast<std::size_t>(i)].value;

  const auto m = static_cast<lapack_int>(vectors_below ? eig.count_below(*vectors_below) : n);
  eig.vectors.resize(n, 0);
  if (m == 0) return eig;
  levels.resize(static_cast<std::size_t>(m));
  if (!inverse_iteration(op, std::move(levels), split_ends, eig.vectors)) {
    mrrr_vectors(op, m, eig.vectors);
  }
  return eig;
}

FermiProjection fermi_projection(const Eigenpairs& eig, double fermi_energy) {
  const auto m = occupied_count(eig, fermi_energy);
  const auto n = eig.vectors.rows();
  FermiProjection p;
  p.matrix = Eigen::MatrixXd::Zero(n, n);
  if (m > 0) {
    const auto occupied = eig.vectors.leftCols(m);
    p.matrix.selfadjointView<Eigen::Lower>().rankUpdate(occupied);
    p.matrix.triangularView<Eigen::StrictlyUpper>() = p.matrix.transpose();
  }
  return p;
}

OccupationSpectrum occupation_spectrum(const FermiProjection& projection, Block block) {
  return occupation_spectrum(projection, block_sites(block));
}

OccupationSpectrum occupation_spectrum(const FermiProjection& projection,
                                       std::span<const std::size_t> sites) {
  const auto n = static_cast<std::size_t>(projection.matrix.rows());
  check_sites(sites, n);
  const auto l = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd sub(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) {
      sub(i, j) = projection.matrix(static_cast<Eigen::Index>(sites[static_cast<std::size_t>(i)]),
                                    static_cast<Eigen::Index>(sites[static_cast<std::size_t>(j)]));
    }
  }
  return finish_spectrum(symmetric_eigenvalues(sub), sites.size());
}

OccupationSpectrum occupation_spectrum(const Eigenpairs& eig, double fermi_energy, Block block) {
  const auto n = static_cast<std::size_t>(eig.vectors.rows());
  if (block.end() > n) throw Error(ErrorKind::ValidationError, "block outside the chain");
  const auto m = occupied_count(eig, fermi_energy);
  return gram_spectrum(eig.vectors.block(static_cast<Eigen::Index>(block.start), 0,
                                         static_cast<Eigen::Index>(block.length), m));
}

OccupationSpectrum occupation_spectrum(const Eigenpairs& eig, double fermi_energy,
                                       std::span<const std::size_t> sites) {
  check_sites(sites, static_cast<std::size_t>(eig.vectors.rows()));
  const auto m = occupied_count(eig, fermi_energy);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(sites.size()), m);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) =
        eig.vectors.row(static_cast<Eigen::Index>(sites[i])).head(m);
  }
  return gram_spectrum(a);
}

double binary_entropy(double x) noexcept {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

double renyi_binary_entropy(double x, double alpha) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorKind::InvalidAlpha, "Renyi index must be positive, got " + std::to_string(alpha));
  }
  if (std::isinf(alpha)) return -std::log(std::max(x, 1.0 - x));
  if (std::abs(alpha - 1.0) < 1e-6) return binary_entropy(x);
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::log(std::pow(x, alpha) + std::pow(1.0 - x, alpha)) / (1.0 - alpha);
}

double von_neumann_entropy(const OccupationSpectrum& occ) {
  double s = 0.0;
  for (double x : occ.values) s += binary_entropy(x);
  return s;
}

double renyi_entropy(const OccupationSpectrum& occ, double alpha) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorKind::InvalidAlpha, "Renyi index must be positive, got " + std::to_string(alpha));
  }
  if (std::abs(alpha - 1.0) < 1e-6) return von_neumann_entropy(occ);
  double s = 0.0;
  for (double x : occ.values) s += renyi_binary_entropy(x, alpha);
  return s;
}

double block_entropy(std::span<const double> potential, const ChainConfig& cfg, double alpha) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorKind::InvalidAlpha, "Renyi index must be positive, got " + std::to_string(alpha));
  }
  if (potential.size() != cfg.n_sites) {
    throw Error(ErrorKind::ValidationError, "potential length does not match chain.n_sites");
  }
  cfg.validate();
  const Operator1D op = build_operator(potential, cfg.shift_t, cfg.effective_shift_site());
  const Eigenpairs eig = eigendecompose(op, cfg.fermi_energy);
  return renyi_entropy(occupation_spectrum(eig, cfg.fermi_energy, cfg.block), alpha);
}

double block_entropy(const PotentialLaw& law, const ChainConfig& cfg, double alpha, Rng& rng) {
  cfg.validate();
  const std::vector<double> potential = sample_potential(law, cfg.n_sites, rng);
  return block_entropy(potential, cfg, alpha);
}

}  // namespace eefluct
