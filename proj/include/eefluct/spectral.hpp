#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "eefluct/disorder.hpp"
#include "eefluct/rng.hpp"

namespace eefluct {

/// Contiguous block of sites [start, start + length).
struct Block {
  std::size_t start = 0;
  std::size_t length = 0;

  std::size_t end() const noexcept { return start + length; }
  friend bool operator==(const Block&, const Block&) = default;
};

/// Block of length `length` centered in a chain of `n_sites` sites.
Block centered_block(std::size_t n_sites, std::size_t length);

/// Geometry of a finite open chain together with the Fermi energy and an
/// optional single-site potential shift.
struct ChainConfig {
  std::size_t n_sites = 0;
  Block block;
  double fermi_energy = 1.0;
  double shift_t = 0.0;
  /// Site that receives the shift; the leftmost block site when unset.
  std::optional<std::size_t> shift_site;

  static ChainConfig centered(std::size_t n_sites, std::size_t block_len, double fermi_energy);

  std::size_t effective_shift_site() const noexcept { return shift_site.value_or(block.start); }

  /// Throws ValidationError unless the block and shift site lie in the chain
  /// and shift_t >= 0.
  void validate() const;

  /// 1 << L << N, read as 10 <= L and 10 L <= N. Advisory only.
  bool in_bipartite_regime() const noexcept;
};

/// H = -Laplacian + V on an open chain: diagonal 2 + V(x), hopping -1.
struct Operator1D {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;

  std::size_t size() const noexcept { return diagonal.size(); }
  Eigen::MatrixXd dense() const;
};

Operator1D build_operator(std::span<const double> potential, double shift_t = 0.0,
                          std::size_t shift_site = 0);

/// n values drawn from `law`, one uniform per site in site order.
std::vector<double> sample_potential(const PotentialLaw& law, std::size_t n, Rng& rng);

/// Spectral decomposition: all eigenvalues in ascending order, and
/// orthonormal eigenvectors as columns for the lowest vectors.cols() of them.
struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  /// Number of eigenvalues strictly below `energy`.
  std::size_t count_below(double energy) const;
};

/// Tridiagonal eigensolver: eigenvalues by root-free QR (dsterf), vectors by
/// inverse iteration (dstein), falling back to MRRR (dstemr) if inverse
/// iteration does not converge. With `vectors_below` set, only the eigenvectors of
/// eigenvalues strictly below it are computed, which is all a Fermi
/// projection needs. Throws ConvergenceFailure if LAPACK reports one.
Eigenpairs eigendecompose(const Operator1D& op,
                          std::optional<double> vectors_below = std::nullopt);

/// P = sum over eigenvalues strictly below E of psi psi^T.
struct FermiProjection {
  Eigen::MatrixXd matrix;
};

FermiProjection fermi_projection(const Eigenpairs& eig, double fermi_energy);

/// Eigenvalues of the block-restricted Fermi projection, clamped to [0, 1]
/// (see kOccupationResolution) and sorted in descending order; one value per
/// block site.
struct OccupationSpectrum {
  std::vector<double> values;
};

/// Raw eigenvalues outside [-tol, 1 + tol] raise ProjectionCorrupt.
inline constexpr double kOccupationHardTolerance = 1e-6;

/// Occupations within this distance of 0 or 1 are roundoff and are set to
/// exactly 0 or 1, so pure-state blocks have exactly zero entropy.
inline constexpr double kOccupationResolution = 1e-12;

OccupationSpectrum occupation_spectrum(const FermiProjection& projection, Block block);
OccupationSpectrum occupation_spectrum(const FermiProjection& projection,
                                       std::span<const std::size_t> sites);

/// Same spectrum computed from the occupied eigenvectors without forming P:
/// with A the block rows of the occupied columns, P_block = A A^T shares its
/// nonzero eigenvalues with A^T A, and the smaller of the two is diagonalized.
OccupationSpectrum occupation_spectrum(const Eigenpairs& eig, double fermi_energy, Block block);
OccupationSpectrum occupation_spectrum(const Eigenpairs& eig, double fermi_energy,
                                       std::span<const std::size_t> sites);

/// h(x) = -x ln x - (1 - x) ln(1 - x), with h(0) = h(1) = 0.
double binary_entropy(double x) noexcept;

/// h_alpha(x) = ln(x^alpha + (1 - x)^alpha) / (1 - alpha); alpha = infinity
/// gives -ln max(x, 1 - x), and |alpha - 1| < 1e-6 gives h(x).
double renyi_binary_entropy(double x, double alpha);

double von_neumann_entropy(const OccupationSpectrum& occ);

/// Throws InvalidAlpha unless alpha > 0 (infinity allowed).
double renyi_entropy(const OccupationSpectrum& occ, double alpha);

/// Entropy of one disorder realization: samples the potential from `rng`,
/// applies the configured shift, diagonalizes and evaluates S^(alpha) of the
/// block (alpha = 1 is von Neumann).
double block_entropy(const PotentialLaw& law, const ChainConfig& cfg, double alpha, Rng& rng);

/// Same, for an explicit potential.
double block_entropy(std::span<const double> potential, const ChainConfig& cfg, double alpha);

}  // namespace eefluct
