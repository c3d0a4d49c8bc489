#pragma once

#include <Eigen/Dense>

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "filminfo/geometry.hpp"
#include "filminfo/physics.hpp"

namespace filminfo {

class RegionMask;

enum class Labelling { MomentumSpace, RealSpace };

std::string to_string(Labelling labelling);
Labelling parse_labelling(const std::string& text);

/// Symmetric 2n x 2n covariance matrix of a Gaussian state in block form
/// (Q, R; R^T, P). Rows 0..n-1 are field quadratures, n..2n-1 momenta, so the
/// symplectic form is Omega = (0, I; -I, 0).
///
/// Immutable once constructed. The entropy of the whole matrix is computed
/// lazily on first request and then shared by all copies.
class CovarianceMatrix {
 public:
  /// Takes a full matrix; throws DomainError if it is not square with even
  /// dimension, has non-finite entries, or is asymmetric beyond 1e-12
  /// relative to its block scale. The stored matrix is exactly symmetric.
  CovarianceMatrix(Eigen::MatrixXd data, Labelling labelling,
                   std::shared_ptr<const ModeBasis> basis = nullptr);

  static CovarianceMatrix from_blocks(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                                      const Eigen::MatrixXd& P, Labelling labelling,
                                      std::shared_ptr<const ModeBasis> basis = nullptr);

  Eigen::Index n() const { return data_.rows() / 2; }
  const Eigen::MatrixXd& data() const { return data_; }
  Labelling labelling() const { return labelling_; }
  const std::shared_ptr<const ModeBasis>& basis() const { return basis_; }

  auto Q() const { return data_.topLeftCorner(n(), n()); }
  auto R() const { return data_.topRightCorner(n(), n()); }
  auto P() const { return data_.bottomRightCorner(n(), n()); }

  /// Von Neumann entropy of the full matrix, cached.
  double total_entropy() const;

 private:
  struct Cache {
    std::once_flag once;
    double entropy = 0.0;
  };

  Eigen::MatrixXd data_;
  Labelling labelling_;
  std::shared_ptr<const ModeBasis> basis_;
  std::shared_ptr<Cache> cache_;
};

/// Positive symplectic eigenvalues, sorted ascending.
struct SymplecticSpectrum {
  std::vector<double> values;
};

enum class SpectrumRoute {
  Auto,        ///< singular values of L^T Omega L with Gamma = L L^T
  PhaseSpace,  ///< imaginary parts of eig(Omega Gamma)
  Squared,     ///< sqrt of eig(-(Omega Gamma)^2)
};

/// Uncertainty-bound tolerances for the symplectic spectrum.
inline constexpr double kNuClampTolerance = 1e-9;
inline constexpr double kNuFailTolerance = 1e-6;

SymplecticSpectrum symplectic_spectrum(const CovarianceMatrix& gamma,
                                       SpectrumRoute route = SpectrumRoute::Auto);

/// Same values before the uncertainty-bound check and clamp. Cholesky
/// failure on the Auto route still throws UnphysicalCovariance.
SymplecticSpectrum raw_symplectic_spectrum(const CovarianceMatrix& gamma,
                                           SpectrumRoute route = SpectrumRoute::Auto);

/// Entropy [nats] of a single symplectic eigenvalue nu >= 1/2.
double mode_entropy(double nu);

/// S = sum_n (nu+1/2) ln(nu+1/2) - (nu-1/2) ln(nu-1/2) in nats.
double von_neumann_entropy(const SymplecticSpectrum& spectrum);
double von_neumann_entropy(const CovarianceMatrix& gamma);

/// Momentum-space thermal state: Q~ = P~ = diag(n_T(omega_m) + 1/2), R~ = 0.
CovarianceMatrix thermal_momentum_covariance(std::shared_ptr<const ModeBasis> basis, double T);

/// Maps a momentum-space covariance to pixel quadratures using the
/// orthonormal sampled basis and the prefactors sqrt(c/(K omega)),
/// sqrt(K omega/c). Modes excluded from the basis (the Neumann zero mode) are
/// filled with a minimum-uncertainty state at the lowest retained frequency so
/// the pixel quadratures remain canonical.
CovarianceMatrix to_real_space(const CovarianceMatrix& gamma, const DerivedParams& d);

/// Inverse of to_real_space restricted to the retained modes.
CovarianceMatrix to_momentum_space(const CovarianceMatrix& gamma, const DerivedParams& d);

/// Sub-covariance on the given quadrature-pair indices (0..n-1), preserving
/// the (Q, R; R^T, P) ordering. Indices keep the order given.
CovarianceMatrix restrict(const CovarianceMatrix& gamma, std::span<const int> indices);
/// Partial trace onto the pixels of a mask; gamma must be in real space.
CovarianceMatrix restrict(const CovarianceMatrix& gamma, const RegionMask& mask);

/// I(A:B) = S(A) + S(B) - S(A u B) in nats; A and B must be disjoint.
/// Round-off down to -1e-8 is clamped to zero.
double mutual_information(const CovarianceMatrix& gamma, std::span<const int> A,
                          std::span<const int> B);
double mutual_information(const CovarianceMatrix& gamma, const RegionMask& A,
                          const RegionMask& B);

/// Entropy of the subsystem on the given indices; uses the cached total
/// entropy when the index set covers the whole matrix.
double subsystem_entropy(const CovarianceMatrix& gamma, std::span<const int> indices);

}  // namespace filminfo
