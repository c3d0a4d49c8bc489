#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "filminfo/gaussian.hpp"
#include "filminfo/geometry.hpp"
#include "filminfo/physics.hpp"

namespace filminfo {

enum class Quadrature { Field, Momentum };

std::string to_string(Quadrature quadrature);
Quadrature parse_quadrature(const std::string& text);

/// Equal-time two-point function of one quadrature sampled over time.
struct TwoPointSeries {
  Quadrature quadrature = Quadrature::Field;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> samples;  ///< n_pixels x n_pixels, symmetric
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Checks strictly increasing times and square samples of equal size, and
  /// symmetrises every sample in place.
  void validate_and_symmetrize();
};

struct ReconstructionResult {
  Eigen::MatrixXd Qt;  ///< Q~(0)
  Eigen::MatrixXd Pt;  ///< P~(0)
  Eigen::MatrixXd Rt;  ///< R~(0)
  double residual_rms = 0.0;
  /// Largest condition number among the per-pair design matrices.
  double condition = 0.0;
  /// Mode pairs (m < n) with omega_m == omega_n; only R~_mn + R~_nm is
  /// determined for these, the estimate splits it evenly.
  std::vector<std::pair<int, int>> unidentifiable_pairs;

  CovarianceMatrix covariance(std::shared_ptr<const ModeBasis> basis = nullptr) const;
};

/// Per-mode phase-space rotation by omega_m t of a momentum-space covariance.
CovarianceMatrix evolve_mode_covariance(const CovarianceMatrix& gamma0, double t);

/// Time grid with dt <= pi / (4 omega_max) and span >= 2 * 2 pi / dw_min, where
/// dw_min is the smallest nonzero gap between mode frequencies.
std::vector<double> default_sample_times(const ModeBasis& basis, double degeneracy_tol = 1e-9);

/// Evaluates the single-quadrature two-point function at each time and adds
/// i.i.d. Gaussian noise of scale noise_sigma to every independent entry.
TwoPointSeries synth_two_point(const CovarianceMatrix& gamma0, const ModeBasis& basis,
                               const DerivedParams& d, const std::vector<double>& times,
                               Quadrature quadrature, double noise_sigma, std::uint64_t seed);

/// Mean absolute entry over all samples.
double mean_abs_signal(const TwoPointSeries& series);

struct FitOptions {
  /// Fit only the lowest max_modes modes; the rest are left at zero.
  std::optional<std::size_t> max_modes;
  double degeneracy_tol = 1e-9;
  double ridge_scale = 1e-10;
  double condition_limit = 1e12;
};

/// Linear least-squares recovery of (Q~, P~, R~) at t = 0 from a
/// single-quadrature series.
ReconstructionResult fit_covariance(const TwoPointSeries& series, const ModeBasis& basis,
                                    const DerivedParams& d, const FitOptions& options = {});

/// ||estimate - truth||_F / ||truth||_F over the (Q~, P~, R~) blocks. With
/// identifiable_only, the R~ entries of unidentifiable pairs are compared
/// through their symmetric part only.
double relative_frobenius_error(const ReconstructionResult& result, const CovarianceMatrix& truth,
                                bool identifiable_only = true);

}  // namespace filminfo
