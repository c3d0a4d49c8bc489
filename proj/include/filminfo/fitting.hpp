#pragma once

#include <span>
#include <string>

#include "filminfo/regions.hpp"

namespace filminfo {

/// Finite-size area-law curve
///   MI(f) = kappa1 ln[(N_total / pi) sin(pi f) + kappa2] + kappa3
/// with f the subsystem pixel fraction.
struct CalabreseFit {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double rms = 0.0;
  bool converged = false;
  int iterations = 0;
  /// RMS of the best multi-start initial guess.
  double start_rms = 0.0;
};

/// Label written into output metadata for the sine-argument convention.
inline constexpr const char* kSineArgumentConvention = "pixel_fraction";

double calabrese_model(double fraction, double n_total, double kappa1, double kappa2,
                       double kappa3);

CalabreseFit calabrese_fit(std::span<const double> fraction, std::span<const double> mi,
                           double n_total);
/// Volume sweep with at least 5 points; f = |A| / (Nx Ny).
CalabreseFit calabrese_fit(const SweepResult& sweep);

struct AreaLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// SSE(linear) / SSE(quadratic); large values mean curvature.
  double quadratic_gain = 1.0;
  bool superlinear = false;
};

AreaLawFit area_law_fit(std::span<const double> area, std::span<const double> mi);
/// Area sweep with at least 4 points.
AreaLawFit area_law_fit(const SweepResult& sweep);

}  // namespace filminfo
