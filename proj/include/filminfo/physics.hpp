#pragma once

#include <functional>
#include <span>
#include <vector>

namespace filminfo {

class ModeBasis;

namespace constants {
/// Reduced Planck constant [J s].
inline constexpr double hbar = 1.054571817e-34;
/// Boltzmann constant [J/K].
inline constexpr double k_B = 1.380649e-23;
}  // namespace constants

/// Thin-film material and state parameters (SI units).
///
/// Defaults describe an 80 nm helium-4 film on sapphire at 0.3 K. sigma, rho
/// and m4 are ordinary material constants and can be overridden from config.
struct FilmParams {
  double h0 = 80e-9;            ///< equilibrium film thickness [m]
  double alpha_vdw = 2.6e-24;   ///< van der Waals coefficient [m^5 s^-2]
  double sigma = 3.54e-4;       ///< surface tension [N/m]
  double rho = 145.0;           ///< superfluid density [kg/m^3]
  double m4 = 6.6465e-27;       ///< helium-4 atom mass [kg]
  double T = 0.3;               ///< temperature [K]
  double M = 0.0;               ///< field mass [kg]

  /// Throws DomainError when any invariant is violated.
  void validate() const;
};

struct DerivedParams {
  double g_eff = 0.0;  ///< van der Waals effective gravity [m/s^2]
  double ell_c = 0.0;  ///< capillary length [m]
  double c3 = 0.0;     ///< third-sound speed [m/s]
  double K = 0.0;      ///< Luttinger parameter [m]
};

DerivedParams derive_params(const FilmParams& film);

/// omega(k) = sqrt(g_eff (1 + ell_c^2 k^2) k tanh(k h0)) [rad/s].
double dispersion_thin_film(double k, const DerivedParams& d, double h0);

/// omega(k) = c sqrt(k^2 + c^2 M^2 / hbar^2) [rad/s].
double dispersion_linear(double k, double c, double M);

/// Bose-Einstein occupation of a mode of angular frequency omega at
/// temperature T. Returns 0 at T = 0. omega must be strictly positive.
double bose_einstein(double omega, double T);

/// Angular frequency as a function of wavenumber.
using Dispersion = std::function<double(double)>;

Dispersion thin_film_dispersion(const FilmParams& film);
Dispersion linear_dispersion(double c, double M = 0.0);

struct ModeRegime {
  std::size_t mode = 0;     ///< position in the basis ordering
  double ratio = 0.0;       ///< hbar omega / (k_B T); +inf at T = 0
  bool quantum = false;     ///< ratio >= 1
};

struct RegimeReport {
  std::vector<ModeRegime> modes;
  double T_quantum = 0.0;   ///< hbar omega_min / k_B: all modes quantum below this
  std::size_t n_quantum = 0;
  std::size_t n_classical = 0;
};

RegimeReport quantum_regime_report(std::span<const double> omegas, double T);
RegimeReport quantum_regime_report(const ModeBasis& basis, double T);

}  // namespace filminfo
