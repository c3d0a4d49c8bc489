#include "filminfo/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "filminfo/errors.hpp"
#include "filminfo/geometry.hpp"

namespace filminfo {

void FilmParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("film parameters: ") + what);
  };
  require(std::isfinite(h0) && h0 > 0.0, "h0 must be > 0");
  require(std::isfinite(alpha_vdw) && alpha_vdw > 0.0, "alpha_vdw must be > 0");
  require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be >= 0");
  require(std::isfinite(rho) && rho > 0.0, "rho must be > 0");
  require(std::isfinite(m4) && m4 > 0.0, "m4 must be > 0");
  require(std::isfinite(T) && T >= 0.0, "T must be >= 0");
  require(std::isfinite(M) && M >= 0.0, "M must be >= 0");
}

DerivedParams derive_params(const FilmParams& film) {
  film.validate();
  DerivedParams d;
  d.g_eff = 3.0 * film.alpha_vdw / std::pow(film.h0, 4);
  if (!std::isfinite(d.g_eff) || d.g_eff <= 0.0) {
    throw DomainError("derive_params: effective gravity is not finite");
  }
  d.c3 = std::sqrt(d.g_eff * film.h0);
  d.ell_c = std::sqrt(film.sigma / (film.rho * d.g_eff));
  d.K = constants::hbar * film.rho * d.c3 / (d.g_eff * film.m4 * film.m4);
  return d;
}

double dispersion_thin_film(double k, const DerivedParams& d, double h0) {
  if (k < 0.0) throw DomainError("dispersion_thin_film: k must be >= 0");
  if (k == 0.0) return 0.0;
  const double capillary = 1.0 + d.ell_c * d.ell_c * k * k;
  return std::sqrt(d.g_eff * capillary * k * std::tanh(k * h0));
}

double dispersion_linear(double k, double c, double M) {
  if (k < 0.0 || c <= 0.0 || M < 0.0) {
    throw DomainError("dispersion_linear: requires k >= 0, c > 0, M >= 0");
  }
  const double mass_term = c * M / constants::hbar;
  return c * std::sqrt(k * k + mass_term * mass_term);
}

double bose_einstein(double omega, double T) {
  if (!(omega > 0.0)) {
    throw DomainError("bose_einstein: omega must be > 0 (zero modes have no occupation)");
  }
  if (T < 0.0) throw DomainError("bose_einstein: T must be >= 0");
  if (T == 0.0) return 0.0;
  const double x = constants::hbar * omega / (constants::k_B * T);
  // expm1 keeps full precision in the classical limit x << 1.
  return 1.0 / std::expm1(x);
}

Dispersion thin_film_dispersion(const FilmParams& film) {
  const DerivedParams d = derive_params(film);
  const double h0 = film.h0;
  return [d, h0](double k) { return dispersion_thin_film(k, d, h0); };
}

Dispersion linear_dispersion(double c, double M) {
  return [c, M](double k) { return dispersion_linear(k, c, M); };
}

RegimeReport quantum_regime_report(std::span<const double> omegas, double T) {
  if (T < 0.0) throw DomainError("quantum_regime_report: T must be >= 0");
  RegimeReport report;
  double omega_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    ModeRegime mode;
    mode.mode = i;
    mode.ratio = T == 0.0 ? std::numeric_limits<double>::infinity()
                          : constants::hbar * omegas[i] / (constants::k_B * T);
    mode.quantum = mode.ratio >= 1.0;
    (mode.quantum ? report.n_quantum : report.n_classical) += 1;
    report.modes.push_back(mode);
    omega_min = std::min(omega_min, omegas[i]);
  }
  report.T_quantum = omegas.empty() ? 0.0 : constants::hbar * omega_min / constants::k_B;
  return report;
}

RegimeReport quantum_regime_report(const ModeBasis& basis, double T) {
  const Eigen::VectorXd w = basis.omegas();
  return quantum_regime_report(std::span<const double>(w.data(), w.size()), T);
}

}  // namespace filminfo
