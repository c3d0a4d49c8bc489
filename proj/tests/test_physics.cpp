#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "filminfo/errors.hpp"
#include "filminfo/geometry.hpp"
#include "filminfo/physics.hpp"

using namespace filminfo;

TEST_CASE("derived constants of the 80 nm film") {
  const FilmParams film;
  const DerivedParams d = derive_params(film);
  CHECK(d.g_eff == doctest::Approx(1.9043e5).epsilon(1e-4));
  CHECK(d.c3 == doctest::Approx(0.1234).epsilon(1e-3));
  CHECK(std::abs(d.K / 2.21e14 - 1.0) < 0.05);
  CHECK(d.ell_c == doctest::Approx(3.58e-6).epsilon(2e-3));

  // exact against the defining formulas
  CHECK(d.g_eff == 3.0 * film.alpha_vdw / std::pow(film.h0, 4));
  CHECK(d.c3 == std::sqrt(d.g_eff * film.h0));
  CHECK(d.ell_c == std::sqrt(film.sigma / (film.rho * d.g_eff)));
  CHECK(d.K == doctest::Approx(constants::hbar * film.rho * d.c3 / (d.g_eff * film.m4 * film.m4)).epsilon(1e-15));
}

TEST_CASE("derive_params rejects bad films") {
  FilmParams film;
  film.h0 = 0.0;
  CHECK_THROWS_AS(derive_params(film), DomainError);
  film = FilmParams{};
  film.T = -1.0;
  CHECK_THROWS_AS(film.validate(), DomainError);
  film = FilmParams{};
  film.rho = 0.0;
  CHECK_THROWS_AS(film.validate(), DomainError);
}

TEST_CASE("thin-film dispersion") {
  const FilmParams film;
  const DerivedParams d = derive_params(film);
  CHECK(dispersion_thin_film(0.0, d, film.h0) == 0.0);
  CHECK(dispersion_thin_film(100.0, d, film.h0) / (d.c3 * 100.0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(dispersion_thin_film(628.3, d, film.h0) == doctest::Approx(77.6).epsilon(2e-3));

  double prev = 0.0;
  for (double k = 1.0; k < 1e9; k *= 1.3) {
    const double w = dispersion_thin_film(k, d, film.h0);
    CHECK(w > prev);
    prev = w;
    if (k * film.h0 < 0.05 && k * d.ell_c < 0.05) {
      CHECK(std::abs(w / dispersion_linear(k, d.c3, 0.0) - 1.0) < 1e-2);
    }
  }
}

TEST_CASE("linear dispersion") {
  CHECK(dispersion_linear(628.3, 0.1234, 0.0) == 0.1234 * 628.3);
  CHECK(dispersion_linear(628.3, 0.1234, 0.0) == doctest::Approx(77.53).epsilon(1e-3));
  const double M = 1e-40;
  CHECK(dispersion_linear(0.0, 0.2, M) == doctest::Approx(0.04 * M / constants::hbar).epsilon(1e-14));
}

TEST_CASE("Bose-Einstein occupation") {
  const double T = 0.3;
  const double unit = constants::k_B * T / constants::hbar;  // omega with ratio 1
  CHECK(bose_einstein(std::log(2.0) * unit, T) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(bose_einstein(unit, T) == doctest::Approx(0.581977).epsilon(1e-6));
  CHECK(bose_einstein(77.6, 0.3) == doctest::Approx(5.06e8).epsilon(2e-3));
  CHECK(bose_einstein(77.6, 0.0) == 0.0);
  CHECK_THROWS_AS(bose_einstein(0.0, T), DomainError);
  CHECK_THROWS_AS(bose_einstein(-1.0, T), DomainError);

  for (double x : {1e-6, 1e-3, 0.1, 1.0, 5.0, 30.0, 300.0}) {
    const double n = bose_einstein(x * unit, T);
    CHECK(std::abs((n + 1.0) / (std::exp(x) * n) - 1.0) < 1e-12);
  }
}

TEST_CASE("quantum regime report") {
  SUBCASE("micron cell of a 50 nm film reaches the quantum regime at microkelvin") {
    FilmParams film;
    film.h0 = 50e-9;
    const Dispersion w = linear_dispersion(derive_params(film).c3);
    const ModeBasis basis = build_basis(Grid(1e-6, 1e-6, 4, 4), BoundarySpec::dirichlet(), w);
    const RegimeReport r = quantum_regime_report(basis, 1e-6);
    CHECK(r.T_quantum >= 0.5e-6);
    CHECK(r.T_quantum <= 10e-6);
    CHECK(r.n_quantum == basis.n_modes());
  }
  SUBCASE("zero temperature is fully quantum") {
    const double w[] = {1.0, 10.0, 100.0};
    const RegimeReport r = quantum_regime_report(w, 0.0);
    CHECK(r.n_quantum == 3);
    CHECK(r.n_classical == 0);
    CHECK(std::isinf(r.modes[0].ratio));
  }
  SUBCASE("5 mm cell at 0.3 K is fully classical") {
    const FilmParams film;
    const ModeBasis basis =
        build_basis(Grid(5e-3, 5e-3, 20, 20), BoundarySpec::dirichlet(), thin_film_dispersion(film));
    const RegimeReport r = quantum_regime_report(basis, 0.3);
    CHECK(r.n_classical == 400);
    CHECK(r.n_quantum == 0);
    CHECK(r.modes[0].ratio == doctest::Approx(2.8e-9).epsilon(0.05));
  }
}
