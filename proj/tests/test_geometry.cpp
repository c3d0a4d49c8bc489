#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "filminfo/errors.hpp"
#include "filminfo/geometry.hpp"
#include "filminfo/physics.hpp"

using namespace filminfo;

namespace {

constexpr double kPi = std::numbers::pi;

// Convention tan(kL) = 2 alpha k / (k^2 - alpha^2), evaluated directly.
double tan_residual(double k, double alpha, double L) {
  return std::tan(k * L) - 2.0 * alpha * k / (k * k - alpha * alpha);
}

double orthonormality_error(const Eigen::MatrixXd& G) {
  return (G * G.transpose() - Eigen::MatrixXd::Identity(G.rows(), G.rows())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("Dirichlet and Neumann wavenumbers") {
  const auto d = solve_wavenumbers_1d(BoundarySpec::dirichlet(), 5e-3, 3);
  REQUIRE(d.size() == 3);
  CHECK(d[0] == doctest::Approx(628.32).epsilon(1e-5));
  CHECK(d[1] == doctest::Approx(1256.64).epsilon(1e-5));
  CHECK(d[2] == doctest::Approx(1884.96).epsilon(1e-5));
  const auto n = solve_wavenumbers_1d(BoundarySpec::neumann(), 5e-3, 3);
  CHECK(n[0] == 0.0);
  CHECK(n[1] == doctest::Approx(628.32).epsilon(1e-5));
  CHECK_THROWS_AS(solve_wavenumbers_1d(BoundarySpec::dirichlet(), -1.0, 3), DomainError);
  CHECK_THROWS_AS(solve_wavenumbers_1d(BoundarySpec::dirichlet(), 1.0, 0), DomainError);
}

TEST_CASE("Robin root at alpha L = 1 against a dense scan") {
  const double L = 5e-3;
  const double alpha = 200.0;
  const auto k = solve_wavenumbers_1d(BoundarySpec::robin(alpha), L, 4);
  REQUIRE(k[0] > 0.0);
  REQUIRE(k[0] < kPi / L);
  CHECK(std::abs(tan_residual(k[0], alpha, L)) < 1e-10);

  // Sign changes of the pole-free residual on 1e6 points of the first bracket.
  const int n = 1000000;
  const double hi = kPi / L;
  int changes = 0;
  double located = 0.0;
  auto f = [&](double x) {
    return (x * x - alpha * alpha) * std::sin(x * L) - 2.0 * alpha * x * std::cos(x * L);
  };
  double prev = f(hi / n);
  for (int i = 2; i <= n; ++i) {
    const double x = hi * i / n;
    const double cur = f(x);
    if (std::signbit(cur) != std::signbit(prev)) {
      ++changes;
      located = x;
    }
    prev = cur;
  }
  CHECK(changes == 1);
  CHECK(std::abs(located - k[0]) <= hi / n);

  for (std::size_t m = 1; m < k.size(); ++m) {
    CHECK(k[m] > m * kPi / L);
    CHECK(k[m] <= (m + 1) * kPi / L);
    CHECK(std::abs(tan_residual(k[m], alpha, L)) < 1e-8);
  }
}

TEST_CASE("Robin limits reproduce Neumann and Dirichlet") {
  const double L = 5e-3;
  const int N = 12;
  const auto neu = solve_wavenumbers_1d(BoundarySpec::neumann(), L, N + 1);
  const auto dir = solve_wavenumbers_1d(BoundarySpec::dirichlet(), L, N);
  const auto small = solve_wavenumbers_1d(BoundarySpec::robin(1e-6 / L), L, N);
  const auto large = solve_wavenumbers_1d(BoundarySpec::robin(1e6 / L), L, N);
  // Branch 1 of a weak Robin condition is the lifted zero mode; the rest follow
  // the nonzero Neumann wavenumbers.
  CHECK(small[0] * L < 1e-2);
  for (int m = 1; m < N; ++m) CHECK(std::abs(small[m] / neu[m] - 1.0) < 1e-5);
  for (int m = 0; m < N; ++m) CHECK(std::abs(large[m] / dir[m] - 1.0) < 1e-5);
}

TEST_CASE("Robin branches are monotone in alpha") {
  const double L = 1.0;
  std::vector<double> prev(6, 0.0);
  for (double aL : {1e-6, 1e-3, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0, 1e4, 1e6}) {
    const auto k = solve_wavenumbers_1d(BoundarySpec::robin(aL), L, 6);
    for (int m = 0; m < 6; ++m) {
      CHECK(k[m] > prev[m]);
      prev[m] = k[m];
    }
  }
}

TEST_CASE("Robin rejects negative and non-finite alpha") {
  CHECK_THROWS_WITH_AS(solve_wavenumbers_1d(BoundarySpec::robin(-1.0), 1.0, 3),
                       doctest::Contains("unstable Robin spectrum"), DomainError);
  CHECK_THROWS_AS(solve_wavenumbers_1d(BoundarySpec::robin(std::nan("")), 1.0, 3), DomainError);
  const auto zero = solve_wavenumbers_1d(BoundarySpec::robin(0.0), 1.0, 3);
  CHECK(zero == solve_wavenumbers_1d(BoundarySpec::neumann(), 1.0, 3));
}

TEST_CASE("type-II closed forms") {
  const int N = 9;
  const double L = 2.0;
  const auto kd = solve_wavenumbers_1d(BoundarySpec::dirichlet(), L, N);
  const Eigen::MatrixXd D = sampled_modes_1d(BoundarySpec::dirichlet(), L, N, kd);
  const auto kn = solve_wavenumbers_1d(BoundarySpec::neumann(), L, N);
  const Eigen::MatrixXd C = sampled_modes_1d(BoundarySpec::neumann(), L, N, kn);
  for (int m = 0; m < N; ++m) {
    for (int i = 0; i < N; ++i) {
      const double x = (i + 0.5) * L / N;
      // sqrt(eps) g_m(x_i) with g_m = sqrt(2/L) sin(k x); the Nyquist row of the
      // discrete sine basis carries an extra 1/sqrt(2).
      const double dirichlet = std::sqrt(2.0 / N) * std::sin(kd[m] * x) * (m == N - 1 ? M_SQRT1_2 : 1.0);
      const double neumann = (m == 0 ? std::sqrt(1.0 / N) : std::sqrt(2.0 / N) * std::cos(kn[m] * x));
      CHECK(std::abs(D(m, i) - dirichlet) < 1e-12);
      CHECK(std::abs(C(m, i) - neumann) < 1e-12);
    }
  }
}

TEST_CASE("basis sizes, ordering and orthonormality") {
  const FilmParams film;
  const Dispersion w = thin_film_dispersion(film);
  const Grid g20(5e-3, 5e-3, 20, 20);

  const ModeBasis neu = build_basis(g20, BoundarySpec::neumann(), w);
  CHECK(neu.n_modes() == 399);
  CHECK(neu.excluded_modes().size() == 1);
  CHECK(neu.excluded_rows().rows() == 1);

  const ModeBasis dir = build_basis(g20, BoundarySpec::dirichlet(), w);
  CHECK(dir.n_modes() == 400);
  for (std::size_t i = 0; i < dir.n_modes(); ++i) {
    CHECK(dir.modes()[i].omega > 0.0);
    if (i > 0) CHECK(dir.modes()[i].k >= dir.modes()[i - 1].k);
  }

  const ModeBasis again = build_basis(g20, BoundarySpec::dirichlet(), w);
  bool same_order = true;
  for (std::size_t i = 0; i < dir.n_modes(); ++i) {
    same_order = same_order && dir.modes()[i].mx == again.modes()[i].mx && dir.modes()[i].my == again.modes()[i].my;
  }
  CHECK(same_order);

  const Dispersion lin = linear_dispersion(1.0, 1e-40);
  CHECK(build_basis(g20, BoundarySpec::neumann(true), lin).n_modes() == 400);
  CHECK_THROWS_AS(build_basis(g20, BoundarySpec::neumann(true), linear_dispersion(1.0)), DomainError);

  for (auto [nx, ny] : {std::pair{32, 32}, std::pair{7, 13}, std::pair{1, 5}}) {
    const Grid g(1.0, 1.3, nx, ny);
    std::vector<BoundarySpec> specs = {BoundarySpec::dirichlet(), BoundarySpec::neumann()};
    for (double aL : {1e-6, 0.1, 1.0, 10.0, 1e6}) specs.push_back(BoundarySpec::robin(aL));
    for (const auto& spec : specs) {
      CAPTURE(nx);
      CAPTURE(ny);
      CAPTURE(spec.alpha);
      const ModeBasis b = build_basis(g, spec, lin);
      Eigen::MatrixXd full(g.n_pixels(), g.n_pixels());
      full << b.G(), b.excluded_rows();
      CHECK(orthonormality_error(b.G()) < 1e-10);
      CHECK(orthonormality_error(full) < 1e-10);
    }
  }
}

TEST_CASE("transforms") {
  const Grid g(1.0, 1.0, 6, 5);
  const ModeBasis b = build_basis(g, BoundarySpec::neumann(), linear_dispersion(1.0));
  CHECK(transform_to_real(b, Eigen::VectorXd::Zero(b.n_modes())).isZero(0.0));
  Eigen::VectorXd e = Eigen::VectorXd::Zero(b.n_modes());
  e[3] = 1.0;
  CHECK((transform_to_real(b, e) - b.G().row(3).transpose()).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Eigen::VectorXd c(b.n_modes());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = normal(rng);
  CHECK((transform_to_modes(b, transform_to_real(b, c)) - c).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS_AS(transform_to_real(b, Eigen::VectorXd::Zero(3)), DomainError);
  CHECK_THROWS_AS(transform_to_modes(b, Eigen::VectorXd::Zero(3)), DomainError);
}

TEST_CASE("grid and boundary parsing") {
  CHECK_THROWS_AS(Grid(0.0, 1.0, 3, 3), DomainError);
  CHECK_THROWS_AS(Grid(1.0, 1.0, 0, 3), DomainError);
  const Grid g(2.0, 1.0, 4, 2);
  CHECK(g.cell_area() == 0.25);
  CHECK(g.index(3, 1) == 7);
  CHECK(g.x(0) == 0.25);
  CHECK(parse_boundary_kind("Robin") == BoundaryKind::Robin);
  CHECK(to_string(BoundaryKind::Neumann) == "neumann");
  CHECK_THROWS_AS(parse_boundary_kind("periodic"), DomainError);
}
