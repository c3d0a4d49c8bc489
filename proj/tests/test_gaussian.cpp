#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "filminfo/errors.hpp"
#include "filminfo/gaussian.hpp"
#include "filminfo/regions.hpp"
#include "fock_oracle.hpp"

using namespace filminfo;

namespace {

std::shared_ptr<const ModeBasis> make_basis(const Grid& g, const BoundarySpec& b) {
  return std::make_shared<const ModeBasis>(build_basis(g, b, thin_film_dispersion(FilmParams{})));
}

CovarianceMatrix diag_state(const std::vector<double>& nu) {
  const auto n = static_cast<Eigen::Index>(nu.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) g(i, i) = g(n + i, n + i) = nu[static_cast<std::size_t>(i)];
  return CovarianceMatrix(g, Labelling::MomentumSpace);
}

// Random physical state: S diag(nu) S^T with S = passive * squeeze * passive.
CovarianceMatrix random_state(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) g(i, i) = g(n + i, n + i) = 0.5 + 3.0 * u(rng);
  // Passive (orthogonal symplectic) rotations sandwich a local squeeze.
  auto passive = [&] {
    Eigen::MatrixXd x(n, n), y(n, n);
    for (int i = 0; i < n * n; ++i) {
      x.data()[i] = normal(rng);
      y.data()[i] = normal(rng);
    }
    Eigen::MatrixXcd h = (x + x.transpose()).cast<std::complex<double>>() +
                         std::complex<double>(0, 1) * (y - y.transpose()).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::MatrixXcd U = es.eigenvectors();
    Eigen::MatrixXd O(2 * n, 2 * n);
    O << U.real(), -U.imag(), U.imag(), U.real();
    return O;
  };
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const double s = std::exp(u(rng) - 0.5);
    Z(i, i) = s;
    Z(n + i, n + i) = 1.0 / s;
  }
  const Eigen::MatrixXd S = passive() * Z * passive();
  Eigen::MatrixXd out = S * g * S.transpose();
  out = 0.5 * (out + out.transpose()).eval();
  return CovarianceMatrix(out, Labelling::MomentumSpace);
}

Eigen::MatrixXd two_mode_squeezer(double r) {
  const double c = std::cosh(r), s = std::sinh(r);
  Eigen::MatrixXd S(4, 4);
  // ordering (q_a, q_b, p_a, p_b)
  S << c, -s, 0, 0,
      -s, c, 0, 0,
       0, 0, c, s,
       0, 0, s, c;
  return S;
}

double naive_entropy(Eigen::MatrixXd g) {
  const Eigen::Index n = g.rows() / 2;
  const double s2 = std::sqrt(g.bottomRightCorner(n, n).trace() / g.topLeftCorner(n, n).trace());
  g.topLeftCorner(n, n) *= s2;
  g.bottomRightCorner(n, n) /= s2;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n).setIdentity();
  omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  Eigen::EigenSolver<Eigen::MatrixXd> es(omega * g);
  std::vector<double> nu;
  for (Eigen::Index i = 0; i < 2 * n; ++i) nu.push_back(std::abs(es.eigenvalues()[i].imag()));
  std::sort(nu.begin(), nu.end());
  double s = 0.0;
  for (Eigen::Index i = 0; i < 2 * n; i += 2) {
    const double v = nu[static_cast<std::size_t>(i)];
    s += (v + 0.5) * std::log(v + 0.5);
    if (v > 0.5 + 1e-12) s -= (v - 0.5) * std::log(v - 0.5);
  }
  return s;
}

}  // namespace

TEST_CASE("covariance construction checks") {
  CHECK_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Identity(3, 3), Labelling::RealSpace), DomainError);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  a(0, 1) = 0.1;
  CHECK_THROWS_AS(CovarianceMatrix(a, Labelling::RealSpace), DomainError);
  a(0, 1) = std::nan("");
  CHECK_THROWS_AS(CovarianceMatrix(a, Labelling::RealSpace), DomainError);
  CHECK(parse_labelling(to_string(Labelling::RealSpace)) == Labelling::RealSpace);
}

TEST_CASE("symplectic spectra of simple states") {
  const CovarianceMatrix vac = diag_state({0.5, 0.5, 0.5});
  for (double v : symplectic_spectrum(vac).values) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(von_neumann_entropy(vac) < 1e-13);

  Eigen::MatrixXd one(2, 2);
  one << 3.0, 0.0, 0.0, 0.75;
  const auto nu = symplectic_spectrum(CovarianceMatrix(one, Labelling::RealSpace)).values;
  REQUIRE(nu.size() == 1);
  CHECK(nu[0] == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(von_neumann_entropy(diag_state({1.5})) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(mode_entropy(0.5) == 0.0);

  Eigen::MatrixXd bad(2, 2);
  bad << 0.3, 0.0, 0.0, 0.3;
  CHECK_THROWS_AS(symplectic_spectrum(CovarianceMatrix(bad, Labelling::RealSpace)), UnphysicalCovariance);
  bad << 0.5 - 5e-10, 0.0, 0.0, 0.5;
  CHECK(symplectic_spectrum(CovarianceMatrix(bad, Labelling::RealSpace)).values[0] == 0.5);
}

TEST_CASE("spectrum routes agree on random states") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const CovarianceMatrix g = random_state(2, rng);
    const auto a = symplectic_spectrum(g, SpectrumRoute::Auto).values;
    const auto p = symplectic_spectrum(g, SpectrumRoute::PhaseSpace).values;
    const auto s = symplectic_spectrum(g, SpectrumRoute::Squared).values;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a[i] - p[i]) < 1e-10);
      CHECK(std::abs(s[i] - p[i]) < 1e-10);
    }
    CHECK(von_neumann_entropy(g) == doctest::Approx(naive_entropy(g.data())).epsilon(1e-10));
  }
}

TEST_CASE("thermal entropy against the Fock oracle") {
  for (double n : {0.5, 1.0, 5.0}) {
    const double fock = oracle::thermal_entropy_fock(n, 200);
    const double analytic = (n + 1.0) * std::log(n + 1.0) - n * std::log(n);
    CHECK(std::abs(von_neumann_entropy(diag_state({n + 0.5})) - fock) < 1e-8);
    CHECK(std::abs(analytic - fock) < 1e-8);
  }
  const double two = von_neumann_entropy(diag_state({1.5, 5.5}));
  CHECK(std::abs(two - oracle::thermal_entropy_fock(1.0, 200) - oracle::thermal_entropy_fock(5.0, 200)) < 1e-8);
}

TEST_CASE("two-mode squeezed thermal state against the Fock oracle") {
  const double na = 0.5, nb = 1.0, r = 0.4;
  const auto fock = oracle::two_mode_squeezed_thermal_fock(na, nb, r, 160);
  REQUIRE(fock.tail_mass < 1e-10);
  Eigen::MatrixXd g0 = Eigen::MatrixXd::Zero(4, 4);
  g0.diagonal() << na + 0.5, nb + 0.5, na + 0.5, nb + 0.5;
  const Eigen::MatrixXd S = two_mode_squeezer(r);
  const CovarianceMatrix g(S * g0 * S.transpose(), Labelling::RealSpace);
  const int a[] = {0};
  const int b[] = {1};
  CHECK(std::abs(subsystem_entropy(g, a) - fock.S_A) < 1e-6);
  CHECK(std::abs(subsystem_entropy(g, b) - fock.S_B) < 1e-6);
  CHECK(std::abs(g.total_entropy() - fock.S_AB) < 1e-6);
  CHECK(std::abs(mutual_information(g, a, b) - (fock.S_A + fock.S_B - fock.S_AB)) < 1e-6);
}

TEST_CASE("entropy additivity and symplectic invariance") {
  std::mt19937_64 rng(5);
  const CovarianceMatrix g1 = random_state(2, rng);
  const CovarianceMatrix g2 = random_state(3, rng);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(10, 10);
  std::vector<Eigen::Index> idx1 = {0, 1, 5, 6}, idx2 = {2, 3, 4, 7, 8, 9};
  sum(idx1, idx1) = g1.data();
  sum(idx2, idx2) = g2.data();
  const CovarianceMatrix g(sum, Labelling::MomentumSpace);
  CHECK(std::abs(von_neumann_entropy(g) - von_neumann_entropy(g1) - von_neumann_entropy(g2)) < 1e-10);

  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(5, 5);
  for (int i = 0; i < 25; ++i) a.data()[i] = normal(rng);
  const Eigen::MatrixXd O = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() * Eigen::MatrixXd::Identity(5, 5);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(10, 10);
  R.topLeftCorner(5, 5) = O;
  R.bottomRightCorner(5, 5) = O;
  const CovarianceMatrix rotated(R * sum * R.transpose(), Labelling::MomentumSpace);
  CHECK(std::abs(von_neumann_entropy(rotated) - von_neumann_entropy(g)) < 1e-9);
}

TEST_CASE("thermal momentum covariance") {
  const auto basis = make_basis(Grid(5e-3, 5e-3, 20, 20), BoundarySpec::neumann());
  const CovarianceMatrix vac = thermal_momentum_covariance(basis, 0.0);
  CHECK((vac.data() - 0.5 * Eigen::MatrixXd::Identity(798, 798)).cwiseAbs().maxCoeff() == 0.0);
  const CovarianceMatrix th = thermal_momentum_covariance(basis, 0.3);
  CHECK(th.n() == 399);
  CHECK(th.Q().maxCoeff() == doctest::Approx(5.06e8 + 0.5).epsilon(3e-3));
  CHECK(th.Q().maxCoeff() == th.Q()(0, 0));
  CHECK(th.R().isZero(0.0));
  CHECK_THROWS_AS(thermal_momentum_covariance(basis, -1.0), DomainError);
}

TEST_CASE("momentum-space product state has no mutual information") {
  const auto basis = make_basis(Grid(5e-3, 5e-3, 8, 8), BoundarySpec::dirichlet());
  const CovarianceMatrix th = thermal_momentum_covariance(basis, 0.3);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> a, b;
    for (int m = 0; m < th.n(); ++m) {
      const auto pick = rng() % 3;
      if (pick == 0) a.push_back(m);
      if (pick == 1) b.push_back(m);
    }
    if (a.empty() || b.empty()) continue;
    CHECK(mutual_information(th, a, b) <= 1e-10);
  }
}

TEST_CASE("real-space transform") {
  const DerivedParams d = derive_params(FilmParams{});
  for (const auto& bc : {BoundarySpec::dirichlet(), BoundarySpec::neumann(), BoundarySpec::robin(200.0)}) {
    const auto basis = make_basis(Grid(5e-3, 5e-3, 8, 8), bc);
    const CovarianceMatrix vac = to_real_space(thermal_momentum_covariance(basis, 0.0), d);
    CHECK(vac.labelling() == Labelling::RealSpace);
    for (double v : symplectic_spectrum(vac).values) CHECK(std::abs(v - 0.5) < 1e-9);

    const CovarianceMatrix th_k = thermal_momentum_covariance(basis, 0.3);
    const CovarianceMatrix th = to_real_space(th_k, d);
    CHECK(symplectic_spectrum(th).values.front() >= 0.5 - 1e-9);
    const CovarianceMatrix back = to_momentum_space(th, d);
    CHECK((back.data() - th_k.data()).norm() / th_k.data().norm() < 1e-9);
  }
  CHECK_THROWS_AS(to_real_space(CovarianceMatrix(Eigen::MatrixXd::Identity(2, 2), Labelling::MomentumSpace), d),
                  DomainError);
}

TEST_CASE("restriction and mutual information on pixel masks") {
  const DerivedParams d = derive_params(FilmParams{});
  const Grid grid(5e-3, 5e-3, 4, 4);
  const auto basis = make_basis(grid, BoundarySpec::dirichlet());
  const CovarianceMatrix g = to_real_space(thermal_momentum_covariance(basis, 0.3), d);

  CHECK((restrict(g, RegionMask::full(grid)).data() - g.data()).cwiseAbs().maxCoeff() == 0.0);
  RegionMask one(grid);
  one.set(2, 1);
  const CovarianceMatrix single = restrict(g, one);
  const int p = grid.index(2, 1);
  CHECK(single.data()(0, 0) == g.data()(p, p));
  CHECK(single.data()(1, 1) == g.data()(16 + p, 16 + p));
  CHECK(single.data()(0, 1) == g.data()(p, 16 + p));
  CHECK_THROWS_AS(restrict(g, RegionMask(grid)), DomainError);

  const RegionMask left = RegionMask::rectangle(grid, 0, 0, 2, 4);
  const RegionMask right = RegionMask::rectangle(grid, 2, 0, 2, 4);
  const double mi = mutual_information(g, left, right);

  // Independent evaluation on explicitly assembled sub-matrices.
  auto sub = [&](const std::vector<int>& px) {
    std::vector<Eigen::Index> rows;
    for (int i : px) rows.push_back(i);
    for (int i : px) rows.push_back(16 + i);
    return Eigen::MatrixXd(g.data()(rows, rows));
  };
  const auto a = left.indices(), b = right.indices();
  std::vector<int> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const double brute = naive_entropy(sub(a)) + naive_entropy(sub(b)) - naive_entropy(sub(ab));
  CHECK(mi == doctest::Approx(brute).epsilon(1e-6));
  CHECK(std::abs(mi - mutual_information(g, right, left)) < 1e-10);
  CHECK_THROWS_AS(mutual_information(g, left, left), DomainError);
}

TEST_CASE("mutual information is monotone under nested masks") {
  const DerivedParams d = derive_params(FilmParams{});
  const Grid grid(5e-3, 5e-3, 6, 6);
  const auto basis = make_basis(grid, BoundarySpec::neumann());
  const CovarianceMatrix g = to_real_space(thermal_momentum_covariance(basis, 0.3), d);
  const RegionMask B = RegionMask::rectangle(grid, 4, 0, 2, 6);
  double prev = 0.0;
  RegionMask A(grid);
  for (int iy = 0; iy < 6; ++iy) {
    for (int ix = 0; ix < 3; ++ix) {
      A.set(ix, iy);
      const double mi = mutual_information(g, A, B);
      CHECK(mi >= prev - 1e-8);
      prev = mi;
    }
  }
}

TEST_CASE("pure state identity") {
  const DerivedParams d = derive_params(FilmParams{});
  const Grid grid(5e-3, 5e-3, 6, 6);
  for (const auto& bc : {BoundarySpec::dirichlet(), BoundarySpec::neumann()}) {
    const CovarianceMatrix g = to_real_space(thermal_momentum_covariance(make_basis(grid, bc), 0.0), d);
    const RegionMask A = RegionMask::rectangle(grid, 1, 1, 3, 2);
    const RegionMask B = ~A;
    CHECK(std::abs(mutual_information(g, A, B) - 2.0 * von_neumann_entropy(restrict(g, A))) < 1e-8);
  }
}

TEST_CASE("total entropy cache is shared across copies") {
  const CovarianceMatrix g = diag_state({1.5, 2.5});
  const CovarianceMatrix copy = g;
  const double s = copy.total_entropy();
  CHECK(g.total_entropy() == s);
  const int all[] = {1, 0};
  CHECK(subsystem_entropy(g, all) == s);
}
