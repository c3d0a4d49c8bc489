#include "filminfo/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

#include "filminfo/errors.hpp"
#include "filminfo/regions.hpp"

namespace filminfo {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kMiClamp = 1e-8;

double block_scale(const Eigen::MatrixXd& m) {
  const double s = m.cwiseAbs().maxCoeff();
  return s > 0.0 ? s : 1.0;
}

void check_symmetric(const Eigen::MatrixXd& data) {
  const Eigen::Index n = data.rows() / 2;
  auto check = [&](Eigen::Index r0, Eigen::Index c0, const char* name) {
    const Eigen::MatrixXd block = data.block(r0, c0, n, n);
    const Eigen::MatrixXd mirror = data.block(c0, r0, n, n).transpose();
    const double scale = std::max(block_scale(block), block_scale(mirror));
    const double err = (block - mirror).cwiseAbs().maxCoeff();
    if (err > kSymmetryTolerance * scale) {
      throw DomainError(std::string("covariance matrix is not symmetric in block ") + name +
                        " (max deviation " + std::to_string(err / scale) + " relative)");
    }
  };
  check(0, 0, "Q");
  check(n, n, "P");
  check(0, n, "R");
}

// Scalar symplectic rescaling q -> s q, p -> p / s that balances the traces
// of the Q and P blocks; the symplectic spectrum is unchanged.
Eigen::MatrixXd balanced(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows() / 2;
  const double tq = g.topLeftCorner(n, n).trace();
  const double tp = g.bottomRightCorner(n, n).trace();
  if (!(tq > 0.0) || !(tp > 0.0)) {
    throw UnphysicalCovariance("covariance has non-positive Q or P trace");
  }
  const double s2 = std::sqrt(tp / tq);
  Eigen::MatrixXd out = g;
  out.topLeftCorner(n, n) *= s2;
  out.bottomRightCorner(n, n) /= s2;
  return out;
}

Eigen::MatrixXd omega_times(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows() / 2;
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topRows(n) = g.bottomRows(n);
  out.bottomRows(n) = -g.topRows(n);
  return out;
}

std::vector<double> spectrum_cholesky(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows() / 2;
  const bool r_zero = g.topRightCorner(n, n).isZero(0.0);
  std::vector<double> nu;
  nu.reserve(static_cast<std::size_t>(n));
  if (r_zero) {
    Eigen::LLT<Eigen::MatrixXd> lq(g.topLeftCorner(n, n));
    Eigen::LLT<Eigen::MatrixXd> lp(g.bottomRightCorner(n, n));
    if (lq.info() != Eigen::Success || lp.info() != Eigen::Success) {
      throw UnphysicalCovariance("covariance matrix is not positive definite");
    }
    const Eigen::MatrixXd lql = lq.matrixL();
    const Eigen::MatrixXd lpl = lp.matrixL();
    const Eigen::MatrixXd cross = lql.transpose() * lpl;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(cross);
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) nu.push_back(s[i]);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) {
      throw UnphysicalCovariance("covariance matrix is not positive definite");
    }
    const Eigen::MatrixXd L = llt.matrixL();
    const Eigen::MatrixXd a = L.transpose() * omega_times(L);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    // Singular values of the antisymmetric form come in equal pairs.
    for (Eigen::Index i = 0; i < 2 * n; i += 2) nu.push_back(0.5 * (s[i] + s[i + 1]));
  }
  return nu;
}

std::vector<double> spectrum_phase_space(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows() / 2;
  Eigen::EigenSolver<Eigen::MatrixXd> es(omega_times(g), false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on Omega Gamma");
  std::vector<double> im;
  for (Eigen::Index i = 0; i < 2 * n; ++i) im.push_back(std::abs(es.eigenvalues()[i].imag()));
  std::sort(im.begin(), im.end());
  std::vector<double> nu;
  for (Eigen::Index i = 0; i < 2 * n; i += 2) nu.push_back(0.5 * (im[i] + im[i + 1]));
  return nu;
}

std::vector<double> spectrum_squared(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows() / 2;
  const Eigen::MatrixXd og = omega_times(g);
  const Eigen::MatrixXd sq = -(og * og);
  Eigen::EigenSolver<Eigen::MatrixXd> es(sq, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on -(Omega Gamma)^2");
  std::vector<double> re;
  for (Eigen::Index i = 0; i < 2 * n; ++i) re.push_back(es.eigenvalues()[i].real());
  std::sort(re.begin(), re.end());
  std::vector<double> nu;
  for (Eigen::Index i = 0; i < 2 * n; i += 2) {
    nu.push_back(std::sqrt(std::max(0.0, 0.5 * (re[i] + re[i + 1]))));
  }
  return nu;
}

Eigen::VectorXd prefactors_phi(const ModeBasis& basis, const DerivedParams& d) {
  Eigen::VectorXd w = basis.omegas();
  return (d.c3 / (d.K * w.array())).sqrt().matrix();
}

void require_basis(const CovarianceMatrix& gamma, const char* what) {
  if (!gamma.basis()) throw DomainError(std::string(what) + ": covariance has no mode basis");
  if (gamma.n() != static_cast<Eigen::Index>(gamma.basis()->n_modes()) &&
      gamma.n() != gamma.basis()->n_pixels()) {
    throw DomainError(std::string(what) + ": covariance size does not match its basis");
  }
}

}  // namespace

std::string to_string(Labelling labelling) {
  return labelling == Labelling::MomentumSpace ? "momentum" : "real";
}

Labelling parse_labelling(const std::string& text) {
  if (text == "momentum") return Labelling::MomentumSpace;
  if (text == "real") return Labelling::RealSpace;
  throw DomainError("unknown labelling '" + text + "'");
}

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd data, Labelling labelling,
                                   std::shared_ptr<const ModeBasis> basis)
    : data_(std::move(data)),
      labelling_(labelling),
      basis_(std::move(basis)),
      cache_(std::make_shared<Cache>()) {
  if (data_.rows() != data_.cols() || data_.rows() % 2 != 0 || data_.rows() == 0) {
    throw DomainError("covariance matrix must be square with even, non-zero dimension");
  }
  if (!data_.allFinite()) throw DomainError("covariance matrix has non-finite entries");
  check_symmetric(data_);
  data_ = 0.5 * (data_ + data_.transpose()).eval();
}

CovarianceMatrix CovarianceMatrix::from_blocks(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                                               const Eigen::MatrixXd& P, Labelling labelling,
                                               std::shared_ptr<const ModeBasis> basis) {
  const Eigen::Index n = Q.rows();
  if (Q.cols() != n || R.rows() != n || R.cols() != n || P.rows() != n || P.cols() != n) {
    throw DomainError("covariance blocks must all be n x n");
  }
  Eigen::MatrixXd g(2 * n, 2 * n);
  g << Q, R, R.transpose(), P;
  return CovarianceMatrix(std::move(g), labelling, std::move(basis));
}

double CovarianceMatrix::total_entropy() const {
  std::call_once(cache_->once, [this] { cache_->entropy = von_neumann_entropy(*this); });
  return cache_->entropy;
}

SymplecticSpectrum raw_symplectic_spectrum(const CovarianceMatrix& gamma, SpectrumRoute route) {
  const Eigen::MatrixXd g = balanced(gamma.data());
  std::vector<double> nu;
  switch (route) {
    case SpectrumRoute::Auto: nu = spectrum_cholesky(g); break;
    case SpectrumRoute::PhaseSpace: nu = spectrum_phase_space(g); break;
    case SpectrumRoute::Squared: nu = spectrum_squared(g); break;
  }
  std::sort(nu.begin(), nu.end());
  for (double v : nu) {
    if (!std::isfinite(v)) throw NumericalError("non-finite symplectic eigenvalue");
  }
  return {std::move(nu)};
}

SymplecticSpectrum symplectic_spectrum(const CovarianceMatrix& gamma, SpectrumRoute route) {
  std::vector<double> nu = raw_symplectic_spectrum(gamma, route).values;
  for (double& v : nu) {
    if (v < 0.5 - kNuFailTolerance) {
      throw UnphysicalCovariance("symplectic eigenvalue " + std::to_string(v) +
                                 " violates the uncertainty bound nu >= 1/2");
    }
    if (v < 0.5) v = 0.5;
  }
  return {std::move(nu)};
}

double mode_entropy(double nu) {
  const double x = nu - 0.5;
  if (x <= 0.0) return 0.0;
  return std::log1p(x) + x * std::log1p(1.0 / x);
}

double von_neumann_entropy(const SymplecticSpectrum& spectrum) {
  long double sum = 0.0L;
  for (double v : spectrum.values) sum += mode_entropy(v);
  return static_cast<double>(sum);
}

double von_neumann_entropy(const CovarianceMatrix& gamma) {
  return von_neumann_entropy(symplectic_spectrum(gamma));
}

CovarianceMatrix thermal_momentum_covariance(std::shared_ptr<const ModeBasis> basis, double T) {
  if (!basis) throw DomainError("thermal_momentum_covariance: null basis");
  if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("temperature must be >= 0");
  const Eigen::VectorXd w = basis->omegas();
  Eigen::VectorXd diag(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) diag[i] = bose_einstein(w[i], T) + 0.5;
  const Eigen::Index n = w.size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  g.diagonal().head(n) = diag;
  g.diagonal().tail(n) = diag;
  return CovarianceMatrix(std::move(g), Labelling::MomentumSpace, std::move(basis));
}

CovarianceMatrix to_real_space(const CovarianceMatrix& gamma, const DerivedParams& d) {
  if (gamma.labelling() != Labelling::MomentumSpace) {
    throw DomainError("to_real_space: covariance is not in momentum space");
  }
  require_basis(gamma, "to_real_space");
  const ModeBasis& basis = *gamma.basis();
  if (gamma.n() != static_cast<Eigen::Index>(basis.n_modes())) {
    throw DomainError("to_real_space: covariance size does not match the number of modes");
  }
  const Eigen::VectorXd dphi = prefactors_phi(basis, d);
  const Eigen::VectorXd deta = dphi.cwiseInverse();
  const Eigen::MatrixXd& G = basis.G();

  const Eigen::MatrixXd Aphi = dphi.asDiagonal() * G;
  const Eigen::MatrixXd Aeta = deta.asDiagonal() * G;
  Eigen::MatrixXd Q = Aphi.transpose() * gamma.Q() * Aphi;
  Eigen::MatrixXd P = Aeta.transpose() * gamma.P() * Aeta;
  Eigen::MatrixXd R = Aphi.transpose() * gamma.R() * Aeta;

  if (basis.excluded_rows().rows() > 0) {
    const double w_ref = basis.omegas().minCoeff();
    const double sphi = d.c3 / (d.K * w_ref);
    const Eigen::MatrixXd& E = basis.excluded_rows();
    Q.noalias() += 0.5 * sphi * E.transpose() * E;
    P.noalias() += (0.5 / sphi) * E.transpose() * E;
  }
  Q = 0.5 * (Q + Q.transpose()).eval();
  P = 0.5 * (P + P.transpose()).eval();
  return CovarianceMatrix::from_blocks(Q, R, P, Labelling::RealSpace, gamma.basis());
}

CovarianceMatrix to_momentum_space(const CovarianceMatrix& gamma, const DerivedParams& d) {
  if (gamma.labelling() != Labelling::RealSpace) {
    throw DomainError("to_momentum_space: covariance is not in real space");
  }
  require_basis(gamma, "to_momentum_space");
  const ModeBasis& basis = *gamma.basis();
  if (gamma.n() != basis.n_pixels()) {
    throw DomainError("to_momentum_space: covariance size does not match the pixel count");
  }
  const Eigen::VectorXd dphi = prefactors_phi(basis, d);
  const Eigen::VectorXd deta = dphi.cwiseInverse();
  const Eigen::MatrixXd Bphi = deta.asDiagonal() * basis.G();
  const Eigen::MatrixXd Beta = dphi.asDiagonal() * basis.G();
  Eigen::MatrixXd Q = Bphi * gamma.Q() * Bphi.transpose();
  Eigen::MatrixXd P = Beta * gamma.P() * Beta.transpose();
  Eigen::MatrixXd R = Bphi * gamma.R() * Beta.transpose();
  Q = 0.5 * (Q + Q.transpose()).eval();
  P = 0.5 * (P + P.transpose()).eval();
  return CovarianceMatrix::from_blocks(Q, R, P, Labelling::MomentumSpace, gamma.basis());
}

CovarianceMatrix restrict(const CovarianceMatrix& gamma, std::span<const int> indices) {
  const Eigen::Index n = gamma.n();
  const auto m = static_cast<Eigen::Index>(indices.size());
  if (m == 0) throw DomainError("restrict: empty index set");
  std::vector<Eigen::Index> full;
  full.reserve(static_cast<std::size_t>(2 * m));
  for (int i : indices) {
    if (i < 0 || i >= n) throw DomainError("restrict: index " + std::to_string(i) + " out of range");
    full.push_back(i);
  }
  for (int i : indices) full.push_back(i + n);
  Eigen::MatrixXd sub = gamma.data()(full, full);
  return CovarianceMatrix(std::move(sub), gamma.labelling());
}

CovarianceMatrix restrict(const CovarianceMatrix& gamma, const RegionMask& mask) {
  if (gamma.labelling() != Labelling::RealSpace) {
    throw DomainError("restrict: pixel masks need a real-space covariance");
  }
  if (mask.grid().n_pixels() != gamma.n()) {
    throw DomainError("restrict: mask grid does not match the covariance size");
  }
  const std::vector<int> idx = mask.indices();
  return restrict(gamma, std::span<const int>(idx));
}

double subsystem_entropy(const CovarianceMatrix& gamma, std::span<const int> indices) {
  if (static_cast<Eigen::Index>(indices.size()) == gamma.n()) {
    std::vector<int> sorted(indices.begin(), indices.end());
    std::sort(sorted.begin(), sorted.end());
    bool identity = true;
    for (std::size_t i = 0; i < sorted.size(); ++i) identity = identity && sorted[i] == static_cast<int>(i);
    if (identity) return gamma.total_entropy();
  }
  return von_neumann_entropy(restrict(gamma, indices));
}

double mutual_information(const CovarianceMatrix& gamma, std::span<const int> A,
                          std::span<const int> B) {
  if (A.empty() || B.empty()) throw DomainError("mutual_information: empty subsystem");
  std::vector<int> a(A.begin(), A.end());
  std::vector<int> b(B.begin(), B.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<int> overlap;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(overlap));
  if (!overlap.empty()) throw DomainError("mutual_information: subsystems overlap");
  std::vector<int> ab;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(ab));

  const double sa = subsystem_entropy(gamma, a);
  const double sb = subsystem_entropy(gamma, b);
  const double sab = subsystem_entropy(gamma, ab);
  const double mi = static_cast<double>(static_cast<long double>(sa) + sb - sab);
  if (mi < 0.0) {
    const double tol = std::max(kMiClamp, 1e-12 * std::max(sa, sb));
    if (mi < -tol) {
      throw NumericalError("mutual information came out negative (" + std::to_string(mi) + ")");
    }
    return 0.0;
  }
  return mi;
}

double mutual_information(const CovarianceMatrix& gamma, const RegionMask& A, const RegionMask& B) {
  if (gamma.labelling() != Labelling::RealSpace) {
    throw DomainError("mutual_information: pixel masks need a real-space covariance");
  }
  if (A.grid().n_pixels() != gamma.n() || B.grid().n_pixels() != gamma.n()) {
    throw DomainError("mutual_information: mask grid does not match the covariance size");
  }
  if (!A.disjoint(B)) throw DomainError("mutual_information: regions overlap");
  const std::vector<int> a = A.indices();
  const std::vector<int> b = B.indices();
  return mutual_information(gamma, std::span<const int>(a), std::span<const int>(b));
}

}  // namespace filminfo
