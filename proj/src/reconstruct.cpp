#include "filminfo/reconstruct.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "filminfo/errors.hpp"

namespace filminfo {

namespace {

constexpr std::size_t kMaxSampleTimes = 200000;

Eigen::VectorXd quadrature_prefactor(const ModeBasis& basis, const DerivedParams& d,
                                     Quadrature q) {
  const Eigen::VectorXd w = basis.omegas();
  Eigen::VectorXd phi = (d.c3 / (d.K * w.array())).sqrt().matrix();
  return q == Quadrature::Field ? phi : phi.cwiseInverse().eval();
}

// Pixel-space offset contributed by modes missing from the basis, held in
// their minimum-uncertainty state (matches to_real_space).
Eigen::MatrixXd excluded_offset(const ModeBasis& basis, const DerivedParams& d, Quadrature q) {
  const int np = basis.n_pixels();
  if (basis.excluded_rows().rows() == 0) return Eigen::MatrixXd::Zero(np, np);
  const double w_ref = basis.omegas().minCoeff();
  const double sphi = d.c3 / (d.K * w_ref);
  const double scale = q == Quadrature::Field ? 0.5 * sphi : 0.5 / sphi;
  const Eigen::MatrixXd& E = basis.excluded_rows();
  return scale * E.transpose() * E;
}

// Mode-space single-quadrature correlator at time t from the t = 0 blocks.
Eigen::MatrixXd mode_correlator(const Eigen::MatrixXd& Qt, const Eigen::MatrixXd& Pt,
                                const Eigen::MatrixXd& Rt, const Eigen::VectorXd& c,
                                const Eigen::VectorXd& s, Quadrature q) {
  const Eigen::Index n = Qt.rows();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (q == Quadrature::Field) {
        m(i, j) = c[i] * c[j] * Qt(i, j) + s[i] * s[j] * Pt(i, j) + c[i] * s[j] * Rt(i, j) +
                  s[i] * c[j] * Rt(j, i);
      } else {
        m(i, j) = c[i] * c[j] * Pt(i, j) + s[i] * s[j] * Qt(i, j) - c[i] * s[j] * Rt(j, i) -
                  s[i] * c[j] * Rt(i, j);
      }
    }
  }
  return m;
}

Eigen::MatrixXd to_pixels(const ModeBasis& basis, const Eigen::VectorXd& pref,
                          const Eigen::MatrixXd& mode_matrix) {
  const Eigen::MatrixXd A = pref.asDiagonal() * basis.G();
  Eigen::MatrixXd out = A.transpose() * mode_matrix * A;
  return 0.5 * (out + out.transpose());
}

}  // namespace

std::string to_string(Quadrature quadrature) {
  return quadrature == Quadrature::Field ? "field" : "momentum";
}

Quadrature parse_quadrature(const std::string& text) {
  if (text == "field" || text == "phi") return Quadrature::Field;
  if (text == "momentum" || text == "eta") return Quadrature::Momentum;
  throw DomainError("unknown quadrature '" + text + "'");
}

void TwoPointSeries::validate_and_symmetrize() {
  if (times.empty()) throw DomainError("two-point series has no samples");
  if (times.size() != samples.size()) {
    throw DomainError("two-point series: " + std::to_string(times.size()) + " times but " +
                      std::to_string(samples.size()) + " samples");
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k])) throw DomainError("two-point series: non-finite time");
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw DomainError("two-point series: times must be strictly increasing");
    }
    const auto& m = samples[k];
    if (m.rows() != m.cols() || m.rows() != samples[0].rows()) {
      throw DomainError("two-point series: samples must be square and of equal size");
    }
    if (!m.allFinite()) throw DomainError("two-point series: non-finite sample entry");
    samples[k] = 0.5 * (m + m.transpose()).eval();
  }
}

CovarianceMatrix ReconstructionResult::covariance(std::shared_ptr<const ModeBasis> basis) const {
  return CovarianceMatrix::from_blocks(Qt, Rt, Pt, Labelling::MomentumSpace, std::move(basis));
}

CovarianceMatrix evolve_mode_covariance(const CovarianceMatrix& gamma0, double t) {
  if (gamma0.labelling() != Labelling::MomentumSpace || !gamma0.basis()) {
    throw DomainError("evolve_mode_covariance: needs a momentum-space covariance with a basis");
  }
  const Eigen::VectorXd w = gamma0.basis()->omegas();
  const Eigen::Index n = gamma0.n();
  if (w.size() != n) throw DomainError("evolve_mode_covariance: size does not match the basis");
  const Eigen::VectorXd c = (w * t).array().cos().matrix();
  const Eigen::VectorXd s = (w * t).array().sin().matrix();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  S.topLeftCorner(n, n).diagonal() = c;
  S.topRightCorner(n, n).diagonal() = s;
  S.bottomLeftCorner(n, n).diagonal() = -s;
  S.bottomRightCorner(n, n).diagonal() = c;
  Eigen::MatrixXd g = S * gamma0.data() * S.transpose();
  g = 0.5 * (g + g.transpose()).eval();
  return CovarianceMatrix(std::move(g), Labelling::MomentumSpace, gamma0.basis());
}

std::vector<double> default_sample_times(const ModeBasis& basis, double degeneracy_tol) {
  std::vector<double> w(basis.n_modes());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = basis.modes()[i].omega;
  std::sort(w.begin(), w.end());
  const double w_max = w.back();
  double gap = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double g = w[i] - w[i - 1];
    if (g > degeneracy_tol * w[i] && (gap == 0.0 || g < gap)) gap = g;
  }
  if (gap == 0.0) gap = w.front();
  const double dt = std::numbers::pi / (4.0 * w_max);
  const double span = 2.0 * 2.0 * std::numbers::pi / gap;
  const auto n = static_cast<std::size_t>(std::ceil(span / dt)) + 1;
  if (n > kMaxSampleTimes) {
    throw DomainError("default_sample_times: " + std::to_string(n) +
                      " samples needed; reduce the mode count or set times explicitly");
  }
  std::vector<double> times(n);
  for (std::size_t k = 0; k < n; ++k) times[k] = static_cast<double>(k) * dt;
  return times;
}

TwoPointSeries synth_two_point(const CovarianceMatrix& gamma0, const ModeBasis& basis,
                               const DerivedParams& d, const std::vector<double>& times,
                               Quadrature quadrature, double noise_sigma, std::uint64_t seed) {
  if (gamma0.labelling() != Labelling::MomentumSpace) {
    throw DomainError("synth_two_point: gamma0 must be in momentum space");
  }
  if (gamma0.n() != static_cast<Eigen::Index>(basis.n_modes())) {
    throw DomainError("synth_two_point: covariance size does not match the basis");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw DomainError("synth_two_point: noise sigma must be >= 0");
  }
  const Eigen::VectorXd w = basis.omegas();
  const Eigen::VectorXd pref = quadrature_prefactor(basis, d, quadrature);
  const Eigen::MatrixXd offset = excluded_offset(basis, d, quadrature);
  const Eigen::MatrixXd Qt = gamma0.Q();
  const Eigen::MatrixXd Pt = gamma0.P();
  const Eigen::MatrixXd Rt = gamma0.R();

  TwoPointSeries series;
  series.quadrature = quadrature;
  series.times = times;
  series.noise_sigma = noise_sigma;
  series.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int np = basis.n_pixels();
  for (double t : times) {
    const Eigen::VectorXd c = (w * t).array().cos().matrix();
    const Eigen::VectorXd s = (w * t).array().sin().matrix();
    Eigen::MatrixXd sample = to_pixels(basis, pref, mode_correlator(Qt, Pt, Rt, c, s, quadrature));
    sample += offset;
    if (noise_sigma > 0.0) {
      for (int j = 0; j < np; ++j) {
        for (int i = 0; i <= j; ++i) {
          const double e = noise_sigma * normal(rng);
          sample(i, j) += e;
          if (i != j) sample(j, i) += e;
        }
      }
    }
    series.samples.push_back(std::move(sample));
  }
  series.validate_and_symmetrize();
  return series;
}

double mean_abs_signal(const TwoPointSeries& series) {
  long double sum = 0.0L;
  std::size_t count = 0;
  for (const auto& m : series.samples) {
    sum += m.cwiseAbs().sum();
    count += static_cast<std::size_t>(m.size());
  }
  return count == 0 ? 0.0 : static_cast<double>(sum / count);
}

ReconstructionResult fit_covariance(const TwoPointSeries& input, const ModeBasis& basis,
                                    const DerivedParams& d, const FitOptions& options) {
  TwoPointSeries series = input;
  series.validate_and_symmetrize();
  const int np = basis.n_pixels();
  if (series.samples[0].rows() != np) {
    throw DomainError("fit_covariance: samples are " + std::to_string(series.samples[0].rows()) +
                      " pixels wide, basis has " + std::to_string(np));
  }
  const auto n_all = static_cast<Eigen::Index>(basis.n_modes());
  Eigen::Index n_fit = n_all;
  if (options.max_modes) {
    if (*options.max_modes == 0) throw DomainError("fit_covariance: max_modes must be >= 1");
    n_fit = std::min<Eigen::Index>(n_all, static_cast<Eigen::Index>(*options.max_modes));
  }
  const Quadrature q = series.quadrature;
  const Eigen::VectorXd w = basis.omegas();
  const Eigen::VectorXd pref = quadrature_prefactor(basis, d, q);
  const Eigen::MatrixXd offset = excluded_offset(basis, d, q);
  const Eigen::MatrixXd proj = pref.cwiseInverse().asDiagonal() * basis.G();
  const std::size_t nt = series.times.size();

  // Mode-space data, one matrix per time.
  std::vector<Eigen::MatrixXd> modal(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    modal[k] = (proj * (series.samples[k] - offset) * proj.transpose()).topLeftCorner(n_fit, n_fit);
  }
  Eigen::MatrixXd C(static_cast<Eigen::Index>(nt), n_fit);
  Eigen::MatrixXd S(static_cast<Eigen::Index>(nt), n_fit);
  for (std::size_t k = 0; k < nt; ++k) {
    for (Eigen::Index m = 0; m < n_fit; ++m) {
      C(static_cast<Eigen::Index>(k), m) = std::cos(w[m] * series.times[k]);
      S(static_cast<Eigen::Index>(k), m) = std::sin(w[m] * series.times[k]);
    }
  }

  ReconstructionResult result;
  result.Qt = Eigen::MatrixXd::Zero(n_all, n_all);
  result.Pt = Eigen::MatrixXd::Zero(n_all, n_all);
  result.Rt = Eigen::MatrixXd::Zero(n_all, n_all);
  const double sign = q == Quadrature::Field ? 1.0 : -1.0;

  for (Eigen::Index m = 0; m < n_fit; ++m) {
    for (Eigen::Index n = m; n < n_fit; ++n) {
      const bool diagonal = m == n;
      const bool degenerate =
          !diagonal && std::abs(w[m] - w[n]) <= options.degeneracy_tol * std::max(w[m], w[n]);
      const int unknowns = (diagonal || degenerate) ? 3 : 4;
      const auto rows = static_cast<Eigen::Index>(nt);
      Eigen::MatrixXd A(rows, unknowns);
      Eigen::VectorXd y(rows);
      for (Eigen::Index k = 0; k < rows; ++k) {
        const double cc = C(k, m) * C(k, n);
        const double ss = S(k, m) * S(k, n);
        const double cs = C(k, m) * S(k, n);
        const double sc = S(k, m) * C(k, n);
        // Columns: the "diagonal" quadrature block, the conjugate block, then R~.
        A(k, 0) = cc;
        A(k, 1) = ss;
        if (unknowns == 4) {
          // field: cs R_mn + sc R_nm; momentum: -cs R_nm - sc R_mn
          A(k, 2) = q == Quadrature::Field ? cs : -sc;
          A(k, 3) = q == Quadrature::Field ? sc : -cs;
        } else if (diagonal) {
          A(k, 2) = sign * 2.0 * cs;
        } else {
          // Only R_mn + R_nm enters; its coefficient is cs = sc.
          A(k, 2) = sign * 0.5 * (cs + sc);
        }
        y[k] = 0.5 * (modal[static_cast<std::size_t>(k)](m, n) + modal[static_cast<std::size_t>(k)](n, m));
      }

      if (rows < unknowns) {
        throw NumericalError("fit_covariance: " + std::to_string(rows) +
                             " time samples cannot determine " + std::to_string(unknowns) +
                             " unknowns for mode pair (" + std::to_string(m) + "," +
                             std::to_string(n) + ")");
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& sv = svd.singularValues();
      const double smax = sv[0];
      const double smin = sv[sv.size() - 1];
      const double eps_rank = std::numeric_limits<double>::epsilon() * static_cast<double>(rows) * smax;
      if (!(smax > 0.0) || smin <= eps_rank) {
        throw NumericalError("fit_covariance: rank-deficient design for mode pair (" +
                             std::to_string(m) + "," + std::to_string(n) + ")");
      }
      const double cond = smax / smin;
      result.condition = std::max(result.condition, cond);
      Eigen::VectorXd x;
      if (cond <= options.condition_limit) {
        x = svd.solve(y);
      } else {
        const double lambda = options.ridge_scale * smax * smax;
        Eigen::MatrixXd normal = A.transpose() * A;
        normal.diagonal().array() += lambda;
        x = normal.ldlt().solve(A.transpose() * y);
      }

      const double first = x[0];
      const double second = x[1];
      double& qmn = result.Qt(m, n);
      double& pmn = result.Pt(m, n);
      if (q == Quadrature::Field) {
        qmn = first;
        pmn = second;
      } else {
        pmn = first;
        qmn = second;
      }
      result.Qt(n, m) = result.Qt(m, n);
      result.Pt(n, m) = result.Pt(m, n);
      if (unknowns == 4) {
        result.Rt(m, n) = x[2];
        result.Rt(n, m) = x[3];
      } else if (diagonal) {
        result.Rt(m, m) = x[2];
      } else {
        result.Rt(m, n) = 0.5 * x[2];
        result.Rt(n, m) = 0.5 * x[2];
        result.unidentifiable_pairs.emplace_back(static_cast<int>(m), static_cast<int>(n));
      }
    }
  }

  // Pixel-space residual of the fitted model.
  long double ss = 0.0L;
  std::size_t count = 0;
  for (std::size_t k = 0; k < nt; ++k) {
    const Eigen::VectorXd c = (w * series.times[k]).array().cos().matrix();
    const Eigen::VectorXd s = (w * series.times[k]).array().sin().matrix();
    const Eigen::MatrixXd model =
        to_pixels(basis, pref, mode_correlator(result.Qt, result.Pt, result.Rt, c, s, q)) + offset;
    ss += (series.samples[k] - model).squaredNorm();
    count += static_cast<std::size_t>(model.size());
  }
  result.residual_rms = static_cast<double>(std::sqrt(ss / count));
  return result;
}

double relative_frobenius_error(const ReconstructionResult& result, const CovarianceMatrix& truth,
                                bool identifiable_only) {
  const Eigen::Index n = result.Qt.rows();
  if (truth.n() != n || truth.labelling() != Labelling::MomentumSpace) {
    throw DomainError("relative_frobenius_error: truth must be a momentum-space covariance of the same size");
  }
  Eigen::MatrixXd est_r = result.Rt;
  Eigen::MatrixXd true_r = truth.R();
  if (identifiable_only) {
    for (const auto& [a, b] : result.unidentifiable_pairs) {
      const double es = 0.5 * (est_r(a, b) + est_r(b, a));
      const double ts = 0.5 * (true_r(a, b) + true_r(b, a));
      est_r(a, b) = est_r(b, a) = es;
      true_r(a, b) = true_r(b, a) = ts;
    }
  }
  const double num = (result.Qt - truth.Q()).squaredNorm() + (result.Pt - truth.P()).squaredNorm() +
                     2.0 * (est_r - true_r).squaredNorm();
  const double den = truth.Q().squaredNorm() + truth.P().squaredNorm() + 2.0 * true_r.squaredNorm();
  if (!(den > 0.0)) throw DomainError("relative_frobenius_error: truth has zero norm");
  return std::sqrt(num / den);
}

}  // namespace filminfo
