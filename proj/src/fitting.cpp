#include "filminfo/fitting.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "filminfo/errors.hpp"

namespace filminfo {

namespace {

constexpr int kMaxEvaluations = 2000;
constexpr double kStepTolerance = 1e-12;
constexpr double kMinCalabresePoints = 5;
constexpr double kMinAreaPoints = 4;

struct Data {
  std::vector<double> u;  // (N / pi) sin(pi f)
  std::vector<double> y;
};

double sine_term(double fraction, double n_total) {
  return n_total / std::numbers::pi * std::sin(std::numbers::pi * fraction);
}

// Sum of squared residuals; +inf outside the domain u + kappa2 > 0.
double ssr(const Data& data, const Eigen::Vector3d& k) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < data.u.size(); ++i) {
    const double arg = data.u[i] + k[1];
    if (!(arg > 0.0)) return std::numeric_limits<double>::infinity();
    const double r = k[0] * std::log(arg) + k[2] - data.y[i];
    sum += static_cast<long double>(r) * r;
  }
  return static_cast<double>(sum);
}

// Residuals r_i = kappa1 ln(u_i + kappa2) + kappa3 - y_i. Points with
// u_i + kappa2 <= 0 get a huge residual so the solver rejects the step.
struct CalabreseResiduals {
  const Data& data;
  int values() const { return static_cast<int>(data.u.size()); }
  int inputs() const { return 3; }
  int operator()(const Eigen::VectorXd& k, Eigen::VectorXd& r) const {
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const double arg = data.u[static_cast<std::size_t>(i)] + k[1];
      r[i] = arg > 0.0 ? k[0] * std::log(arg) + k[2] - data.y[static_cast<std::size_t>(i)] : 1e100;
    }
    return 0;
  }
  int df(const Eigen::VectorXd& k, Eigen::MatrixXd& J) const {
    for (Eigen::Index i = 0; i < J.rows(); ++i) {
      const double arg = std::max(data.u[static_cast<std::size_t>(i)] + k[1], 1e-300);
      J(i, 0) = std::log(arg);
      J(i, 1) = k[0] / arg;
      J(i, 2) = 1.0;
    }
    return 0;
  }
};

struct LmResult {
  Eigen::Vector3d k;
  double ssr;
  int iterations;
  bool converged;
};

LmResult levenberg_marquardt(const Data& data, const Eigen::Vector3d& start) {
  CalabreseResiduals f{data};
  Eigen::LevenbergMarquardt<CalabreseResiduals> lm(f);
  lm.parameters.maxfev = kMaxEvaluations;
  lm.parameters.xtol = kStepTolerance;
  lm.parameters.ftol = kStepTolerance;
  Eigen::VectorXd k = start;
  const auto status = lm.minimize(k);
  using Status = Eigen::LevenbergMarquardtSpace::Status;
  const bool converged = status == Status::RelativeReductionTooSmall ||
                         status == Status::RelativeErrorTooSmall ||
                         status == Status::RelativeErrorAndReductionTooSmall ||
                         status == Status::CosinusTooSmall;
  const Eigen::Vector3d best = k;
  const double at_best = ssr(data, best);
  const double at_start = ssr(data, start);
  if (!(at_best <= at_start)) return {start, at_start, static_cast<int>(lm.iter), false};
  return {best, at_best, static_cast<int>(lm.iter), converged};
}

Data sorted_data(std::span<const double> fraction, std::span<const double> mi, double n_total) {
  if (fraction.size() != mi.size()) throw DomainError("calabrese_fit: size mismatch");
  if (fraction.size() < kMinCalabresePoints) {
    throw DomainError("calabrese_fit: need at least 5 points, got " + std::to_string(fraction.size()));
  }
  if (!(n_total > 0.0)) throw DomainError("calabrese_fit: n_total must be > 0");
  std::vector<std::size_t> order(fraction.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fraction[a] != fraction[b] ? fraction[a] < fraction[b] : mi[a] < mi[b];
  });
  Data d;
  for (std::size_t i : order) {
    if (!std::isfinite(fraction[i]) || !std::isfinite(mi[i]) || fraction[i] <= 0.0 ||
        fraction[i] >= 1.0) {
      throw DomainError("calabrese_fit: fractions must lie in (0, 1) and values be finite");
    }
    d.u.push_back(sine_term(fraction[i], n_total));
    d.y.push_back(mi[i]);
  }
  return d;
}

}  // namespace

double calabrese_model(double fraction, double n_total, double kappa1, double kappa2,
                       double kappa3) {
  return kappa1 * std::log(sine_term(fraction, n_total) + kappa2) + kappa3;
}

CalabreseFit calabrese_fit(std::span<const double> fraction, std::span<const double> mi,
                           double n_total) {
  const Data data = sorted_data(fraction, mi, n_total);
  const double n = static_cast<double>(data.y.size());
  const double y_mean = std::accumulate(data.y.begin(), data.y.end(), 0.0) / n;

  CalabreseFit best;
  double best_ssr = std::numeric_limits<double>::infinity();
  double best_start = std::numeric_limits<double>::infinity();
  for (double k1 : {0.1, 1.0, 10.0}) {
    for (double k2 : {0.0, 1.0, 10.0}) {
      double log_mean = 0.0;
      for (double u : data.u) log_mean += std::log(u + k2);
      log_mean /= n;
      const Eigen::Vector3d start(k1, k2, y_mean - k1 * log_mean);
      const double s0 = ssr(data, start);
      if (!std::isfinite(s0)) continue;
      best_start = std::min(best_start, s0);
      const LmResult r = levenberg_marquardt(data, start);
      if (r.ssr < best_ssr) {
        best_ssr = r.ssr;
        best.kappa1 = r.k[0];
        best.kappa2 = r.k[1];
        best.kappa3 = r.k[2];
        best.converged = r.converged;
        best.iterations = r.iterations;
      }
    }
  }
  if (!std::isfinite(best_ssr)) throw NumericalError("calabrese_fit: no admissible start");
  best.rms = std::sqrt(best_ssr / n);
  best.start_rms = std::sqrt(best_start / n);
  return best;
}

CalabreseFit calabrese_fit(const SweepResult& sweep) {
  if (sweep.protocol != "volume") throw DomainError("calabrese_fit: needs a volume sweep");
  const double n_total = sweep.grid.n_pixels();
  std::vector<double> f;
  std::vector<double> y;
  for (const auto& p : sweep.points) {
    f.push_back(p.stats_A.pixels / n_total);
    y.push_back(p.mi);
  }
  return calabrese_fit(f, y, n_total);
}

AreaLawFit area_law_fit(std::span<const double> area, std::span<const double> mi) {
  if (area.size() != mi.size()) throw DomainError("area_law_fit: size mismatch");
  if (area.size() < kMinAreaPoints) {
    throw DomainError("area_law_fit: need at least 4 points, got " + std::to_string(area.size()));
  }
  const auto m = static_cast<Eigen::Index>(area.size());
  const double x_mean = std::accumulate(area.begin(), area.end(), 0.0) / m;
  double x_scale = 0.0;
  for (double a : area) x_scale = std::max(x_scale, std::abs(a - x_mean));
  if (!(x_scale > 0.0)) throw DomainError("area_law_fit: all boundary areas are equal");

  Eigen::MatrixXd X(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = (area[static_cast<std::size_t>(i)] - x_mean) / x_scale;
    X(i, 0) = 1.0;
    X(i, 1) = t;
    X(i, 2) = t * t;
    y[i] = mi[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd X1 = X.leftCols(2);
  const Eigen::VectorXd b1 = X1.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd b2 = X.colPivHouseholderQr().solve(y);
  const double sse_lin = (y - X1 * b1).squaredNorm();
  const double sse_quad = (y - X * b2).squaredNorm();
  const double sst = (y.array() - y.mean()).square().sum();

  AreaLawFit fit;
  fit.slope = b1[1] / x_scale;
  fit.intercept = b1[0] - fit.slope * x_mean;
  fit.r2 = sst > 0.0 ? 1.0 - sse_lin / sst : 1.0;
  const double floor = 1e-24 * std::max(1.0, y.squaredNorm());
  if (sse_lin <= floor) {
    fit.quadratic_gain = 1.0;
  } else {
    fit.quadratic_gain = sse_lin / std::max(sse_quad, floor);
  }
  fit.superlinear = fit.quadratic_gain > 10.0;
  return fit;
}

AreaLawFit area_law_fit(const SweepResult& sweep) {
  if (sweep.protocol != "area") throw DomainError("area_law_fit: needs an area sweep");
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : sweep.points) {
    x.push_back(p.stats_A.boundary_area);
    y.push_back(p.mi);
  }
  return area_law_fit(x, y);
}

}  // namespace filminfo
