#include "filminfo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "filminfo/errors.hpp"

namespace filminfo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxBisection = 200;

// Pole-free Robin quantization function; its positive roots are those of
// tan(kL) = 2 alpha k / (k^2 - alpha^2).
double robin_residual(double k, double alpha, double L) {
  return (k * k - alpha * alpha) * std::sin(k * L) - 2.0 * alpha * k * std::cos(k * L);
}

double bisect_robin(double lo, double hi, double alpha, double L) {
  double f_lo = robin_residual(lo, alpha, L);
  const double f_hi = robin_residual(hi, alpha, L);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    throw NumericalError("Robin root not bracketed in (" + std::to_string(lo) + ", " +
                         std::to_string(hi) + ")");
  }
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    const double f_mid = robin_residual(mid, alpha, L);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  throw NumericalError("Robin bisection did not converge after 200 iterations");
}

void check_axis(double L, int N) {
  if (!(std::isfinite(L) && L > 0.0)) throw DomainError("axis length must be > 0");
  if (N < 1) throw DomainError("axis needs at least one pixel");
}

// Rows of Q^T from a Householder QR of the sampled modes, signs matched to
// the sampled rows so each output row stays aligned with its analytic mode.
Eigen::MatrixXd orthonormalize_rows(const Eigen::MatrixXd& sampled) {
  const Eigen::MatrixXd columns = sampled.transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(columns);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(columns.rows(), columns.cols());
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q.transpose();
}

}  // namespace

Grid::Grid(double lx, double ly, int nx, int ny) : Lx(lx), Ly(ly), Nx(nx), Ny(ny) {
  check_axis(Lx, Nx);
  check_axis(Ly, Ny);
}

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Neumann: return "neumann";
    case BoundaryKind::Robin: return "robin";
  }
  return "unknown";
}

BoundaryKind parse_boundary_kind(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "dirichlet") return BoundaryKind::Dirichlet;
  if (lower == "neumann") return BoundaryKind::Neumann;
  if (lower == "robin") return BoundaryKind::Robin;
  throw DomainError("unknown boundary kind '" + text + "'");
}

std::vector<double> solve_wavenumbers_1d(const BoundarySpec& boundary, double L, int N) {
  check_axis(L, N);
  std::vector<double> k(static_cast<std::size_t>(N));
  switch (boundary.kind) {
    case BoundaryKind::Dirichlet:
      for (int m = 1; m <= N; ++m) k[m - 1] = m * kPi / L;
      return k;
    case BoundaryKind::Neumann:
      for (int m = 0; m < N; ++m) k[m] = m * kPi / L;
      return k;
    case BoundaryKind::Robin:
      break;
  }

  const double alpha = boundary.alpha;
  if (!std::isfinite(alpha)) throw DomainError("Robin alpha must be finite");
  if (alpha < 0.0) {
    // A negative coefficient always admits a k^2 < 0 (tanh-branch) solution.
    throw DomainError("unstable Robin spectrum: alpha = " + std::to_string(alpha) +
                      " admits a bound state with k^2 < 0");
  }
  if (alpha == 0.0) return solve_wavenumbers_1d(BoundarySpec::neumann(), L, N);

  for (int m = 1; m <= N; ++m) {
    const double hi = m * kPi / L;
    // The first bracket starts at k = 0, which is a trivial root of the
    // pole-free residual; step just inside it.
    const double lo = m == 1 ? hi * 1e-12 : (m - 1) * kPi / L;
    k[m - 1] = bisect_robin(lo, hi, alpha, L);
  }
  return k;
}

Eigen::MatrixXd sampled_modes_1d(const BoundarySpec& boundary, double L, int N,
                                 const std::vector<double>& wavenumbers) {
  check_axis(L, N);
  if (wavenumbers.size() != static_cast<std::size_t>(N)) {
    throw DomainError("sampled_modes_1d: need exactly N wavenumbers");
  }
  Eigen::MatrixXd rows(N, N);
  const double dx = L / N;
  switch (boundary.kind) {
    case BoundaryKind::Dirichlet:
      // Orthonormal DST-II; the Nyquist row m = N carries the discrete 1/sqrt(N).
      for (int m = 1; m <= N; ++m) {
        const double scale = m == N ? std::sqrt(1.0 / N) : std::sqrt(2.0 / N);
        for (int i = 0; i < N; ++i) rows(m - 1, i) = scale * std::sin(kPi * m * (i + 0.5) / N);
      }
      return rows;
    case BoundaryKind::Neumann:
      // Orthonormal DCT-II.
      for (int m = 0; m < N; ++m) {
        const double scale = m == 0 ? std::sqrt(1.0 / N) : std::sqrt(2.0 / N);
        for (int i = 0; i < N; ++i) rows(m, i) = scale * std::cos(kPi * m * (i + 0.5) / N);
      }
      return rows;
    case BoundaryKind::Robin:
      break;
  }
  if (boundary.alpha == 0.0) return sampled_modes_1d(BoundarySpec::neumann(), L, N, wavenumbers);
  const double alpha = boundary.alpha;
  for (int m = 0; m < N; ++m) {
    const double k = wavenumbers[m];
    const double norm = std::hypot(k, alpha);
    for (int i = 0; i < N; ++i) {
      const double x = (i + 0.5) * dx;
      rows(m, i) = (k * std::cos(k * x) + alpha * std::sin(k * x)) / norm;
    }
  }
  return orthonormalize_rows(rows);
}

ModeBasis::ModeBasis(Grid grid, BoundarySpec boundary, std::vector<Mode> modes, Eigen::MatrixXd G,
                     std::vector<Mode> excluded, Eigen::MatrixXd excluded_rows)
    : grid_(grid),
      boundary_(boundary),
      modes_(std::move(modes)),
      G_(std::move(G)),
      excluded_(std::move(excluded)),
      excluded_rows_(std::move(excluded_rows)) {
  if (G_.rows() != static_cast<Eigen::Index>(modes_.size()) || G_.cols() != grid_.n_pixels()) {
    throw DomainError("ModeBasis: G must be n_modes x n_pixels");
  }
  if (excluded_rows_.rows() != static_cast<Eigen::Index>(excluded_.size()) ||
      (excluded_rows_.rows() > 0 && excluded_rows_.cols() != grid_.n_pixels())) {
    throw DomainError("ModeBasis: excluded rows do not match excluded modes");
  }
}

Eigen::VectorXd ModeBasis::omegas() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t i = 0; i < modes_.size(); ++i) w[static_cast<Eigen::Index>(i)] = modes_[i].omega;
  return w;
}

ModeBasis build_basis(const Grid& grid, const BoundarySpec& boundary, const Dispersion& dispersion) {
  check_axis(grid.Lx, grid.Nx);
  check_axis(grid.Ly, grid.Ny);
  const std::vector<double> kx = solve_wavenumbers_1d(boundary, grid.Lx, grid.Nx);
  const std::vector<double> ky = solve_wavenumbers_1d(boundary, grid.Ly, grid.Ny);
  const Eigen::MatrixXd Gx = sampled_modes_1d(boundary, grid.Lx, grid.Nx, kx);
  const Eigen::MatrixXd Gy = sampled_modes_1d(boundary, grid.Ly, grid.Ny, ky);

  // Branch labels follow the 1D conventions: Neumann starts at 0, the others at 1.
  const bool neumann_like = boundary.kind == BoundaryKind::Neumann ||
                            (boundary.kind == BoundaryKind::Robin && boundary.alpha == 0.0);
  const int offset = neumann_like ? 0 : 1;

  struct Candidate {
    Mode mode;
    int ax;
    int ay;
  };
  std::vector<Candidate> retained;
  std::vector<Candidate> dropped;
  for (int ax = 0; ax < grid.Nx; ++ax) {
    for (int ay = 0; ay < grid.Ny; ++ay) {
      Mode mode;
      mode.mx = ax + offset;
      mode.my = ay + offset;
      mode.kx = kx[ax];
      mode.ky = ky[ay];
      mode.k = std::hypot(mode.kx, mode.ky);
      const bool zero_mode = neumann_like && mode.k == 0.0;
      if (zero_mode && !boundary.include_zero_mode) {
        dropped.push_back({mode, ax, ay});
        continue;
      }
      mode.omega = dispersion(mode.k);
      if (!(mode.omega > 0.0) || !std::isfinite(mode.omega)) {
        throw DomainError("build_basis: retained mode (" + std::to_string(mode.mx) + "," +
                          std::to_string(mode.my) + ") has non-positive frequency");
      }
      retained.push_back({mode, ax, ay});
    }
  }
  if (retained.size() + dropped.size() != static_cast<std::size_t>(grid.n_pixels())) {
    throw NumericalError("build_basis: mode count does not match pixel count");
  }

  std::sort(retained.begin(), retained.end(), [](const Candidate& a, const Candidate& b) {
    if (a.mode.k != b.mode.k) return a.mode.k < b.mode.k;
    if (a.mode.mx != b.mode.mx) return a.mode.mx < b.mode.mx;
    return a.mode.my < b.mode.my;
  });

  auto fill_rows = [&](const std::vector<Candidate>& cands) {
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(cands.size()), grid.n_pixels());
    for (std::size_t r = 0; r < cands.size(); ++r) {
      const auto& c = cands[r];
      for (int iy = 0; iy < grid.Ny; ++iy) {
        for (int ix = 0; ix < grid.Nx; ++ix) {
          rows(static_cast<Eigen::Index>(r), grid.index(ix, iy)) = Gx(c.ax, ix) * Gy(c.ay, iy);
        }
      }
    }
    return rows;
  };

  std::vector<Mode> modes;
  modes.reserve(retained.size());
  for (const auto& c : retained) modes.push_back(c.mode);
  std::vector<Mode> excluded;
  for (const auto& c : dropped) excluded.push_back(c.mode);

  return ModeBasis(grid, boundary, std::move(modes), fill_rows(retained), std::move(excluded),
                   fill_rows(dropped));
}

Eigen::VectorXd transform_to_real(const ModeBasis& basis, const Eigen::VectorXd& coefficients) {
  if (coefficients.size() != static_cast<Eigen::Index>(basis.n_modes())) {
    throw DomainError("transform_to_real: expected " + std::to_string(basis.n_modes()) +
                      " coefficients, got " + std::to_string(coefficients.size()));
  }
  return basis.G().transpose() * coefficients;
}

Eigen::VectorXd transform_to_modes(const ModeBasis& basis, const Eigen::VectorXd& field) {
  if (field.size() != basis.n_pixels()) {
    throw DomainError("transform_to_modes: expected " + std::to_string(basis.n_pixels()) +
                      " pixel values, got " + std::to_string(field.size()));
  }
  return basis.G() * field;
}

}  // namespace filminfo
