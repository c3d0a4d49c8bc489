#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "filminfo/physics.hpp"

namespace filminfo {

/// Rectangular pixel grid with cell-centred sample points.
///
/// Pixels are addressed either by (ix, iy) or by the flat index
/// p = ix + Nx * iy, which is the column ordering used by every matrix in the
/// library (mode-function rows, real-space covariance blocks, masks).
struct Grid {
  double Lx = 0.0;
  double Ly = 0.0;
  int Nx = 0;
  int Ny = 0;

  Grid() = default;
  Grid(double lx, double ly, int nx, int ny);

  double dx() const { return Lx / Nx; }
  double dy() const { return Ly / Ny; }
  /// Lattice cell area (epsilon).
  double cell_area() const { return dx() * dy(); }
  double x(int ix) const { return (ix + 0.5) * dx(); }
  double y(int iy) const { return (iy + 0.5) * dy(); }
  int n_pixels() const { return Nx * Ny; }
  int index(int ix, int iy) const { return ix + Nx * iy; }

  bool operator==(const Grid&) const = default;
};

enum class BoundaryKind { Dirichlet, Neumann, Robin };

std::string to_string(BoundaryKind kind);
BoundaryKind parse_boundary_kind(const std::string& text);

/// Boundary condition applied on every edge of the rectangle.
///
/// Robin uses n . grad(phi) = -alpha phi with alpha >= 0, so alpha -> 0 is
/// Neumann and alpha -> infinity is Dirichlet.
struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::Dirichlet;
  double alpha = 0.0;              ///< [1/m], Robin only
  bool include_zero_mode = false;  ///< Neumann only

  static BoundarySpec dirichlet() { return {BoundaryKind::Dirichlet, 0.0, false}; }
  static BoundarySpec neumann(bool zero_mode = false) {
    return {BoundaryKind::Neumann, 0.0, zero_mode};
  }
  static BoundarySpec robin(double alpha) { return {BoundaryKind::Robin, alpha, false}; }
};

/// Lowest N admissible wavenumbers of the 1D Helmholtz problem on [0, L].
///
/// Dirichlet: m pi / L for m = 1..N. Neumann: m pi / L for m = 0..N-1 (the
/// leading 0 is the zero mode). Robin: the N smallest positive roots of
/// tan(kL) = 2 alpha k / (k^2 - alpha^2), one per interval ((m-1) pi/L, m pi/L].
std::vector<double> solve_wavenumbers_1d(const BoundarySpec& boundary, double L, int N);

/// Orthonormal sampled 1D mode vectors, one row per wavenumber of
/// solve_wavenumbers_1d (rows ordered as the wavenumbers).
Eigen::MatrixXd sampled_modes_1d(const BoundarySpec& boundary, double L, int N,
                                 const std::vector<double>& wavenumbers);

struct Mode {
  int mx = 0;  ///< branch index along x
  int my = 0;  ///< branch index along y
  double kx = 0.0;
  double ky = 0.0;
  double k = 0.0;
  double omega = 0.0;
};

/// Solved Helmholtz spectrum on a grid.
///
/// G holds one row per retained mode and one column per pixel; rows are
/// sqrt(epsilon) g_m(x_i) and satisfy G G^T = I. Modes dropped from the
/// spectrum (the Neumann zero mode) are kept in `excluded` so callers can
/// complete the basis when they need the full pixel space.
class ModeBasis {
 public:
  ModeBasis(Grid grid, BoundarySpec boundary, std::vector<Mode> modes, Eigen::MatrixXd G,
            std::vector<Mode> excluded, Eigen::MatrixXd excluded_rows);

  const Grid& grid() const { return grid_; }
  const BoundarySpec& boundary() const { return boundary_; }
  const std::vector<Mode>& modes() const { return modes_; }
  const Eigen::MatrixXd& G() const { return G_; }
  const std::vector<Mode>& excluded_modes() const { return excluded_; }
  const Eigen::MatrixXd& excluded_rows() const { return excluded_rows_; }

  std::size_t n_modes() const { return modes_.size(); }
  int n_pixels() const { return grid_.n_pixels(); }
  Eigen::VectorXd omegas() const;

 private:
  Grid grid_;
  BoundarySpec boundary_;
  std::vector<Mode> modes_;
  Eigen::MatrixXd G_;
  std::vector<Mode> excluded_;
  Eigen::MatrixXd excluded_rows_;
};

/// Tensor-product basis for the grid. Modes are ordered by ascending k, ties
/// broken by (mx, my). Every retained mode must have omega > 0.
ModeBasis build_basis(const Grid& grid, const BoundarySpec& boundary,
                      const Dispersion& dispersion);

/// Mode coefficients -> pixel field (G^T c).
Eigen::VectorXd transform_to_real(const ModeBasis& basis, const Eigen::VectorXd& coefficients);
/// Pixel field -> mode coefficients (G f).
Eigen::VectorXd transform_to_modes(const ModeBasis& basis, const Eigen::VectorXd& field);

}  // namespace filminfo
