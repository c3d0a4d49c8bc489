#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "filminfo/geometry.hpp"

namespace filminfo {

class CovarianceMatrix;

/// Boolean pixel mask over a grid. Pixels use the grid's flat index.
class RegionMask {
 public:
  RegionMask() = default;
  explicit RegionMask(Grid grid);
  RegionMask(Grid grid, std::vector<std::uint8_t> pixels);

  /// Pixels with x0 <= ix < x0 + w and y0 <= iy < y0 + h.
  static RegionMask rectangle(const Grid& grid, int x0, int y0, int w, int h);
  static RegionMask full(const Grid& grid);

  const Grid& grid() const { return grid_; }
  bool at(int ix, int iy) const;
  void set(int ix, int iy, bool value = true);

  int count() const;
  bool empty() const { return count() == 0; }
  /// Pixel indices in ascending order.
  std::vector<int> indices() const;

  /// count * epsilon [m^2].
  double volume() const;
  /// Length of edges between a masked pixel and an unmasked or exterior
  /// pixel, 4-connectivity [m].
  double boundary_area() const;
  /// Convex plus concave corners of the outline; a diagonal (saddle) vertex
  /// counts twice.
  int corner_count() const;

  bool disjoint(const RegionMask& other) const;
  RegionMask operator|(const RegionMask& other) const;
  RegionMask operator&(const RegionMask& other) const;
  RegionMask operator~() const;
  /// Pixels within Chebyshev distance `radius` of the mask (mask included).
  RegionMask dilate(int radius) const;
  /// Pixels of the outermost ring of the grid.
  static RegionMask outer_ring(const Grid& grid);

  /// "NxxNy:r0,r1,..." with alternating unset/set run lengths over the flat
  /// index, starting with an unset run (possibly 0).
  std::string to_rle() const;
  static RegionMask from_rle(const Grid& grid, const std::string& text);

  bool operator==(const RegionMask&) const = default;

 private:
  void check_compatible(const RegionMask& other) const;

  Grid grid_;
  std::vector<std::uint8_t> pixels_;
};

struct RegionStats {
  int pixels = 0;
  double volume = 0.0;
  double boundary_area = 0.0;
  int corners = 0;
};

RegionStats stats(const RegionMask& mask);

/// One (A, B) bipartition of a sweep protocol.
struct RegionPair {
  RegionMask A;
  RegionMask B;
  int divider = -1;  ///< volume sweeps: first column not in A
  int width = 0;     ///< area sweeps: rectangle extent along x
  int height = 0;    ///< area sweeps: rectangle extent along y
};

/// Vertical-divider bipartitions with constant interface length. A holds the
/// columns left of the divider, B the columns from divider + buffer onward.
/// With include_cell_boundary false the outer pixel ring belongs to neither.
std::vector<RegionPair> volume_sweep(const Grid& grid, int buffer, bool include_cell_boundary);

/// Every axis-aligned rectangle of exactly fixed_volume pixels that fits inside
/// the usable part of the grid, centred. The buffer ring may overlap pixels
/// outside the usable part; B must be non-empty.
std::vector<RegionPair> rectangle_family(const Grid& grid, int fixed_volume,
                                         bool include_cell_boundary, int buffer = 1);

/// One rectangle per distinct perimeter (the w <= h orientation), ordered by
/// increasing perimeter. B is the usable grid minus A dilated by the buffer.
std::vector<RegionPair> area_sweep(const Grid& grid, int fixed_volume, bool include_cell_boundary,
                                   int buffer = 1);

struct SweepPoint {
  double abscissa = 0.0;  ///< subsystem volume [m^2] or boundary area [m]
  double mi = 0.0;        ///< nats
  RegionStats stats_A;
  RegionPair regions;
};

struct SweepResult {
  std::string protocol;  ///< "volume" or "area"
  bool include_cell_boundary = true;
  int buffer = 1;
  Grid grid;
  std::vector<SweepPoint> points;
};

SweepResult run_volume_sweep(const CovarianceMatrix& gamma, const Grid& grid, int buffer,
                             bool include_cell_boundary);
SweepResult run_area_sweep(const CovarianceMatrix& gamma, const Grid& grid, int fixed_volume,
                           bool include_cell_boundary, int buffer = 1);

/// Per-pixel I({p} : interior minus p), interior = grid minus outer ring.
/// Ring pixels are NaN. Result is indexed (ix, iy).
Eigen::MatrixXd mi_map(const CovarianceMatrix& gamma, const Grid& grid);

}  // namespace filminfo
