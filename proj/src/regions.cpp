#include "filminfo/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "filminfo/errors.hpp"
#include "filminfo/gaussian.hpp"
#include "filminfo/parallel.hpp"

namespace filminfo {

RegionMask::RegionMask(Grid grid)
    : grid_(grid), pixels_(static_cast<std::size_t>(grid.n_pixels()), 0) {}

RegionMask::RegionMask(Grid grid, std::vector<std::uint8_t> pixels)
    : grid_(grid), pixels_(std::move(pixels)) {
  if (pixels_.size() != static_cast<std::size_t>(grid_.n_pixels())) {
    throw DomainError("RegionMask: pixel vector does not match the grid");
  }
  for (auto& p : pixels_) p = p ? 1 : 0;
}

RegionMask RegionMask::rectangle(const Grid& grid, int x0, int y0, int w, int h) {
  if (w < 0 || h < 0 || x0 < 0 || y0 < 0 || x0 + w > grid.Nx || y0 + h > grid.Ny) {
    throw DomainError("RegionMask::rectangle: rectangle does not fit in the grid");
  }
  RegionMask m(grid);
  for (int iy = y0; iy < y0 + h; ++iy) {
    for (int ix = x0; ix < x0 + w; ++ix) m.set(ix, iy);
  }
  return m;
}

RegionMask RegionMask::full(const Grid& grid) {
  return RegionMask(grid, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.n_pixels()), 1));
}

RegionMask RegionMask::outer_ring(const Grid& grid) {
  RegionMask m(grid);
  for (int iy = 0; iy < grid.Ny; ++iy) {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      if (ix == 0 || iy == 0 || ix == grid.Nx - 1 || iy == grid.Ny - 1) m.set(ix, iy);
    }
  }
  return m;
}

bool RegionMask::at(int ix, int iy) const {
  if (ix < 0 || iy < 0 || ix >= grid_.Nx || iy >= grid_.Ny) return false;
  return pixels_[static_cast<std::size_t>(grid_.index(ix, iy))] != 0;
}

void RegionMask::set(int ix, int iy, bool value) {
  if (ix < 0 || iy < 0 || ix >= grid_.Nx || iy >= grid_.Ny) {
    throw DomainError("RegionMask::set: pixel outside the grid");
  }
  pixels_[static_cast<std::size_t>(grid_.index(ix, iy))] = value ? 1 : 0;
}

int RegionMask::count() const {
  return static_cast<int>(std::count(pixels_.begin(), pixels_.end(), 1));
}

std::vector<int> RegionMask::indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    if (pixels_[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

double RegionMask::volume() const { return count() * grid_.cell_area(); }

double RegionMask::boundary_area() const {
  long vertical = 0;    // edges between x-neighbours, each of length dy
  long horizontal = 0;  // edges between y-neighbours, each of length dx
  for (int iy = 0; iy < grid_.Ny; ++iy) {
    for (int ix = 0; ix < grid_.Nx; ++ix) {
      if (!at(ix, iy)) continue;
      if (!at(ix - 1, iy)) ++vertical;
      if (!at(ix + 1, iy)) ++vertical;
      if (!at(ix, iy - 1)) ++horizontal;
      if (!at(ix, iy + 1)) ++horizontal;
    }
  }
  return vertical * grid_.dy() + horizontal * grid_.dx();
}

int RegionMask::corner_count() const {
  int corners = 0;
  for (int vy = 0; vy <= grid_.Ny; ++vy) {
    for (int vx = 0; vx <= grid_.Nx; ++vx) {
      const bool a = at(vx - 1, vy - 1);
      const bool b = at(vx, vy - 1);
      const bool c = at(vx - 1, vy);
      const bool d = at(vx, vy);
      const int n = a + b + c + d;
      if (n == 1 || n == 3) {
        corners += 1;
      } else if (n == 2 && a == d) {
        corners += 2;
      }
    }
  }
  return corners;
}

void RegionMask::check_compatible(const RegionMask& other) const {
  if (!(grid_ == other.grid_)) throw DomainError("RegionMask: masks live on different grids");
}

bool RegionMask::disjoint(const RegionMask& other) const {
  check_compatible(other);
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    if (pixels_[i] && other.pixels_[i]) return false;
  }
  return true;
}

RegionMask RegionMask::operator|(const RegionMask& other) const {
  check_compatible(other);
  RegionMask out(grid_);
  for (std::size_t i = 0; i < pixels_.size(); ++i) out.pixels_[i] = pixels_[i] | other.pixels_[i];
  return out;
}

RegionMask RegionMask::operator&(const RegionMask& other) const {
  check_compatible(other);
  RegionMask out(grid_);
  for (std::size_t i = 0; i < pixels_.size(); ++i) out.pixels_[i] = pixels_[i] & other.pixels_[i];
  return out;
}

RegionMask RegionMask::operator~() const {
  RegionMask out(grid_);
  for (std::size_t i = 0; i < pixels_.size(); ++i) out.pixels_[i] = pixels_[i] ? 0 : 1;
  return out;
}

RegionMask RegionMask::dilate(int radius) const {
  if (radius < 0) throw DomainError("RegionMask::dilate: negative radius");
  RegionMask out(grid_);
  for (int iy = 0; iy < grid_.Ny; ++iy) {
    for (int ix = 0; ix < grid_.Nx; ++ix) {
      if (!at(ix, iy)) continue;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const int x = ix + dx;
          const int y = iy + dy;
          if (x >= 0 && y >= 0 && x < grid_.Nx && y < grid_.Ny) out.set(x, y);
        }
      }
    }
  }
  return out;
}

std::string RegionMask::to_rle() const {
  std::ostringstream os;
  os << grid_.Nx << "x" << grid_.Ny << ":";
  std::uint8_t current = 0;
  long run = 0;
  bool first = true;
  for (auto p : pixels_) {
    if (p == current) {
      ++run;
      continue;
    }
    os << (first ? "" : ",") << run;
    first = false;
    current = p;
    run = 1;
  }
  os << (first ? "" : ",") << run;
  return os.str();
}

RegionMask RegionMask::from_rle(const Grid& grid, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("RLE mask: missing ':'");
  const std::string dims = text.substr(0, colon);
  const std::string expected = std::to_string(grid.Nx) + "x" + std::to_string(grid.Ny);
  if (dims != expected) {
    throw DomainError("RLE mask: dimensions " + dims + " do not match grid " + expected);
  }
  std::vector<std::uint8_t> pixels;
  pixels.reserve(static_cast<std::size_t>(grid.n_pixels()));
  std::istringstream runs(text.substr(colon + 1));
  std::string token;
  std::uint8_t value = 0;
  while (std::getline(runs, token, ',')) {
    std::size_t used = 0;
    long run = 0;
    try {
      run = std::stol(token, &used);
    } catch (const std::exception&) {
      throw DomainError("RLE mask: bad run length '" + token + "'");
    }
    if (used != token.size() || run < 0) throw DomainError("RLE mask: bad run length '" + token + "'");
    if (pixels.size() + static_cast<std::size_t>(run) > static_cast<std::size_t>(grid.n_pixels())) {
      throw DomainError("RLE mask: runs exceed the pixel count");
    }
    pixels.insert(pixels.end(), static_cast<std::size_t>(run), value);
    value ^= 1;
  }
  if (pixels.size() != static_cast<std::size_t>(grid.n_pixels())) {
    throw DomainError("RLE mask: runs do not cover the grid");
  }
  return RegionMask(grid, std::move(pixels));
}

RegionStats stats(const RegionMask& mask) {
  return {mask.count(), mask.volume(), mask.boundary_area(), mask.corner_count()};
}

namespace {

struct Usable {
  int x_lo, x_hi, y_lo, y_hi;  // half-open
  RegionMask mask;
};

Usable usable_region(const Grid& grid, bool include_cell_boundary) {
  if (include_cell_boundary) return {0, grid.Nx, 0, grid.Ny, RegionMask::full(grid)};
  if (grid.Nx < 3 || grid.Ny < 3) {
    throw DomainError("excluding the cell boundary needs at least 3 pixels per axis");
  }
  return {1, grid.Nx - 1, 1, grid.Ny - 1, ~RegionMask::outer_ring(grid)};
}

}  // namespace

std::vector<RegionPair> volume_sweep(const Grid& grid, int buffer, bool include_cell_boundary) {
  if (buffer < 0) throw DomainError("volume_sweep: buffer must be >= 0");
  const Usable u = usable_region(grid, include_cell_boundary);
  std::vector<RegionPair> out;
  for (int d = u.x_lo + 1; d + buffer < u.x_hi; ++d) {
    RegionPair pair{RegionMask(grid), RegionMask(grid), d, 0, 0};
    for (int iy = u.y_lo; iy < u.y_hi; ++iy) {
      for (int ix = u.x_lo; ix < d; ++ix) pair.A.set(ix, iy);
      for (int ix = d + buffer; ix < u.x_hi; ++ix) pair.B.set(ix, iy);
    }
    out.push_back(std::move(pair));
  }
  if (out.empty()) throw DomainError("volume_sweep: grid too small for any bipartition");
  return out;
}

std::vector<RegionPair> rectangle_family(const Grid& grid, int fixed_volume,
                                         bool include_cell_boundary, int buffer) {
  if (fixed_volume < 1) throw DomainError("rectangle_family: fixed volume must be >= 1");
  if (buffer < 0) throw DomainError("rectangle_family: buffer must be >= 0");
  const Usable u = usable_region(grid, include_cell_boundary);
  const int uw = u.x_hi - u.x_lo;
  const int uh = u.y_hi - u.y_lo;
  std::vector<RegionPair> out;
  for (int w = 1; w <= fixed_volume; ++w) {
    if (fixed_volume % w != 0) continue;
    const int h = fixed_volume / w;
    if (w > uw || h > uh) continue;
    const int x0 = u.x_lo + (uw - w) / 2;
    const int y0 = u.y_lo + (uh - h) / 2;
    RegionPair pair;
    pair.A = RegionMask::rectangle(grid, x0, y0, w, h);
    pair.B = u.mask & ~pair.A.dilate(buffer);
    pair.width = w;
    pair.height = h;
    if (pair.B.empty()) continue;
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<RegionPair> area_sweep(const Grid& grid, int fixed_volume, bool include_cell_boundary,
                                   int buffer) {
  std::vector<RegionPair> out;
  for (auto& pair : rectangle_family(grid, fixed_volume, include_cell_boundary, buffer)) {
    if (pair.width <= pair.height) out.push_back(std::move(pair));
  }
  std::sort(out.begin(), out.end(), [](const RegionPair& a, const RegionPair& b) {
    return a.width + a.height < b.width + b.height;
  });
  if (out.empty()) throw DomainError("area_sweep: no rectangle of that volume fits");
  return out;
}

namespace {

SweepResult run_pairs(const CovarianceMatrix& gamma, const Grid& grid,
                      std::vector<RegionPair> pairs, const std::string& protocol, int buffer,
                      bool include_cell_boundary) {
  if (gamma.n() != grid.n_pixels()) {
    throw DomainError("sweep: covariance size does not match the grid");
  }
  SweepResult result;
  result.protocol = protocol;
  result.include_cell_boundary = include_cell_boundary;
  result.buffer = buffer;
  result.grid = grid;
  result.points.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    SweepPoint& pt = result.points[i];
    pt.regions = std::move(pairs[i]);
    pt.stats_A = stats(pt.regions.A);
    pt.abscissa = protocol == "volume" ? pt.stats_A.volume : pt.stats_A.boundary_area;
    pt.mi = mutual_information(gamma, pt.regions.A, pt.regions.B);
  });
  return result;
}

}  // namespace

SweepResult run_volume_sweep(const CovarianceMatrix& gamma, const Grid& grid, int buffer,
                             bool include_cell_boundary) {
  return run_pairs(gamma, grid, volume_sweep(grid, buffer, include_cell_boundary), "volume",
                   buffer, include_cell_boundary);
}

SweepResult run_area_sweep(const CovarianceMatrix& gamma, const Grid& grid, int fixed_volume,
                           bool include_cell_boundary, int buffer) {
  return run_pairs(gamma, grid, area_sweep(grid, fixed_volume, include_cell_boundary, buffer),
                   "area", buffer, include_cell_boundary);
}

Eigen::MatrixXd mi_map(const CovarianceMatrix& gamma, const Grid& grid) {
  if (gamma.n() != grid.n_pixels()) throw DomainError("mi_map: covariance size does not match the grid");
  if (gamma.labelling() != Labelling::RealSpace) {
    throw DomainError("mi_map: needs a real-space covariance");
  }
  const RegionMask interior = ~RegionMask::outer_ring(grid);
  if (grid.Nx < 3 || grid.Ny < 3 || interior.count() < 2) {
    throw DomainError("mi_map: grid has fewer than two interior pixels");
  }
  const std::vector<int> inner = interior.indices();
  const double s_inner = subsystem_entropy(gamma, inner);

  Eigen::MatrixXd map = Eigen::MatrixXd::Constant(grid.Nx, grid.Ny,
                                                  std::numeric_limits<double>::quiet_NaN());
  parallel_for(inner.size(), [&](std::size_t k) {
    const int p = inner[k];
    std::vector<int> rest;
    rest.reserve(inner.size() - 1);
    for (int q : inner) {
      if (q != p) rest.push_back(q);
    }
    const int single[] = {p};
    const double s_p = subsystem_entropy(gamma, single);
    const double s_rest = subsystem_entropy(gamma, rest);
    double mi = s_p + s_rest - s_inner;
    if (mi < 0.0) {
      if (mi < -std::max(1e-8, 1e-12 * s_rest)) {
        throw NumericalError("mi_map: negative mutual information at pixel " + std::to_string(p));
      }
      mi = 0.0;
    }
    map(p % grid.Nx, p / grid.Nx) = mi;
  });
  return map;
}

}  // namespace filminfo
