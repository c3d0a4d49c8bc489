#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "filminfo/geometry.hpp"
#include "filminfo/physics.hpp"
#include "filminfo/reconstruct.hpp"

namespace filminfo {

inline constexpr const char* kVersion = "0.1.0";

enum class DispersionModel { ThinFilm, Linear };

struct SweepOptions {
  int buffer = 1;
  bool include_cell_boundary = true;
  int fixed_volume = 36;
};

struct ReconstructOptions {
  Quadrature quadrature = Quadrature::Field;
  /// 0 selects the default sampling plan.
  std::size_t n_times = 0;
  double t_max = 0.0;
  /// Noise scale relative to the mean absolute two-point signal.
  double noise_relative = 0.0;
  std::uint64_t seed = 1;
  int n_seeds = 1;
  std::size_t max_modes = 0;  ///< 0 = all modes
};

/// Everything a command needs. Text form is flat `section.key = value` lines;
/// `#` starts a comment.
struct RunConfig {
  FilmParams film;
  Grid grid;
  BoundarySpec boundary;
  DispersionModel dispersion = DispersionModel::ThinFilm;
  SweepOptions sweep;
  ReconstructOptions reconstruct;
  std::string output_dir = "out";

  /// Throws ConfigError naming the source and line for malformed input,
  /// unknown keys, and missing required keys.
  static RunConfig parse(std::istream& in, const std::string& source = "config");
  static RunConfig load(const std::string& path);

  /// Canonical text form; parse(emit()) reproduces the same hash.
  std::string emit() const;
  /// FNV-1a over the canonical form, excluding output.dir.
  std::uint64_t hash() const;
  std::string hash_hex() const;
};

Dispersion make_dispersion(const RunConfig& config);

}  // namespace filminfo
