#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "filminfo/fitting.hpp"
#include "filminfo/gaussian.hpp"
#include "filminfo/reconstruct.hpp"
#include "filminfo/regions.hpp"

namespace filminfo {

/// Provenance lines written at the top of every output file.
struct OutputMeta {
  std::string config_hash;
  std::string command;
};

void write_meta(std::ostream& out, const OutputMeta& meta);

/// Header "n,<n>,labelling,<name>" followed by 2n rows of 2n values.
void write_covariance_csv(std::ostream& out, const CovarianceMatrix& gamma);
CovarianceMatrix read_covariance_csv(std::istream& in);

/// Directory container: manifest.csv plus sample_<k>.csv per time.
void write_series(const std::string& directory, const TwoPointSeries& series);
TwoPointSeries read_series(const std::string& directory);

/// Columns divider_index,volume_m2,mi_nats (volume) or
/// perimeter_m,mi_nats,corner_count (area); masks as "# mask" RLE lines.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const OutputMeta& meta);
/// Reads the numeric columns back; masks and stats are not restored.
SweepResult read_sweep_csv(std::istream& in);

void write_calabrese_footer(std::ostream& out, const CalabreseFit& fit);
void write_calabrese_csv(std::ostream& out, const CalabreseFit& fit, const OutputMeta& meta);
void write_area_fit_footer(std::ostream& out, const AreaLawFit& fit);
void write_area_fit_csv(std::ostream& out, const AreaLawFit& fit, const OutputMeta& meta);

/// Columns ix,iy,mi_nats for every interior pixel.
void write_mi_map_csv(std::ostream& out, const Eigen::MatrixXd& map, const OutputMeta& meta);

}  // namespace filminfo
