#include "filminfo/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "filminfo/config.hpp"
#include "filminfo/errors.hpp"

namespace filminfo {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& context) {
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  if (s == "nan") return std::nan("");
  throw DomainError(context + ": bad number '" + s + "'");
}

void write_matrix_rows(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << num(m(i, j));
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_rows(std::istream& in, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& context) {
  Eigen::MatrixXd m(rows, cols);
  std::string line;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw DomainError(context + ": truncated matrix");
    const auto cells = split(line);
    if (static_cast<Eigen::Index>(cells.size()) != cols) {
      throw DomainError(context + ": row " + std::to_string(i) + " has " +
                        std::to_string(cells.size()) + " values, expected " + std::to_string(cols));
    }
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = to_double(cells[static_cast<std::size_t>(j)], context);
  }
  return m;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_meta(std::ostream& out, const OutputMeta& meta) {
  out << "# filminfo " << kVersion << "\n"
      << "# config_hash = " << meta.config_hash << "\n"
      << "# command = " << meta.command << "\n"
      << "# sine_argument = " << kSineArgumentConvention << "\n";
}

void write_covariance_csv(std::ostream& out, const CovarianceMatrix& gamma) {
  out << "n," << gamma.n() << ",labelling," << to_string(gamma.labelling()) << "\n";
  write_matrix_rows(out, gamma.data());
}

CovarianceMatrix read_covariance_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("covariance CSV: empty input");
  const auto head = split(line);
  if (head.size() != 4 || head[0] != "n" || head[2] != "labelling") {
    throw DomainError("covariance CSV: expected header 'n,<n>,labelling,<name>'");
  }
  const long n = std::stol(head[1]);
  if (n < 1) throw DomainError("covariance CSV: n must be >= 1");
  Eigen::MatrixXd data = read_matrix_rows(in, 2 * n, 2 * n, "covariance CSV");
  return CovarianceMatrix(std::move(data), parse_labelling(head[3]));
}

void write_series(const std::string& directory, const TwoPointSeries& series) {
  fs::create_directories(directory);
  auto manifest = open_out(fs::path(directory) / "manifest.csv");
  manifest << "quadrature," << to_string(series.quadrature) << "\n"
           << "noise_sigma," << num(series.noise_sigma) << "\n"
           << "seed," << series.seed << "\n"
           << "n_pixels," << (series.samples.empty() ? 0 : series.samples[0].rows()) << "\n"
           << "k,time\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    manifest << k << "," << num(series.times[k]) << "\n";
    auto sample = open_out(fs::path(directory) / ("sample_" + std::to_string(k) + ".csv"));
    write_matrix_rows(sample, series.samples[k]);
  }
}

TwoPointSeries read_series(const std::string& directory) {
  std::ifstream manifest(fs::path(directory) / "manifest.csv");
  if (!manifest) throw DomainError("series: cannot open manifest in '" + directory + "'");
  TwoPointSeries s;
  std::string line;
  long n_pixels = 0;
  auto field = [&](const std::string& key) {
    if (!std::getline(manifest, line)) throw DomainError("series manifest: truncated");
    const auto cells = split(line);
    if (cells.size() != 2 || cells[0] != key) throw DomainError("series manifest: expected '" + key + "'");
    return cells[1];
  };
  s.quadrature = parse_quadrature(field("quadrature"));
  s.noise_sigma = to_double(field("noise_sigma"), "series manifest");
  s.seed = std::stoull(field("seed"));
  n_pixels = std::stol(field("n_pixels"));
  if (!std::getline(manifest, line) || line != "k,time") throw DomainError("series manifest: missing 'k,time'");
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 2) throw DomainError("series manifest: bad row '" + line + "'");
    const std::string name = "sample_" + cells[0] + ".csv";
    std::ifstream sample(fs::path(directory) / name);
    if (!sample) throw DomainError("series: missing " + name);
    s.times.push_back(to_double(cells[1], "series manifest"));
    s.samples.push_back(read_matrix_rows(sample, n_pixels, n_pixels, name));
  }
  s.validate_and_symmetrize();
  return s;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const OutputMeta& meta) {
  write_meta(out, meta);
  out << "# protocol = " << sweep.protocol << "\n"
      << "# grid = " << num(sweep.grid.Lx) << "," << num(sweep.grid.Ly) << "," << sweep.grid.Nx
      << "," << sweep.grid.Ny << "\n"
      << "# buffer = " << sweep.buffer << "\n"
      << "# include_cell_boundary = " << (sweep.include_cell_boundary ? "true" : "false") << "\n";
  if (sweep.protocol == "volume") {
    out << "divider_index,volume_m2,mi_nats\n";
    for (const auto& p : sweep.points) {
      out << p.regions.divider << "," << num(p.stats_A.volume) << "," << num(p.mi) << "\n";
    }
  } else {
    out << "perimeter_m,mi_nats,corner_count\n";
    for (const auto& p : sweep.points) {
      out << num(p.stats_A.boundary_area) << "," << num(p.mi) << "," << p.stats_A.corners << "\n";
    }
  }
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    const auto& r = sweep.points[i].regions;
    out << "# mask," << i << ",A," << r.A.to_rle() << ",B," << r.B.to_rle() << "\n";
  }
}

SweepResult read_sweep_csv(std::istream& in) {
  SweepResult s;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 3);
      if (key == "protocol") {
        s.protocol = value;
      } else if (key == "grid") {
        const auto c = split(value);
        if (c.size() != 4) throw DomainError("sweep CSV: bad grid line");
        s.grid = Grid(to_double(c[0], "sweep CSV"), to_double(c[1], "sweep CSV"), std::stoi(c[2]),
                      std::stoi(c[3]));
      } else if (key == "buffer") {
        s.buffer = std::stoi(value);
      } else if (key == "include_cell_boundary") {
        s.include_cell_boundary = value == "true";
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      const bool volume = line == "divider_index,volume_m2,mi_nats";
      const bool area = line == "perimeter_m,mi_nats,corner_count";
      if (!volume && !area) throw DomainError("sweep CSV: unknown column header '" + line + "'");
      if (s.protocol.empty()) s.protocol = volume ? "volume" : "area";
      continue;
    }
    const auto c = split(line);
    if (c.size() != 3) throw DomainError("sweep CSV: bad row '" + line + "'");
    SweepPoint p;
    if (s.protocol == "volume") {
      p.regions.divider = std::stoi(c[0]);
      p.stats_A.volume = to_double(c[1], "sweep CSV");
      p.mi = to_double(c[2], "sweep CSV");
      p.abscissa = p.stats_A.volume;
      if (s.grid.Nx > 0) p.stats_A.pixels = static_cast<int>(std::lround(p.stats_A.volume / s.grid.cell_area()));
    } else {
      p.stats_A.boundary_area = to_double(c[0], "sweep CSV");
      p.mi = to_double(c[1], "sweep CSV");
      p.stats_A.corners = std::stoi(c[2]);
      p.abscissa = p.stats_A.boundary_area;
    }
    s.points.push_back(std::move(p));
  }
  if (!header_seen) throw DomainError("sweep CSV: no column header");
  return s;
}

void write_calabrese_footer(std::ostream& out, const CalabreseFit& fit) {
  out << "# fit,calabrese,kappa1," << num(fit.kappa1) << ",kappa2," << num(fit.kappa2) << ",kappa3,"
      << num(fit.kappa3) << ",rms," << num(fit.rms) << "\n";
}

void write_calabrese_csv(std::ostream& out, const CalabreseFit& fit, const OutputMeta& meta) {
  write_meta(out, meta);
  out << "kappa1,kappa2,kappa3,rms,start_rms,converged,iterations\n"
      << num(fit.kappa1) << "," << num(fit.kappa2) << "," << num(fit.kappa3) << "," << num(fit.rms)
      << "," << num(fit.start_rms) << "," << (fit.converged ? "true" : "false") << ","
      << fit.iterations << "\n";
}

void write_area_fit_footer(std::ostream& out, const AreaLawFit& fit) {
  out << "# fit,area_law,slope," << num(fit.slope) << ",intercept," << num(fit.intercept) << ",r2,"
      << num(fit.r2) << "\n";
}

void write_area_fit_csv(std::ostream& out, const AreaLawFit& fit, const OutputMeta& meta) {
  write_meta(out, meta);
  out << "slope,intercept,r2,quadratic_gain,superlinear\n"
      << num(fit.slope) << "," << num(fit.intercept) << "," << num(fit.r2) << ","
      << num(fit.quadratic_gain) << "," << (fit.superlinear ? "true" : "false") << "\n";
}

void write_mi_map_csv(std::ostream& out, const Eigen::MatrixXd& map, const OutputMeta& meta) {
  write_meta(out, meta);
  out << "ix,iy,mi_nats\n";
  for (Eigen::Index iy = 0; iy < map.cols(); ++iy) {
    for (Eigen::Index ix = 0; ix < map.rows(); ++ix) {
      if (std::isnan(map(ix, iy))) continue;
      out << ix << "," << iy << "," << num(map(ix, iy)) << "\n";
    }
  }
}

}  // namespace filminfo
