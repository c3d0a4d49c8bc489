#include "filminfo/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "filminfo/errors.hpp"

namespace filminfo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    auto it = entries_.find(key);
    const std::string where =
        it == entries_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
    throw ConfigError(where + ": " + key + ": " + what);
  }

  const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

  double number(const std::string& key, double fallback, bool required = false) const {
    if (!has(key)) {
      if (required) throw ConfigError(source_ + ": missing required key '" + key + "'");
      return fallback;
    }
    const std::string& text = raw(key);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      fail(key, "expected a number, got '" + text + "'");
    }
    if (used != text.size()) fail(key, "expected a number, got '" + text + "'");
    return v;
  }

  long integer(const std::string& key, long fallback, bool required = false) const {
    if (!has(key)) {
      if (required) throw ConfigError(source_ + ": missing required key '" + key + "'");
      return fallback;
    }
    const std::string& text = raw(key);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(text, &used);
    } catch (const std::exception&) {
      fail(key, "expected an integer, got '" + text + "'");
    }
    if (used != text.size()) fail(key, "expected an integer, got '" + text + "'");
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& t = raw(key);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    fail(key, "expected true or false, got '" + t + "'");
  }

  std::string text(const std::string& key, const std::string& fallback, bool required = false) const {
    if (!has(key)) {
      if (required) throw ConfigError(source_ + ": missing required key '" + key + "'");
      return fallback;
    }
    return raw(key);
  }

 private:
  std::map<std::string, Entry> entries_;
  std::string source_;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "film.h0",          "film.alpha_vdw",         "film.sigma",          "film.rho",
      "film.m4",          "film.T",                 "film.M",              "grid.Lx",
      "grid.Ly",          "grid.Nx",                "grid.Ny",             "boundary.kind",
      "boundary.alpha",   "boundary.include_zero_mode", "dispersion.model", "sweep.buffer",
      "sweep.include_cell_boundary", "sweep.fixed_volume", "reconstruct.quadrature",
      "reconstruct.n_times", "reconstruct.t_max",   "reconstruct.noise_relative",
      "reconstruct.seed", "reconstruct.n_seeds",    "reconstruct.max_modes", "output.dir"};
  return keys;
}

}  // namespace

RunConfig RunConfig::parse(std::istream& in, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (entries.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    entries[key] = {value, lineno};
  }

  const Reader r(std::move(entries), source);
  RunConfig c;
  for (const char* key : {"film.h0", "film.alpha_vdw", "film.T", "grid.Lx", "grid.Ly", "grid.Nx",
                          "grid.Ny", "boundary.kind"}) {
    if (!r.has(key)) throw ConfigError(source + ": missing required key '" + key + "'");
  }
  c.film.h0 = r.number("film.h0", 0.0, true);
  c.film.alpha_vdw = r.number("film.alpha_vdw", 0.0, true);
  c.film.T = r.number("film.T", 0.0, true);
  c.film.sigma = r.number("film.sigma", c.film.sigma);
  c.film.rho = r.number("film.rho", c.film.rho);
  c.film.m4 = r.number("film.m4", c.film.m4);
  c.film.M = r.number("film.M", c.film.M);
  try {
    c.film.validate();
  } catch (const DomainError& e) {
    throw ConfigError(source + ": film: " + e.what());
  }

  const long nx = r.integer("grid.Nx", 0, true);
  const long ny = r.integer("grid.Ny", 0, true);
  if (nx < 1 || ny < 1 || nx > 4096 || ny > 4096) r.fail("grid.Nx", "grid dimensions must be in 1..4096");
  try {
    c.grid = Grid(r.number("grid.Lx", 0.0, true), r.number("grid.Ly", 0.0, true),
                  static_cast<int>(nx), static_cast<int>(ny));
  } catch (const DomainError& e) {
    throw ConfigError(source + ": grid: " + e.what());
  }

  try {
    c.boundary.kind = parse_boundary_kind(r.text("boundary.kind", "", true));
  } catch (const DomainError& e) {
    r.fail("boundary.kind", e.what());
  }
  if (c.boundary.kind == BoundaryKind::Robin) {
    if (!r.has("boundary.alpha")) {
      throw ConfigError(source + ": missing required key 'boundary.alpha' (Robin boundary)");
    }
    c.boundary.alpha = r.number("boundary.alpha", 0.0);
    if (!(c.boundary.alpha >= 0.0)) r.fail("boundary.alpha", "must be >= 0");
  } else if (r.has("boundary.alpha")) {
    r.fail("boundary.alpha", "only valid for a Robin boundary");
  }
  c.boundary.include_zero_mode = r.boolean("boundary.include_zero_mode", false);
  if (c.boundary.include_zero_mode && c.boundary.kind != BoundaryKind::Neumann) {
    r.fail("boundary.include_zero_mode", "only valid for a Neumann boundary");
  }

  const std::string model = r.text("dispersion.model", "thin_film");
  if (model == "thin_film") {
    c.dispersion = DispersionModel::ThinFilm;
  } else if (model == "linear") {
    c.dispersion = DispersionModel::Linear;
  } else {
    r.fail("dispersion.model", "expected thin_film or linear");
  }

  c.sweep.buffer = static_cast<int>(r.integer("sweep.buffer", c.sweep.buffer));
  if (c.sweep.buffer < 0) r.fail("sweep.buffer", "must be >= 0");
  c.sweep.include_cell_boundary = r.boolean("sweep.include_cell_boundary", c.sweep.include_cell_boundary);
  c.sweep.fixed_volume = static_cast<int>(r.integer("sweep.fixed_volume", c.sweep.fixed_volume));
  if (c.sweep.fixed_volume < 1) r.fail("sweep.fixed_volume", "must be >= 1");

  try {
    c.reconstruct.quadrature = parse_quadrature(r.text("reconstruct.quadrature", "field"));
  } catch (const DomainError& e) {
    r.fail("reconstruct.quadrature", e.what());
  }
  const long n_times = r.integer("reconstruct.n_times", 0);
  if (n_times < 0) r.fail("reconstruct.n_times", "must be >= 0");
  c.reconstruct.n_times = static_cast<std::size_t>(n_times);
  c.reconstruct.t_max = r.number("reconstruct.t_max", 0.0);
  if (!(c.reconstruct.t_max >= 0.0)) r.fail("reconstruct.t_max", "must be >= 0");
  if ((n_times > 0) != (c.reconstruct.t_max > 0.0)) {
    throw ConfigError(source + ": reconstruct.n_times and reconstruct.t_max must be set together");
  }
  c.reconstruct.noise_relative = r.number("reconstruct.noise_relative", 0.0);
  if (!(c.reconstruct.noise_relative >= 0.0)) r.fail("reconstruct.noise_relative", "must be >= 0");
  const long seed = r.integer("reconstruct.seed", 1);
  if (seed < 0) r.fail("reconstruct.seed", "must be >= 0");
  c.reconstruct.seed = static_cast<std::uint64_t>(seed);
  c.reconstruct.n_seeds = static_cast<int>(r.integer("reconstruct.n_seeds", 1));
  if (c.reconstruct.n_seeds < 1) r.fail("reconstruct.n_seeds", "must be >= 1");
  const long max_modes = r.integer("reconstruct.max_modes", 0);
  if (max_modes < 0) r.fail("reconstruct.max_modes", "must be >= 0");
  c.reconstruct.max_modes = static_cast<std::size_t>(max_modes);

  c.output_dir = r.text("output.dir", c.output_dir);
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

std::string RunConfig::emit() const {
  std::ostringstream os;
  os << "film.h0 = " << fmt(film.h0) << "\n"
     << "film.alpha_vdw = " << fmt(film.alpha_vdw) << "\n"
     << "film.sigma = " << fmt(film.sigma) << "\n"
     << "film.rho = " << fmt(film.rho) << "\n"
     << "film.m4 = " << fmt(film.m4) << "\n"
     << "film.T = " << fmt(film.T) << "\n"
     << "film.M = " << fmt(film.M) << "\n"
     << "grid.Lx = " << fmt(grid.Lx) << "\n"
     << "grid.Ly = " << fmt(grid.Ly) << "\n"
     << "grid.Nx = " << grid.Nx << "\n"
     << "grid.Ny = " << grid.Ny << "\n"
     << "boundary.kind = " << to_string(boundary.kind) << "\n";
  if (boundary.kind == BoundaryKind::Robin) os << "boundary.alpha = " << fmt(boundary.alpha) << "\n";
  if (boundary.kind == BoundaryKind::Neumann) {
    os << "boundary.include_zero_mode = " << (boundary.include_zero_mode ? "true" : "false") << "\n";
  }
  os << "dispersion.model = " << (dispersion == DispersionModel::ThinFilm ? "thin_film" : "linear")
     << "\n"
     << "sweep.buffer = " << sweep.buffer << "\n"
     << "sweep.include_cell_boundary = " << (sweep.include_cell_boundary ? "true" : "false") << "\n"
     << "sweep.fixed_volume = " << sweep.fixed_volume << "\n"
     << "reconstruct.quadrature = " << to_string(reconstruct.quadrature) << "\n"
     << "reconstruct.n_times = " << reconstruct.n_times << "\n"
     << "reconstruct.t_max = " << fmt(reconstruct.t_max) << "\n"
     << "reconstruct.noise_relative = " << fmt(reconstruct.noise_relative) << "\n"
     << "reconstruct.seed = " << reconstruct.seed << "\n"
     << "reconstruct.n_seeds = " << reconstruct.n_seeds << "\n"
     << "reconstruct.max_modes = " << reconstruct.max_modes << "\n"
     << "output.dir = " << output_dir << "\n";
  return os.str();
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  std::istringstream lines(emit());
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("output.dir", 0) == 0) continue;
    for (unsigned char ch : line + "\n") {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string RunConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

Dispersion make_dispersion(const RunConfig& config) {
  if (config.dispersion == DispersionModel::Linear) {
    return linear_dispersion(derive_params(config.film).c3, config.film.M);
  }
  return thin_film_dispersion(config.film);
}

}  // namespace filminfo
