#include "filminfo/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "filminfo/config.hpp"
#include "filminfo/errors.hpp"
#include "filminfo/fitting.hpp"
#include "filminfo/gaussian.hpp"
#include "filminfo/io.hpp"
#include "filminfo/parallel.hpp"
#include "filminfo/reconstruct.hpp"
#include "filminfo/regions.hpp"
#include "filminfo/svg.hpp"

namespace filminfo {

namespace fs = std::filesystem;

namespace {

struct Context {
  RunConfig config;
  CommandOptions options;
  std::string command;
  fs::path out_dir;

  OutputMeta meta() const { return {config.hash_hex(), command}; }

  std::ofstream open(const std::string& name) const {
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / name);
    if (!out) throw DomainError("cannot write '" + (out_dir / name).string() + "'");
    out << std::setprecision(17);
    return out;
  }
};

std::shared_ptr<const ModeBasis> basis_for(const RunConfig& c) {
  return std::make_shared<const ModeBasis>(build_basis(c.grid, c.boundary, make_dispersion(c)));
}

CovarianceMatrix real_space_state(const RunConfig& c) {
  const DerivedParams d = derive_params(c.film);
  return to_real_space(thermal_momentum_covariance(basis_for(c), c.film.T), d);
}

void write_svg(const Context& ctx, const std::string& name, const std::string& body) {
  auto out = ctx.open(name);
  out << body;
}

int cmd_params(const Context& ctx, std::ostream& out) {
  const RunConfig& c = ctx.config;
  const DerivedParams d = derive_params(c.film);
  out << std::setprecision(6);
  out << "filminfo " << kVersion << "  config_hash = " << c.hash_hex() << "\n"
      << "film.h0 = " << c.film.h0 << " m\n"
      << "film.alpha_vdw = " << c.film.alpha_vdw << " m^5/s^2\n"
      << "film.sigma = " << c.film.sigma << " N/m\n"
      << "film.rho = " << c.film.rho << " kg/m^3\n"
      << "film.m4 = " << c.film.m4 << " kg\n"
      << "film.T = " << c.film.T << " K\n"
      << "film.M = " << c.film.M << " kg\n"
      << "g_eff = " << d.g_eff << " m/s^2\n"
      << "ell_c = " << d.ell_c << " m\n"
      << "c3 = " << d.c3 << " m/s\n"
      << "K = " << d.K << " m\n"
      << "grid = " << c.grid.Nx << " x " << c.grid.Ny << " over " << c.grid.Lx << " x "
      << c.grid.Ly << " m\n"
      << "boundary = " << to_string(c.boundary.kind);
  if (c.boundary.kind == BoundaryKind::Robin) out << " (alpha = " << c.boundary.alpha << " 1/m)";
  out << "\n";
  const auto basis = basis_for(c);
  const RegimeReport r = quantum_regime_report(*basis, c.film.T);
  const Eigen::VectorXd w = basis->omegas();
  out << "modes = " << basis->n_modes() << " (excluded " << basis->excluded_modes().size() << ")\n"
      << "omega_min = " << w.minCoeff() << " rad/s, omega_max = " << w.maxCoeff() << " rad/s\n"
      << "T_quantum = " << r.T_quantum << " K\n"
      << "quantum modes = " << r.n_quantum << ", classical modes = " << r.n_classical << "\n";
  return kExitOk;
}

std::vector<double> fractions(const SweepResult& s) {
  std::vector<double> f;
  for (const auto& p : s.points) f.push_back(static_cast<double>(p.stats_A.pixels) / s.grid.n_pixels());
  return f;
}

std::vector<double> values(const SweepResult& s) {
  std::vector<double> y;
  for (const auto& p : s.points) y.push_back(p.mi);
  return y;
}

int cmd_sweep_volume(const Context& ctx, std::ostream& out) {
  const RunConfig& c = ctx.config;
  const SweepResult sweep = run_volume_sweep(real_space_state(c), c.grid, c.sweep.buffer,
                                             c.sweep.include_cell_boundary);
  auto csv = ctx.open("sweep_volume.csv");
  write_sweep_csv(csv, sweep, ctx.meta());
  std::optional<CalabreseFit> fit;
  if (sweep.points.size() >= 5) {
    fit = calabrese_fit(sweep);
    write_calabrese_footer(csv, *fit);
  }
  if (ctx.options.svg) {
    std::vector<svg::Series> series{{"MI", fractions(sweep), values(sweep), false}};
    if (fit) {
      svg::Series dashed{"fit", {}, {}, true};
      for (double f : series[0].x) {
        dashed.x.push_back(f);
        dashed.y.push_back(calabrese_model(f, c.grid.n_pixels(), fit->kappa1, fit->kappa2, fit->kappa3));
      }
      series.push_back(dashed);
    }
    write_svg(ctx, "sweep_volume.svg",
              svg::line_plot(series, "volume sweep (" + to_string(c.boundary.kind) + ")",
                             "subsystem fraction", "MI [nats]"));
  }
  out << "wrote " << (ctx.out_dir / "sweep_volume.csv").string() << " (" << sweep.points.size()
      << " points)\n";
  return kExitOk;
}

int cmd_sweep_area(const Context& ctx, std::ostream& out) {
  const RunConfig& c = ctx.config;
  const SweepResult sweep = run_area_sweep(real_space_state(c), c.grid, c.sweep.fixed_volume,
                                           c.sweep.include_cell_boundary, c.sweep.buffer);
  auto csv = ctx.open("sweep_area.csv");
  write_sweep_csv(csv, sweep, ctx.meta());
  if (sweep.points.size() >= 4) write_area_fit_footer(csv, area_law_fit(sweep));
  if (ctx.options.svg) {
    svg::Series s{"MI", {}, {}, false};
    for (const auto& p : sweep.points) {
      s.x.push_back(p.stats_A.boundary_area);
      s.y.push_back(p.mi);
    }
    write_svg(ctx, "sweep_area.svg",
              svg::line_plot({s}, "area sweep (" + to_string(c.boundary.kind) + ")",
                             "boundary length [m]", "MI [nats]"));
  }
  out << "wrote " << (ctx.out_dir / "sweep_area.csv").string() << " (" << sweep.points.size()
      << " points)\n";
  return kExitOk;
}

int cmd_mi_map(const Context& ctx, std::ostream& out) {
  const RunConfig& c = ctx.config;
  const Eigen::MatrixXd map = mi_map(real_space_state(c), c.grid);
  auto csv = ctx.open("mi_map.csv");
  write_mi_map_csv(csv, map, ctx.meta());
  if (ctx.options.svg) {
    write_svg(ctx, "mi_map.svg", svg::heatmap(map, "per-pixel MI (" + to_string(c.boundary.kind) + ")"));
  }
  out << "wrote " << (ctx.out_dir / "mi_map.csv").string() << "\n";
  return kExitOk;
}

int cmd_reconstruct(const Context& ctx, std::ostream& out) {
  const RunConfig& c = ctx.config;
  const ReconstructOptions& ro = c.reconstruct;
  const auto basis = basis_for(c);
  const DerivedParams d = derive_params(c.film);
  const CovarianceMatrix truth = thermal_momentum_covariance(basis, c.film.T);

  std::vector<double> times;
  if (ro.n_times > 0) {
    if (ro.n_times < 2) throw ConfigError("reconstruct.n_times must be >= 2");
    for (std::size_t k = 0; k < ro.n_times; ++k) {
      times.push_back(ro.t_max * static_cast<double>(k) / static_cast<double>(ro.n_times - 1));
    }
  } else {
    times = default_sample_times(*basis);
  }

  FitOptions fo;
  if (ro.max_modes > 0) fo.max_modes = ro.max_modes;
  const std::uint64_t seed0 = ctx.options.seed.value_or(ro.seed);
  const double signal =
      mean_abs_signal(synth_two_point(truth, *basis, d, times, ro.quadrature, 0.0, seed0));

  auto csv = ctx.open("reconstruct.csv");
  write_meta(csv, ctx.meta());
  csv << "# quadrature = " << to_string(ro.quadrature) << "\n"
      << "# n_times = " << times.size() << "\n"
      << "# noise_sigma = " << ro.noise_relative * signal << "\n"
      << "seed,relative_frobenius_error,residual_rms,n_unidentifiable\n";
  double mean_error = 0.0;
  for (int k = 0; k < ro.n_seeds; ++k) {
    const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(k);
    const TwoPointSeries series =
        synth_two_point(truth, *basis, d, times, ro.quadrature, ro.noise_relative * signal, seed);
    const ReconstructionResult fit = fit_covariance(series, *basis, d, fo);
    const double err = relative_frobenius_error(fit, truth);
    mean_error += err / ro.n_seeds;
    csv << seed << "," << err << "," << fit.residual_rms << "," << fit.unidentifiable_pairs.size()
        << "\n";
  }
  csv << "# mean_relative_frobenius_error = " << mean_error << "\n";
  out << "wrote " << (ctx.out_dir / "reconstruct.csv").string() << " (mean relative error "
      << mean_error << ")\n";
  return kExitOk;
}

SweepResult sweep_input(const Context& ctx, const std::string& protocol) {
  if (!ctx.options.input.empty()) {
    std::ifstream in(ctx.options.input);
    if (!in) throw ConfigError("cannot open sweep CSV '" + ctx.options.input + "'");
    SweepResult s = read_sweep_csv(in);
    if (s.protocol != protocol) {
      throw ConfigError("'" + ctx.options.input + "' is a " + s.protocol + " sweep, expected " + protocol);
    }
    return s;
  }
  const RunConfig& c = ctx.config;
  if (protocol == "volume") {
    return run_volume_sweep(real_space_state(c), c.grid, c.sweep.buffer, c.sweep.include_cell_boundary);
  }
  return run_area_sweep(real_space_state(c), c.grid, c.sweep.fixed_volume,
                        c.sweep.include_cell_boundary, c.sweep.buffer);
}

int cmd_fit_calabrese(const Context& ctx, std::ostream& out) {
  const CalabreseFit fit = calabrese_fit(sweep_input(ctx, "volume"));
  auto csv = ctx.open("fit_calabrese.csv");
  write_calabrese_csv(csv, fit, ctx.meta());
  out << std::setprecision(6) << "kappa1 = " << fit.kappa1 << ", kappa2 = " << fit.kappa2
      << ", kappa3 = " << fit.kappa3 << ", rms = " << fit.rms << "\n";
  return kExitOk;
}

int cmd_fit_area(const Context& ctx, std::ostream& out) {
  const AreaLawFit fit = area_law_fit(sweep_input(ctx, "area"));
  auto csv = ctx.open("fit_area.csv");
  write_area_fit_csv(csv, fit, ctx.meta());
  out << std::setprecision(6) << "slope = " << fit.slope << ", intercept = " << fit.intercept
      << ", r2 = " << fit.r2 << (fit.superlinear ? " (super-linear)" : "") << "\n";
  return kExitOk;
}

}  // namespace

int run_command(const std::string& name, const CommandOptions& options, std::ostream& out,
                std::ostream& err) {
  using Handler = int (*)(const Context&, std::ostream&);
  static const std::pair<const char*, Handler> table[] = {
      {"params", cmd_params},           {"sweep-volume", cmd_sweep_volume},
      {"sweep-area", cmd_sweep_area},   {"mi-map", cmd_mi_map},
      {"reconstruct", cmd_reconstruct}, {"fit-calabrese", cmd_fit_calabrese},
      {"fit-area", cmd_fit_area}};
  Handler handler = nullptr;
  for (const auto& [n, h] : table) {
    if (name == n) handler = h;
  }
  if (!handler) {
    err << "error: unknown command '" << name << "'\n";
    return kExitUsage;
  }
  try {
    if (options.config_path.empty()) throw ConfigError("--config is required");
    Context ctx{RunConfig::load(options.config_path), options, name, {}};
    ctx.out_dir = options.out_dir.empty() ? ctx.config.output_dir : options.out_dir;
    if (options.threads > 0) set_max_threads(options.threads);
    return handler(ctx, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnphysicalCovariance& e) {
    err << "unphysical covariance: " << e.what() << "\n";
    return kExitUnphysical;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "filesystem error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace filminfo
