#include <CLI11.hpp>

#include <iostream>

#include "filminfo/commands.hpp"
#include "filminfo/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mutual information of thermal third-sound fields in thin helium films"};
  app.set_version_flag("--version", filminfo::kVersion);
  app.require_subcommand(1);

  filminfo::CommandOptions options;
  std::uint64_t seed = 0;
  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"params", "print film parameters, derived constants and the mode regime report"},
      {"sweep-volume", "MI across a vertical divider at fixed interface length"},
      {"sweep-area", "MI of fixed-volume rectangles of varying perimeter"},
      {"mi-map", "per-pixel MI with the rest of the cell interior"},
      {"reconstruct", "synthesise two-point data and fit the initial covariance"},
      {"fit-calabrese", "fit the finite-size log curve to a volume sweep"},
      {"fit-area", "fit a line to an area sweep"},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", options.config_path, "config file")->required();
    sub->add_option("--out", options.out_dir, "output directory (overrides output.dir)");
    sub->add_flag("--svg", options.svg, "also write SVG plots");
    sub->add_option("--threads", options.threads, "worker thread cap")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "override reconstruct.seed");
    if (std::string(c.name).rfind("fit-", 0) == 0) {
      sub->add_option("--input", options.input, "existing sweep CSV instead of recomputing");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // A missing --config is a configuration error; other usage errors keep CLI11's code.
    if (e.get_name() == "RequiredError") return filminfo::kExitConfig;
    return code;
  }
  auto* sub = app.get_subcommands().front();
  if (sub->count("--seed") > 0) options.seed = seed;
  return filminfo::run_command(sub->get_name(), options, std::cout, std::cerr);
}
