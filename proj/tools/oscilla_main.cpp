// Command line front end: parse flags, load the config, dispatch.

#include <CLI11.hpp>
#include <oscilla.hpp>

#include <cstdint>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"oscillation, gap, and spectral estimates on model volumes"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 20260816ULL;
  int threads = 1;

  auto add_common = [&](CLI::App* sc, bool config_required) {
    auto* opt = sc->add_option("--config", config_path, "experiment config file");
    if (config_required) opt->required();
    sc->add_option("--out", out_dir, "output directory (default: out)");
    sc->add_option("--seed", seed, "seed for randomized sweeps");
    sc->add_option("--threads", threads, "worker threads for grid sweeps");
  };

  auto* solve = app.add_subcommand("solve", "integrate the flux system, export track and zeros");
  auto* critical = app.add_subcommand("critical", "tabulate critical functions");
  auto* criteria = app.add_subcommand("criteria", "evaluate oscillation criteria");
  auto* gaps = app.add_subcommand("gaps", "zero-gap decomposition over a tau grid");
  auto* spectral = app.add_subcommand("spectral", "spectral bounds over a radius grid");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  for (auto* sc : {solve, critical, criteria, gaps, spectral}) add_common(sc, true);
  add_common(verify, false);

  CLI11_PARSE(app, argc, argv);

  try {
    oscilla::worker_count() = threads < 1 ? 1 : threads;
    if (verify->parsed()) return oscilla::run_verify(seed, out_dir) ? 0 : 1;
    const oscilla::Config cfg = oscilla::Config::parse_file(config_path);
    if (solve->parsed())
      oscilla::run_solve(cfg, out_dir);
    else if (critical->parsed())
      oscilla::run_critical(cfg, out_dir);
    else if (criteria->parsed())
      oscilla::run_criteria(cfg, out_dir);
    else if (gaps->parsed())
      oscilla::run_gaps(cfg, out_dir);
    else if (spectral->parsed())
      oscilla::run_spectral(cfg, out_dir);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
