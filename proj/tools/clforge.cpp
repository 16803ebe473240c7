#include <exception>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "clforge/config.hpp"
#include "clforge/errors.hpp"
#include "clforge/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"clforge — continual-learning laboratory for two-layer nets"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_csv, recipe = "fig", plot_out;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;

  auto* run = app.add_subcommand("run", "execute a sweep from a config file");
  run->add_option("--config", config_path, "config file (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (default: config out_dir)");
  run->add_option("--jobs", jobs, "worker threads");

  auto* verify = app.add_subcommand("verify", "run the module self-check battery");

  auto* bounds = app.add_subcommand("bounds", "tabulate the closed-form bounds");
  bounds->add_option("--config", config_path, "bounds config (JSON)")->required();

  auto* plot = app.add_subcommand("plot", "render a results.csv to SVG");
  plot->add_option("--in", in_csv, "results.csv path")->required();
  plot->add_option("--recipe", recipe, "figure recipe name, e.g. fig1");
  plot->add_option("--out", plot_out, "output SVG path (default: <recipe>.svg)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const clforge::ExperimentConfig cfg = clforge::load_config(config_path);
      const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
      const int n = clforge::run_experiment(cfg, dir, jobs);
      std::cout << "wrote " << dir << "/results.csv, report.csv, meta.json (" << n
                << " runs)\n";
    } else if (*verify) {
      return clforge::verify_all(std::cout) == 0 ? 0 : 1;
    } else if (*bounds) {
      clforge::bounds_table(config_path, std::cout);
    } else if (*plot) {
      const std::string out = plot_out.empty() ? recipe + ".svg" : plot_out;
      clforge::plot_csv(in_csv, recipe, out);
      std::cout << "wrote " << out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "clforge: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
