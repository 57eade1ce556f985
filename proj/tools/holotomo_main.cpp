#include "holotomo/io/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using holotomo::io::RunConfig;

// Loads the config file when given and applies command-line overrides.
struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> weights;
  std::optional<int> max_iters;

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = RunConfig::parse_file(config_path);
    if (seed) cfg.seed = *seed;
    if (weights) {
      if (*weights == "on")
        cfg.mgd.weights = true;
      else if (*weights == "off")
        cfg.mgd.weights = false;
      else
        throw holotomo::ConfigError("--weights expects on or off");
    }
    if (max_iters) {
      if (*max_iters < 1) throw holotomo::ConfigError("--max-iters must be >= 1");
      cfg.mgd.max_iters = *max_iters;
    }
    return cfg;
  }

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "configuration file");
    app->add_option("--out", out_dir, "output directory");
    app->add_option("--seed", seed, "seed override");
    app->add_option("--weights", weights, "per-slice weighting: on|off");
    app->add_option("--max-iters", max_iters, "iteration cap override");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-hologram 3D field reconstruction"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string input;
  bool input_is_field = false;
  double sweep_min = 0.0, sweep_max = 0.0, sweep_step = 0.0;
  bool have_sweep = false;

  auto* sim = app.add_subcommand("simulate", "synthesize a phantom hologram");
  opts.attach(sim);

  auto* dem = app.add_subcommand("demodulate", "recover the complex field from a hologram");
  opts.attach(dem);
  dem->add_option("input", input, "hologram (.pgm or .htf)")->required();

  auto* foc = app.add_subcommand("focus", "amplitude-contrast focus scan of a field file");
  opts.attach(foc);
  foc->add_option("input", input, "detector field (.htf)")->required();

  auto* rec = app.add_subcommand("reconstruct", "full pipeline: hologram or field to volume");
  opts.attach(rec);
  rec->add_option("input", input, "hologram (.pgm/.htf) or demodulated field")->required();
  rec->add_flag("--field", input_is_field, "input is already a demodulated complex field");

  auto* ins = app.add_subcommand("inspect", "summarize a field or volume file");
  opts.attach(ins);
  ins->add_option("input", input, "field or volume (.htf)")->required();
  auto* sweep_opt = ins->add_option_group("sweep", "back-propagation sweep image");
  sweep_opt->add_option("--sweep-min", sweep_min, "sweep start, um");
  sweep_opt->add_option("--sweep-max", sweep_max, "sweep end, um");
  sweep_opt->add_option("--sweep-step", sweep_step, "sweep step, um");

  auto* exp = app.add_subcommand("export", "write amplitude/phase images for a field or volume");
  opts.attach(exp);
  exp->add_option("input", input, "field or volume (.htf)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : holotomo::io::kExitConfig;
  }
  have_sweep = sweep_step > 0.0 || sweep_max > 0.0;

  return holotomo::io::run_guarded(std::cerr, [&] {
    const RunConfig cfg = opts.resolve();
    if (sim->parsed()) {
      holotomo::io::cmd_simulate(cfg, opts.out_dir, std::cout);
    } else if (dem->parsed()) {
      holotomo::io::cmd_demodulate(cfg, input, opts.out_dir, std::cout);
    } else if (foc->parsed()) {
      holotomo::io::cmd_focus(cfg, input, opts.out_dir, std::cout);
    } else if (rec->parsed()) {
      holotomo::io::cmd_reconstruct(cfg, input, input_is_field, opts.out_dir, std::cout);
    } else if (ins->parsed()) {
      std::optional<holotomo::io::SweepSpec> sweep;
      if (have_sweep) sweep = holotomo::io::SweepSpec{sweep_min, sweep_max, sweep_step};
      holotomo::io::cmd_inspect(cfg, input, sweep, opts.out_dir, std::cout);
    } else if (exp->parsed()) {
      holotomo::io::cmd_export(input, opts.out_dir, std::cout);
    }
  });
}
