#include "pffc/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonArgs {
  std::string preset;
  std::string config_file;
  std::string out_dir;
  int mesh_n = 0;
  int timesteps = 0;
  std::string snapshots;
};

void add_common(CLI::App* cmd, CommonArgs& args, const char* default_preset) {
  args.preset = default_preset;
  cmd->add_option("--preset", args.preset, "built-in preset: example1, example2, desk")
      ->capture_default_str();
  cmd->add_option("--config", args.config_file, "key = value overrides applied on the preset");
  cmd->add_option("--out", args.out_dir, "output directory (default $PFFC_OUT or pffc_out)");
  cmd->add_option("--mesh", args.mesh_n, "cells per side (even, >= 2)");
  cmd->add_option("--timesteps", args.timesteps, "number of time steps");
}

// Precedence: preset < config file < command-line flags.
pffc::ExperimentConfig resolve(const CommonArgs& args) {
  pffc::ExperimentConfig config = pffc::preset(args.preset);
  if (!args.config_file.empty()) pffc::apply_config_file(config, args.config_file);
  if (args.mesh_n > 0) config.mesh_n = args.mesh_n;
  if (args.timesteps > 0) config.timesteps = args.timesteps;
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (!args.snapshots.empty()) config.snapshots = args.snapshots;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-field fracture optimal control: forward solver and reduced Newton-CG"};
  app.require_subcommand(1);

  CommonArgs run_args, verify_args, grad_args;

  CLI::App* run = app.add_subcommand("run", "optimize a configured experiment");
  add_common(run, run_args, "example1");
  run->add_option("--snapshots", run_args.snapshots,
                  "VTK snapshot steps: 'auto', 'none', or e.g. '20,30,40'");

  CLI::App* verify = app.add_subcommand("verify", "run the self-check suite (small meshes only)");
  add_common(verify, verify_args, "desk");

  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference sweeps of gradient and Hessian");
  add_common(gradcheck, grad_args, "desk");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return pffc::run_experiment(resolve(run_args), std::cout);
    if (verify->parsed()) return pffc::run_verification(resolve(verify_args), std::cout);
    if (gradcheck->parsed()) return pffc::run_gradcheck(resolve(grad_args), std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
