#pragma once

#include "pffc/forward.hpp"
#include "pffc/mesh.hpp"
#include "pffc/model.hpp"
#include "pffc/optimizer.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace pffc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Horizontal slit selector for initial/desired phase-fields.
struct SlitSpec {
  double x0 = 0.0;
  double x1 = 0.0;
  double halfwidth = 0.0;
  bool empty() const { return x1 < x0; }
};

/// Full description of one run: mesh/time grid, model and cost constants,
/// slit geometry, solver settings, and output options. Values marked "auto"
/// in the config file resolve against the mesh spacing.
struct ExperimentConfig {
  std::string preset_name = "example1";

  int mesh_n = 64;
  int timesteps = 40;
  double final_time = 1.0;

  double gc = 1.0;
  double epsilon = -1.0;  ///< <= 0: auto, 4 * sqrt(2)/n
  double kappa = 1e-10;
  double gamma = 1e5;
  double eta = 1e3;
  double eta0 = 1.0;
  double youngs_modulus = 1e6;
  double poisson_ratio = 0.2;

  double alpha = 4.75e-10;
  double q_initial = 1.0;
  double q_nominal = 1e3;

  SlitSpec phi0_slit{0.5, 1.0, 0.0};
  SlitSpec phid_slit{0.25, 0.5, -1.0};  ///< halfwidth < 0: auto
  double phid_halfwidth_cells = 1.0;    ///< auto halfwidth in units of sqrt(2)/n

  OptSettings opt;
  NewtonSettings fwd;

  std::string out_dir;          ///< empty: $PFFC_OUT or "pffc_out"
  std::string snapshots = "none";  ///< "none", "auto", or comma-separated indices

  double resolved_epsilon() const;
  double resolved_phid_halfwidth() const;
  ModelParams model_params() const;
  CostParams cost_params(const Mesh& mesh) const;
  FieldVector initial_state(const Mesh& mesh) const;
  std::vector<double> times() const;
  std::vector<int> snapshot_indices() const;
  std::string resolved_out_dir() const;
};

/// Built-in presets: "example1" (edge notch, 64x64), "example2" (center
/// notch, 128x128), "desk" (small 8x8 verification setup).
ExperimentConfig preset(const std::string& name);

/// Apply `key = value` overrides from a flat text file; '#' starts a
/// comment. Unknown keys and malformed lines raise ConfigError with the
/// line number.
void apply_config_file(ExperimentConfig& config, const std::string& path);

/// Preset "example1" overridden by the given file.
ExperimentConfig load_config(const std::string& path);

}  // namespace pffc
