#pragma once

#include "pffc/config.hpp"
#include "pffc/optimizer.hpp"

#include <random>
#include <string>
#include <vector>

namespace pffc {

/// Outcome of one self-check; value is the measured quantity compared
/// against threshold (direction depends on the check, see detail).
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

FieldVector random_field(const Mesh& mesh, std::mt19937& rng);
Control random_control(const Mesh& mesh, std::mt19937& rng);

/// Central differences of a against a'_u on a 2x2 mesh with random fields;
/// passes when the minimum relative error stays below 1e-6 and the observed
/// order is 2.0 +- 0.3 over the step sweep 1e-2..1e-7.
CheckResult check_kernel_fd_first(unsigned seed = 11);

/// Same sweep for a'_u against a''_uu.
CheckResult check_kernel_fd_second(unsigned seed = 12);

/// phi0 = 1, q = 0: the forward solver must return the exact root with
/// per-step residuals below 1e-12.
CheckResult check_trivial_forward();

/// Stepwise residual blocks against the summed space-time form on random
/// trajectories (4x4 mesh, M = 3), 1e-13 absolute per component.
CheckResult check_residual_equivalence(unsigned seed = 13);

/// Adjoint-based directional derivative against the tangent-based one for
/// 10 random control directions (4x4 mesh, M = 3), 1e-10 relative.
CheckResult check_duality(unsigned seed = 14);

/// Relative asymmetry of (H dq1, dq2) on the same small instance, 1e-8.
CheckResult check_hessian_symmetry(unsigned seed = 15);

/// Reduced-gradient finite-difference check on the given (small) setup;
/// threshold 1e-4 on the worst direction minimum.
CheckResult check_gradient_fd(const ExperimentConfig& config, unsigned seed = 16);

/// Hessian-vector finite-difference check, threshold 1e-3.
CheckResult check_hessian_fd(const ExperimentConfig& config, unsigned seed = 17);

/// Forward runs at gamma = 1e3 and gamma = 1e5: the peak squared
/// irreversibility violation must drop by at least a factor 10.
CheckResult check_penalty_scaling(const ExperimentConfig& config);

/// All of the above with the given small configuration.
std::vector<CheckResult> run_all_checks(const ExperimentConfig& config);

/// One `PASS name value threshold detail` line per check.
std::string format_check_line(const CheckResult& r);

}  // namespace pffc
