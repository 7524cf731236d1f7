#pragma once

#include "pffc/config.hpp"
#include "pffc/verification.hpp"

#include <iosfwd>
#include <optional>

namespace pffc {

/// Leftmost node x on the y = 0.5 line with phi below the threshold
/// (the crack tip); empty when the line is intact.
std::optional<double> crack_tip_left(const Mesh& mesh, const FieldVector& U,
                                     double threshold = 0.1);

/// Rightmost such node x.
std::optional<double> crack_tip_right(const Mesh& mesh, const FieldVector& U,
                                      double threshold = 0.1);

/// Optimizes the configured setup and writes iterations.csv,
/// force_profile.txt, and any requested VTK snapshots into the output
/// directory. Returns 0 on convergence; solver failures still produce a
/// partial iterations.csv and a nonzero status.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Runs the self-check suite on a small configuration (mesh_n <= 16,
/// timesteps <= 8 enforced) and writes verification.txt. Nonzero status on
/// any failing check.
int run_verification(const ExperimentConfig& config, std::ostream& log);

/// Finite-difference sweeps of the reduced gradient and Hessian-vector
/// product, printed as step/error tables. Nonzero status when the minima
/// miss the verification thresholds.
int run_gradcheck(const ExperimentConfig& config, std::ostream& log);

}  // namespace pffc
