#pragma once

#include "pffc/assembly.hpp"

#include <optional>
#include <vector>

namespace pffc {

/// Controls for the per-step semi-smooth Newton iteration.
struct NewtonSettings {
  double abs_tol = 1e-12;
  double rel_tol = 1e-9;
  int max_iter = 50;
  int max_backtracks = 20;
  /// true: the Jacobian uses the activity indicator of the current iterate
  /// (recomputed every iteration, held fixed within it). false: the Jacobian
  /// keeps the indicator of the step's first iterate; the residual always
  /// sees the current indicator.
  bool active_set_freeze = true;
};

/// Convergence data of a single implicit step.
struct StepReport {
  int newton_iters = 0;
  int backtracks = 0;
  double res_initial = 0.0;
  double res_final = 0.0;
  int active_qps = 0;
  double violation_sq = 0.0;  ///< ||(phi_m - phi_{m-1})_+||^2 at the solution
  bool converged = false;
  std::vector<double> residual_history;
};

struct ForwardReport {
  std::vector<StepReport> steps;
  std::optional<int> failed_step;
  bool ok() const { return !failed_step.has_value(); }
  double max_violation_sq() const;
};

struct ForwardResult {
  Trajectory trajectory;
  ForwardReport report;
  bool ok() const { return report.ok(); }
};

/// Solves the discretized state equation: an L2 projection of the initial
/// data followed by M implicit steps, each a semi-smooth Newton solve with
/// residual backtracking on a direct factorization of the step Jacobian.
class ForwardSolver {
 public:
  ForwardSolver(const Assembler& assembler, NewtonSettings settings = {});

  /// Mass-matrix projection of nodal initial data onto the discrete space;
  /// with matching spaces the output reproduces the input.
  FieldVector solve_initial(const FieldVector& initial_data) const;

  /// One implicit step from the converged state U_prev over step size dt.
  std::pair<FieldVector, StepReport> step_state(double dt, const Control& q,
                                                const FieldVector& U_prev) const;

  ForwardResult solve_forward(const Control& q, const FieldVector& initial_data,
                              const std::vector<double>& times) const;

  const NewtonSettings& settings() const { return settings_; }

 private:
  const Assembler* assembler_;
  NewtonSettings settings_;
};

/// Residual blocks of the time-stepping form: block 0 is the initial
/// projection residual, block m the step-m residual on the given trajectory.
std::vector<Eigen::VectorXd> stepwise_residuals(const Assembler& assembler, const Control& q,
                                                const Trajectory& traj,
                                                const FieldVector& initial_data);

/// The same blocks assembled from the summed space-time form, with the
/// restricted and plain inner products integrated separately. Agreement
/// with stepwise_residuals is an exactness check on the jump bookkeeping.
std::vector<Eigen::VectorXd> space_time_residual(const Assembler& assembler, const Control& q,
                                                 const Trajectory& traj,
                                                 const FieldVector& initial_data);

}  // namespace pffc
