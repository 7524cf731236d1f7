#pragma once

#include "pffc/sensitivity.hpp"

#include <vector>

namespace pffc {

/// Outer Newton-CG controls. The iteration stops as soon as the smaller of
/// the relative and absolute gradient norms falls below newton_tol.
struct OptSettings {
  double newton_tol = 1e-8;
  int max_newton = 30;
  double cg_forcing = 1e-2;  ///< relative CG residual tolerance
  int cg_max = 100;
  double damping = 1.0;  ///< step fraction; 1 = full Newton steps
};

/// One row of the optimizer log. cg_count refers to the CG solve that
/// produced this iterate (0 for the initial one).
struct IterationRecord {
  int iter = 0;
  int cg_count = 0;
  double rel_residual = 0.0;
  double abs_residual = 0.0;
  double cost = 0.0;
  double tracking = 0.0;
  double tikhonov = 0.0;
  double max_force = 0.0;
  bool flagged = false;  ///< CG breakdown or solver trouble on the way here
  Control control;       ///< iterate the row was logged at (not serialized)
};

struct CostEval {
  double total = 0.0;
  double tracking = 0.0;
  double tikhonov = 0.0;
  ForwardResult forward;
  bool ok() const { return forward.ok(); }
};

struct NewtonCgResult {
  Control q;
  std::vector<IterationRecord> records;
  bool converged = false;
  Trajectory states;   ///< forward trajectory at the returned control
  Trajectory adjoint;  ///< adjoint trajectory at the returned control
};

/// Finite-difference comparison of one direction over a step sweep.
struct FdDirectionReport {
  std::vector<double> steps;
  std::vector<double> rel_errors;
  double analytic = 0.0;       ///< reference value (scalar checks only)
  double min_rel_error = 1.0;
  double observed_order = 0.0;
};

struct FdCheckReport {
  std::vector<FdDirectionReport> directions;
  /// Worst over directions of the per-direction minimum relative error.
  double max_of_min_rel_error = 0.0;
  /// Extra diagnostic for the Hessian check: relative asymmetry of
  /// (H d1, d2) across the supplied direction pairs.
  double symmetry_rel_error = 0.0;
};

/// Least-squares-free order estimate: median slope of the error-vs-step
/// log-log curve on its decreasing branch (steps must be descending).
double estimate_order(const std::vector<double>& steps, const std::vector<double>& errors);

/// Reduced cost j(q) = J(q, S(q)), its adjoint gradient, Hessian-vector
/// products via tangent + adjoint-Hessian sweeps, and the outer Newton-CG
/// loop, all over the Gamma_N-weighted control inner product.
class ReducedProblem {
 public:
  ReducedProblem(const Mesh& mesh, const ModelParams& params, CostParams cost,
                 FieldVector initial_data, std::vector<double> times,
                 NewtonSettings forward_settings = {}, bool cache_factorizations = true);

  const Assembler& assembler() const { return assembler_; }
  const ForwardSolver& forward() const { return forward_; }
  const CostParams& cost_params() const { return cost_; }
  const std::vector<double>& times() const { return times_; }
  const FieldVector& initial_data() const { return initial_data_; }
  int num_steps() const { return static_cast<int>(times_.size()) - 1; }

  double gn_dot(const Control& a, const Control& b) const;
  double gn_norm(const Control& a) const;

  /// (alpha/2) * M * ||q - q_d||^2 on Gamma_N (the control is constant in
  /// time, so the sum over steps collapses to the factor M).
  double tikhonov_value(const Control& q) const;

  /// Runs the forward solver and splits the cost into tracking + Tikhonov.
  CostEval reduced_cost(const Control& q) const;

  /// Riesz representer of j'(q) in the Gamma_N inner product:
  /// g = alpha M (q - q_d) + sum_m dt_m z_{u,y}(t_m)|_{Gamma_N}.
  Control reduced_gradient(const Control& q, const Trajectory& adjoint) const;

  /// H dq via one tangent and one adjoint-Hessian sweep on cached operators.
  Control hessian_vector(const SweepOperators& ops, const Trajectory& adjoint,
                         const Control& dq) const;
  /// Convenience overload that builds the operators for one product.
  Control hessian_vector(const Trajectory& states, const Trajectory& adjoint,
                         const Control& dq) const;

  NewtonCgResult newton_cg(const Control& q0, const OptSettings& settings) const;

  /// Central differences of the reduced cost against (g, dq) over the sweep.
  FdCheckReport fd_check_gradient(const Control& q, const std::vector<Control>& directions,
                                  const std::vector<double>& steps) const;

  /// Central differences of the reduced gradient against H dq; also fills
  /// the pairwise symmetry diagnostic when two or more directions are given.
  FdCheckReport fd_check_hessian(const Control& q, const std::vector<Control>& directions,
                                 const std::vector<double>& steps) const;

 private:
  struct CgOutcome {
    Control step;
    int iterations = 0;
    bool flagged = false;
  };
  CgOutcome cg_solve(const SweepOperators& ops, const Trajectory& adjoint, const Control& g,
                     const OptSettings& settings) const;

  Assembler assembler_;
  ForwardSolver forward_;
  CostParams cost_;
  FieldVector initial_data_;
  std::vector<double> times_;
  bool cache_factorizations_ = true;
};

}  // namespace pffc
