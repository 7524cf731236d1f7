#pragma once

#include "pffc/assembly.hpp"
#include "pffc/forward.hpp"

#include <memory>

namespace pffc {

/// Per-step linear operators shared by the adjoint, tangent, and
/// adjoint-Hessian sweeps around one converged state trajectory.
///
/// All three sweeps solve with the same step matrix
///   K_m = (gamma chi_m + eta) M_phi + dt_m A'(u_m),   m = 1..M,
/// with chi_m the activity indicator of the state pair (phi_m, phi_{m-1}),
/// frozen for every sweep. K_m is symmetric, so one factorization serves the
/// forward (tangent) and backward (adjoint) sweeps; the jump data between
/// neighboring steps uses the penalty mass of the adjacent pair.
class SweepOperators {
 public:
  SweepOperators(const Assembler& assembler, const Trajectory& states,
                 bool cache_factorizations = true);

  const Assembler& assembler() const { return *assembler_; }
  const Trajectory& states() const { return *states_; }
  int num_steps() const { return states_->num_steps(); }

  /// (gamma chi_m + eta)-weighted phi mass of step m (unconstrained).
  const SparseMat& penalty(int m) const { return penalty_[m - 1]; }

  /// Solve K_m x = rhs with the Dirichlet-constrained step matrix.
  Eigen::VectorXd solve(int m, const Eigen::VectorXd& rhs) const;

 private:
  struct Factor;
  const Assembler* assembler_;
  const Trajectory* states_;
  std::vector<SparseMat> penalty_;
  std::vector<SparseMat> matrices_;  // kept only when factorizations are not cached
  std::vector<std::shared_ptr<Factor>> factors_;
  bool cache_ = true;
};

/// Backward adjoint sweep: terminal solve at t_M, interior solves for
/// m = M-1..1 with jump data from z_{m+1}, then the copy closure z_0 = z_1.
/// The right-hand side is the tracking residual (phi_m - phi_d, Phi_phi).
Trajectory solve_adjoint(const SweepOperators& ops, const ScalarField& phi_d);

/// Forward tangent sweep in the control direction dq: zero initial values,
/// then per-step solves with jump data from the previous tangent state.
Trajectory solve_tangent(const SweepOperators& ops, const Control& dq);

/// Backward adjoint-Hessian sweep given the adjoint trajectory and a tangent
/// trajectory; right-hand side (dphi_m, Phi_phi) - dt_m a''_uu(dU_m, Phi, z_m),
/// jump data from dz_{m+1}, copy closure dz_0 = dz_1.
Trajectory solve_adjoint_hessian(const SweepOperators& ops, const Trajectory& adjoint,
                                 const Trajectory& tangent);

}  // namespace pffc
