#pragma once

#include "pffc/mesh.hpp"
#include "pffc/model.hpp"
#include "pffc/types.hpp"

namespace pffc {

/// Data of one implicit time step: step size and previous-step state.
/// The penalty/viscous jump terms couple phi(t_m) to the phi part of
/// prev_state; they carry no dt factor.
struct StepContext {
  double dt = 0.0;
  const FieldVector* prev_state = nullptr;
};

/// Element-level kernels of the semilinear form a, its derivatives, and the
/// penalty/viscous time coupling. Single source of truth for all solvers:
/// the scalar evaluators and the assembled operators run the same
/// quadrature-point expressions.
class Assembler {
 public:
  Assembler(const Mesh& mesh, const ModelParams& params);

  const Mesh& mesh() const { return *mesh_; }
  const ModelParams& params() const { return params_; }
  const SparseMat& boundary_mass() const { return boundary_mass_; }
  /// phi-phi block of the mass matrix in the full interleaved layout.
  const SparseMat& mass_phi() const { return mass_phi_; }
  /// Full block-diagonal mass matrix (u_x, u_y, phi).
  const SparseMat& mass_full() const { return mass_full_; }

  // -- scalar kernels ------------------------------------------------------

  /// a(q,U)(Phi) = g(phi)(C e(u), e(Phi_u)) + Gc*eps (grad phi, grad Phi_phi)
  ///   - Gc/eps (1-phi, Phi_phi) + (1-kappa)(phi C e(u):e(u), Phi_phi)
  ///   - (q, Phi_{u,y})_{Gamma_N}.
  double eval_a(const Control& q, const FieldVector& U, const FieldVector& Phi) const;

  /// First derivative of a with respect to the state, a'_u(U)(dU, Phi);
  /// symmetric bilinear in (dU, Phi) and independent of q.
  double eval_a_prime_u(const FieldVector& U, const FieldVector& dU,
                        const FieldVector& Phi) const;

  /// a'_q(dq)(Phi) = -(dq, Phi_{u,y})_{Gamma_N}; independent of U and q.
  double eval_a_prime_q(const Control& dq, const FieldVector& Phi) const;

  /// Second derivative a''_uu(U)(dU, Phi, Z); symmetric in (dU, Phi).
  double eval_a_second_uu(const FieldVector& U, const FieldVector& dU, const FieldVector& Phi,
                          const FieldVector& Z) const;

  /// gamma (chi (phi_m - phi_prev), psi) + eta (phi_m - phi_prev, psi)
  /// with the activity indicator chi evaluated per quadrature point.
  double eval_penalty_coupling(const StepContext& ctx, const FieldVector& U_m,
                               const FieldVector& Psi) const;

  // -- assembled operators --------------------------------------------------

  /// Residual of one implicit step (unconstrained):
  /// R(Phi) = penalty/viscous coupling + dt * a(q, U)(Phi).
  Eigen::VectorXd state_residual(const StepContext& ctx, const Control& q,
                                 const FieldVector& U) const;

  /// Vector A with Phi^T A = a(q, U)(Phi).
  Eigen::VectorXd a_functional(const Control& q, const FieldVector& U) const;

  /// Vector V with Phi^T V = (w_phi, Phi_phi) restricted to the active set
  /// of the pair (U_curr, U_prev); W supplies the phi weight field.
  Eigen::VectorXd restricted_phi_functional(const FieldVector& U_curr,
                                            const FieldVector& U_prev,
                                            const FieldVector& W) const;

  /// Step Jacobian with the activity indicator frozen at the current
  /// iterate: (gamma chi + eta) M_phi + dt * A'(U). Bitwise symmetric.
  SparseMat state_jacobian(const StepContext& ctx, const FieldVector& U) const;

  /// scale * A'(U), the assembled bilinear form a'_u. Bitwise symmetric.
  SparseMat a_prime_matrix(const FieldVector& U, double scale) const;

  /// (gamma chi + eta)-weighted phi-phi mass in the full layout, with chi
  /// taken pointwise from (phi_curr, phi_prev).
  SparseMat penalty_mass(const FieldVector& U_curr, const FieldVector& U_prev) const;

  /// Load vector L with Phi^T L = (q, Phi_{u,y})_{Gamma_N}.
  Eigen::VectorXd boundary_load(const Control& q) const;

  /// u_y values of a coupled field at the Gamma_N nodes, ascending x.
  Eigen::VectorXd trace_uy(const FieldVector& U) const;

  /// Vector T with Phi^T T = (phi - phi_d, Phi_phi); rows on phi dofs.
  Eigen::VectorXd tracking_gradient(const FieldVector& U, const ScalarField& phi_d) const;

  /// 0.5 * || phi - phi_d ||^2 over the domain.
  double tracking_value(const FieldVector& U, const ScalarField& phi_d) const;

  /// Vector b with Phi^T b = a''_uu(U)(dU, Phi, Z).
  Eigen::VectorXd second_derivative_rhs(const FieldVector& U, const FieldVector& dU,
                                        const FieldVector& Z) const;

  /// || (phi_m - phi_prev)_+ ||^2, the squared irreversibility violation.
  double violation_norm_sq(const FieldVector& U_m, const FieldVector& U_prev) const;

  /// Number of quadrature points with the penalty indicator active.
  int active_count(const FieldVector& U_m, const FieldVector& U_prev) const;

  /// Embed a nodal scalar field into the phi slots of the full layout.
  FieldVector embed_phi(const ScalarField& f) const;

 private:
  struct QpShapes {
    std::array<double, 4> value;
    std::array<Eigen::Vector2d, 4> grad_phys;
    double weight;  // quadrature weight times cell area
  };
  struct LocalFields {
    Eigen::Matrix2d strain;
    double phi;
    Eigen::Vector2d grad_phi;
  };

  LocalFields local_fields(const FieldVector& U, const std::array<int, 4>& nodes,
                           const QpShapes& s) const;
  double boundary_pairing(const Control& q, const FieldVector& Phi) const;

  const Mesh* mesh_;
  ModelParams params_;
  std::array<QpShapes, 4> qp_;
  SparseMat boundary_mass_;
  SparseMat mass_phi_;
  SparseMat mass_full_;
};

}  // namespace pffc
