#include "pffc/forward.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <stdexcept>

namespace pffc {

double ForwardReport::max_violation_sq() const {
  double v = 0.0;
  for (const auto& s : steps) v = std::max(v, s.violation_sq);
  return v;
}

ForwardSolver::ForwardSolver(const Assembler& assembler, NewtonSettings settings)
    : assembler_(&assembler), settings_(settings) {
  if (settings_.abs_tol <= 0.0 || settings_.rel_tol <= 0.0 || settings_.max_iter < 1)
    throw std::invalid_argument("ForwardSolver: invalid Newton settings");
}

FieldVector ForwardSolver::solve_initial(const FieldVector& initial_data) const {
  const SparseMat& M = assembler_->mass_full();
  Eigen::SimplicialLLT<SparseMat> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("solve_initial: mass matrix factorization failed");
  return llt.solve(M * initial_data);
}

std::pair<FieldVector, StepReport> ForwardSolver::step_state(double dt, const Control& q,
                                                             const FieldVector& U_prev) const {
  const Mesh& mesh = assembler_->mesh();
  StepContext ctx{dt, &U_prev};
  StepReport report;

  FieldVector U = U_prev;  // warm start; satisfies the Dirichlet condition
  Eigen::VectorXd R = assembler_->state_residual(ctx, q, U);
  zero_dirichlet_rows(mesh, R);
  double res = R.norm();
  report.res_initial = res;
  report.residual_history.push_back(res);
  const double tol = std::max(settings_.abs_tol, settings_.rel_tol * res);

  SparseMat K_frozen;  // Jacobian active set of the first iterate, if requested
  if (!settings_.active_set_freeze) {
    K_frozen = assembler_->state_jacobian(ctx, U);
    apply_dirichlet(mesh, K_frozen, nullptr);
  }

  while (res > tol && report.newton_iters < settings_.max_iter) {
    SparseMat K;
    if (settings_.active_set_freeze) {
      K = assembler_->state_jacobian(ctx, U);
      apply_dirichlet(mesh, K, nullptr);
    } else {
      K = K_frozen;
    }
    Eigen::SparseLU<SparseMat> lu(K);
    if (lu.info() != Eigen::Success) break;
    const Eigen::VectorXd delta = lu.solve(-R);

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= settings_.max_backtracks; ++bt) {
      const FieldVector U_trial = U + step * delta;
      Eigen::VectorXd R_trial = assembler_->state_residual(ctx, q, U_trial);
      zero_dirichlet_rows(mesh, R_trial);
      const double res_trial = R_trial.norm();
      if (res_trial < res || res_trial <= settings_.abs_tol) {
        U = U_trial;
        R = std::move(R_trial);
        res = res_trial;
        accepted = true;
        report.backtracks += bt;
        break;
      }
      step *= 0.5;
    }
    ++report.newton_iters;
    report.residual_history.push_back(res);
    if (!accepted) break;  // line search exhausted
  }

  report.res_final = res;
  report.converged = res <= tol;
  report.active_qps = assembler_->active_count(U, U_prev);
  report.violation_sq = assembler_->violation_norm_sq(U, U_prev);
  return {U, report};
}

ForwardResult ForwardSolver::solve_forward(const Control& q, const FieldVector& initial_data,
                                           const std::vector<double>& times) const {
  if (times.size() < 2 || times.front() != 0.0)
    throw std::invalid_argument("solve_forward: need times 0 = t_0 < ... < t_M");
  for (std::size_t m = 1; m < times.size(); ++m)
    if (times[m] <= times[m - 1])
      throw std::invalid_argument("solve_forward: times must be strictly increasing");

  ForwardResult result;
  result.trajectory.times = times;
  result.trajectory.states.reserve(times.size());
  result.trajectory.states.push_back(solve_initial(initial_data));

  for (std::size_t m = 1; m < times.size(); ++m) {
    auto [U, report] = step_state(times[m] - times[m - 1], q, result.trajectory.states[m - 1]);
    result.trajectory.states.push_back(std::move(U));
    const bool converged = report.converged;
    result.report.steps.push_back(std::move(report));
    if (!converged) {
      result.report.failed_step = static_cast<int>(m);
      break;
    }
  }
  return result;
}

std::vector<Eigen::VectorXd> stepwise_residuals(const Assembler& assembler, const Control& q,
                                                const Trajectory& traj,
                                                const FieldVector& initial_data) {
  std::vector<Eigen::VectorXd> blocks;
  blocks.reserve(traj.states.size());
  blocks.push_back(assembler.mass_full() * (traj.states[0] - initial_data));
  for (int m = 1; m <= traj.num_steps(); ++m) {
    StepContext ctx{traj.dt(m), &traj.states[m - 1]};
    blocks.push_back(assembler.state_residual(ctx, q, traj.states[m]));
  }
  return blocks;
}

std::vector<Eigen::VectorXd> space_time_residual(const Assembler& assembler, const Control& q,
                                                 const Trajectory& traj,
                                                 const FieldVector& initial_data) {
  const double gamma = assembler.params().gamma;
  const double eta = assembler.params().eta;
  std::vector<Eigen::VectorXd> blocks;
  blocks.reserve(traj.states.size());
  blocks.push_back(assembler.mass_full() * (traj.states[0] - initial_data));
  for (int m = 1; m <= traj.num_steps(); ++m) {
    const FieldVector& cur = traj.states[m];
    const FieldVector& prv = traj.states[m - 1];
    Eigen::VectorXd block =
        gamma * assembler.restricted_phi_functional(cur, prv, cur) -
        gamma * assembler.restricted_phi_functional(cur, prv, prv) +
        eta * (assembler.mass_phi() * cur) - eta * (assembler.mass_phi() * prv) +
        traj.dt(m) * assembler.a_functional(q, cur);
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace pffc
