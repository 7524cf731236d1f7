#include "pffc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pffc {

double estimate_order(const std::vector<double>& steps, const std::vector<double>& errors) {
  if (steps.size() != errors.size() || steps.size() < 2) return 0.0;
  std::size_t imin = 0;
  for (std::size_t i = 1; i < errors.size(); ++i)
    if (errors[i] < errors[imin]) imin = i;
  std::vector<double> slopes;
  for (std::size_t i = 0; i + 1 <= imin; ++i) {
    if (errors[i] <= 0.0 || errors[i + 1] <= 0.0) continue;
    slopes.push_back(std::log(errors[i] / errors[i + 1]) / std::log(steps[i] / steps[i + 1]));
  }
  if (slopes.empty()) {
    if (errors[0] > 0.0 && errors[1] > 0.0)
      return std::log(errors[0] / errors[1]) / std::log(steps[0] / steps[1]);
    return 0.0;
  }
  std::sort(slopes.begin(), slopes.end());
  return slopes[slopes.size() / 2];
}

ReducedProblem::ReducedProblem(const Mesh& mesh, const ModelParams& params, CostParams cost,
                               FieldVector initial_data, std::vector<double> times,
                               NewtonSettings forward_settings, bool cache_factorizations)
    : assembler_(mesh, params),
      forward_(assembler_, forward_settings),
      cost_(std::move(cost)),
      initial_data_(std::move(initial_data)),
      times_(std::move(times)),
      cache_factorizations_(cache_factorizations) {
  cost_.validate();
  if (cost_.q_d.size() != mesh.nodes_per_side())
    throw std::invalid_argument("ReducedProblem: q_d size must match the Gamma_N trace space");
  if (cost_.phi_d.size() != mesh.num_nodes())
    throw std::invalid_argument("ReducedProblem: phi_d size must match the node count");
}

double ReducedProblem::gn_dot(const Control& a, const Control& b) const {
  return a.dot(assembler_.boundary_mass() * b);
}

double ReducedProblem::gn_norm(const Control& a) const { return std::sqrt(gn_dot(a, a)); }

double ReducedProblem::tikhonov_value(const Control& q) const {
  const Control d = q - cost_.q_d;
  return 0.5 * cost_.alpha * num_steps() * gn_dot(d, d);
}

CostEval ReducedProblem::reduced_cost(const Control& q) const {
  CostEval eval;
  eval.forward = forward_.solve_forward(q, initial_data_, times_);
  for (int m = 1; m < static_cast<int>(eval.forward.trajectory.states.size()); ++m)
    eval.tracking += assembler_.tracking_value(eval.forward.trajectory.states[m], cost_.phi_d);
  eval.tikhonov = tikhonov_value(q);
  eval.total = eval.tracking + eval.tikhonov;
  return eval;
}

Control ReducedProblem::reduced_gradient(const Control& q, const Trajectory& adjoint) const {
  Control g = cost_.alpha * num_steps() * (q - cost_.q_d);
  for (int m = 1; m <= num_steps(); ++m)
    g += adjoint.dt(m) * assembler_.trace_uy(adjoint.states[m]);
  return g;
}

Control ReducedProblem::hessian_vector(const SweepOperators& ops, const Trajectory& adjoint,
                                       const Control& dq) const {
  const Trajectory tangent = solve_tangent(ops, dq);
  const Trajectory dz = solve_adjoint_hessian(ops, adjoint, tangent);
  Control h = cost_.alpha * num_steps() * dq;
  for (int m = 1; m <= num_steps(); ++m) h += dz.dt(m) * assembler_.trace_uy(dz.states[m]);
  return h;
}

Control ReducedProblem::hessian_vector(const Trajectory& states, const Trajectory& adjoint,
                                       const Control& dq) const {
  SweepOperators ops(assembler_, states, cache_factorizations_);
  return hessian_vector(ops, adjoint, dq);
}

ReducedProblem::CgOutcome ReducedProblem::cg_solve(const SweepOperators& ops,
                                                   const Trajectory& adjoint, const Control& g,
                                                   const OptSettings& settings) const {
  CgOutcome out;
  out.step = Control::Zero(g.size());
  Control r = -g;
  const double rr0 = gn_dot(r, r);
  if (rr0 == 0.0) return out;
  Control p = r;
  double rr = rr0;
  for (int k = 1; k <= settings.cg_max; ++k) {
    const Control hp = hessian_vector(ops, adjoint, p);
    const double php = gn_dot(p, hp);
    out.iterations = k;
    if (php <= 0.0) {
      // Negative curvature: keep the progress so far; when it happens on
      // the first direction, take a curvature-scaled descent step instead.
      if (k == 1 && php < 0.0) out.step = (rr / -php) * r;
      if (k == 1 && php == 0.0) out.step = r;
      out.flagged = true;
      return out;
    }
    const double alpha = rr / php;
    out.step += alpha * p;
    r -= alpha * hp;
    const double rr_new = gn_dot(r, r);
    if (std::sqrt(rr_new) <= settings.cg_forcing * std::sqrt(rr0)) return out;
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return out;
}

NewtonCgResult ReducedProblem::newton_cg(const Control& q0, const OptSettings& settings) const {
  if (settings.newton_tol <= 0.0 || settings.cg_forcing <= 0.0)
    throw std::invalid_argument("newton_cg: tolerances must be positive");

  NewtonCgResult result;
  result.q = q0;
  int cg_prev = 0;
  bool flag_prev = false;
  double abs0 = -1.0;

  for (int iter = 0;; ++iter) {
    const CostEval eval = reduced_cost(result.q);
    if (!eval.ok()) {
      IterationRecord rec;
      rec.iter = iter;
      rec.cg_count = cg_prev;
      rec.cost = eval.total;
      rec.tracking = eval.tracking;
      rec.tikhonov = eval.tikhonov;
      rec.max_force = result.q.cwiseAbs().maxCoeff();
      rec.control = result.q;
      rec.flagged = true;
      result.records.push_back(rec);
      result.states = eval.forward.trajectory;
      break;
    }
    SweepOperators ops(assembler_, eval.forward.trajectory, cache_factorizations_);
    const Trajectory adjoint = solve_adjoint(ops, cost_.phi_d);
    const Control g = reduced_gradient(result.q, adjoint);
    const double abs_res = gn_norm(g);
    if (iter == 0) abs0 = abs_res;
    const double rel_res = (iter == 0) ? 1.0 : (abs0 > 0.0 ? abs_res / abs0 : 0.0);

    IterationRecord rec;
    rec.iter = iter;
    rec.cg_count = cg_prev;
    rec.rel_residual = rel_res;
    rec.abs_residual = abs_res;
    rec.cost = eval.total;
    rec.tracking = eval.tracking;
    rec.tikhonov = eval.tikhonov;
    rec.max_force = result.q.cwiseAbs().maxCoeff();
    rec.control = result.q;
    rec.flagged = flag_prev;
    result.records.push_back(rec);

    result.states = eval.forward.trajectory;
    result.adjoint = adjoint;

    if (std::min(rel_res, abs_res) <= settings.newton_tol) {
      result.converged = true;
      break;
    }
    if (iter >= settings.max_newton) break;

    const CgOutcome cg = cg_solve(ops, adjoint, g, settings);
    result.q += settings.damping * cg.step;
    cg_prev = cg.iterations;
    flag_prev = cg.flagged;
  }
  return result;
}

FdCheckReport ReducedProblem::fd_check_gradient(const Control& q,
                                                const std::vector<Control>& directions,
                                                const std::vector<double>& steps) const {
  const CostEval base = reduced_cost(q);
  SweepOperators ops(assembler_, base.forward.trajectory, cache_factorizations_);
  const Trajectory adjoint = solve_adjoint(ops, cost_.phi_d);
  const Control g = reduced_gradient(q, adjoint);

  FdCheckReport report;
  for (const Control& dir : directions) {
    FdDirectionReport dr;
    dr.steps = steps;
    dr.analytic = gn_dot(g, dir);
    const double scale = std::max(std::abs(dr.analytic), 1e-300);
    for (double s : steps) {
      const double jp = reduced_cost(q + s * dir).total;
      const double jm = reduced_cost(q - s * dir).total;
      const double fd = (jp - jm) / (2.0 * s);
      dr.rel_errors.push_back(std::abs(fd - dr.analytic) / scale);
    }
    dr.min_rel_error = *std::min_element(dr.rel_errors.begin(), dr.rel_errors.end());
    dr.observed_order = estimate_order(dr.steps, dr.rel_errors);
    report.max_of_min_rel_error = std::max(report.max_of_min_rel_error, dr.min_rel_error);
    report.directions.push_back(std::move(dr));
  }
  return report;
}

FdCheckReport ReducedProblem::fd_check_hessian(const Control& q,
                                               const std::vector<Control>& directions,
                                               const std::vector<double>& steps) const {
  const CostEval base = reduced_cost(q);
  SweepOperators ops(assembler_, base.forward.trajectory, cache_factorizations_);
  const Trajectory adjoint = solve_adjoint(ops, cost_.phi_d);

  auto gradient_at = [&](const Control& qq) {
    const CostEval eval = reduced_cost(qq);
    SweepOperators o(assembler_, eval.forward.trajectory, cache_factorizations_);
    return reduced_gradient(qq, solve_adjoint(o, cost_.phi_d));
  };

  FdCheckReport report;
  std::vector<Control> h_dirs;
  for (const Control& dir : directions) {
    const Control hd = hessian_vector(ops, adjoint, dir);
    h_dirs.push_back(hd);
    FdDirectionReport dr;
    dr.steps = steps;
    const double scale = std::max(gn_norm(hd), 1e-300);
    for (double s : steps) {
      const Control gp = gradient_at(q + s * dir);
      const Control gm = gradient_at(q - s * dir);
      const Control fd = (gp - gm) / (2.0 * s);
      dr.rel_errors.push_back(gn_norm(fd - hd) / scale);
    }
    dr.min_rel_error = *std::min_element(dr.rel_errors.begin(), dr.rel_errors.end());
    dr.observed_order = estimate_order(dr.steps, dr.rel_errors);
    report.max_of_min_rel_error = std::max(report.max_of_min_rel_error, dr.min_rel_error);
    report.directions.push_back(std::move(dr));
  }
  for (std::size_t i = 0; i < directions.size(); ++i) {
    for (std::size_t j = i + 1; j < directions.size(); ++j) {
      const double hij = gn_dot(h_dirs[i], directions[j]);
      const double hji = gn_dot(directions[i], h_dirs[j]);
      const double denom = std::max({std::abs(hij), std::abs(hji), 1e-300});
      report.symmetry_rel_error =
          std::max(report.symmetry_rel_error, std::abs(hij - hji) / denom);
    }
  }
  return report;
}

}  // namespace pffc
