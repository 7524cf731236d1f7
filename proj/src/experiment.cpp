#include "pffc/experiment.hpp"

#include "pffc/io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace pffc {

namespace {

bool size_guard(const ExperimentConfig& config, std::ostream& log) {
  if (config.mesh_n > 16 || config.timesteps > 8) {
    log << "error: verification runs are limited to mesh_n <= 16 and timesteps <= 8 "
        << "(got mesh_n=" << config.mesh_n << ", timesteps=" << config.timesteps << ")\n";
    return false;
  }
  return true;
}

void log_params(const ExperimentConfig& config, const ModelParams& params, std::ostream& log) {
  log << "preset " << config.preset_name << ": mesh " << config.mesh_n << "x" << config.mesh_n
      << ", M=" << config.timesteps << ", T=" << config.final_time
      << ", eps=" << params.eps << ", gamma=" << params.gamma << ", eta=" << params.eta
      << ", alpha=" << config.alpha << ", q_d=" << config.q_nominal << "\n";
  for (const auto& w : params.validate()) log << "warning: " << w << "\n";
}

}  // namespace

std::optional<double> crack_tip_left(const Mesh& mesh, const FieldVector& U, double threshold) {
  const int j = mesh.n() / 2;  // the y = 0.5 node row
  for (int i = 0; i <= mesh.n(); ++i) {
    if (U[mesh.dof_phi(mesh.node_index(i, j))] < threshold)
      return static_cast<double>(i) / mesh.n();
  }
  return std::nullopt;
}

std::optional<double> crack_tip_right(const Mesh& mesh, const FieldVector& U, double threshold) {
  const int j = mesh.n() / 2;
  for (int i = mesh.n(); i >= 0; --i) {
    if (U[mesh.dof_phi(mesh.node_index(i, j))] < threshold)
      return static_cast<double>(i) / mesh.n();
  }
  return std::nullopt;
}

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
  const ModelParams params = config.model_params();
  log_params(config, params, log);

  const Mesh mesh = Mesh::build(config.mesh_n);
  ReducedProblem problem(mesh, params, config.cost_params(mesh), config.initial_state(mesh),
                         config.times(), config.fwd);
  const Control q0 = Control::Constant(mesh.nodes_per_side(), config.q_initial);

  const NewtonCgResult result = problem.newton_cg(q0, config.opt);

  const std::filesystem::path out(config.resolved_out_dir());
  std::filesystem::create_directories(out);
  write_iterations_csv((out / "iterations.csv").string(), result.records);
  write_force_profile((out / "force_profile.txt").string(), mesh, result.q);

  const std::vector<int> snaps = config.snapshot_indices();
  if (!snaps.empty() && !result.states.states.empty()) {
    for (int idx : snaps) {
      if (idx >= static_cast<int>(result.states.states.size())) continue;
      write_vtk_state((out / ("state_m" + std::to_string(idx) + ".vtk")).string(), mesh,
                      result.states.states[idx], "state at step " + std::to_string(idx));
      if (idx < static_cast<int>(result.adjoint.states.size()))
        write_vtk_adjoint((out / ("adjoint_m" + std::to_string(idx) + ".vtk")).string(), mesh,
                          result.adjoint.states[idx], "adjoint at step " + std::to_string(idx));
    }
  }

  log << std::setprecision(6);
  for (const auto& r : result.records) {
    log << "iter " << r.iter << ": cg=" << r.cg_count << " rel=" << r.rel_residual
        << " abs=" << r.abs_residual << " cost=" << r.cost << " tracking=" << r.tracking
        << " tikhonov=" << r.tikhonov << " max_force=" << r.max_force
        << (r.flagged ? " [flagged]" : "") << "\n";
  }
  if (!result.states.states.empty()) {
    const auto tip = crack_tip_left(mesh, result.states.states.back());
    log << "final crack tip (left): " << (tip ? std::to_string(*tip) : "none") << "\n";
  }
  log << "wrote " << (out / "iterations.csv").string() << "\n";
  log << (result.converged ? "converged" : "NOT converged") << " after "
      << (result.records.empty() ? 0 : result.records.back().iter) << " iterations\n";
  return result.converged ? 0 : 1;
}

int run_verification(const ExperimentConfig& config, std::ostream& log) {
  if (!size_guard(config, log)) return 2;
  const std::vector<CheckResult> results = run_all_checks(config);

  const std::filesystem::path out(config.resolved_out_dir());
  std::filesystem::create_directories(out);
  std::ofstream file((out / "verification.txt").string());
  bool all_pass = true;
  for (const auto& r : results) {
    const std::string line = format_check_line(r);
    log << line << "\n";
    file << line << "\n";
    all_pass = all_pass && r.pass;
  }
  log << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
  return all_pass ? 0 : 1;
}

namespace {

void print_fd_report(const FdCheckReport& report, const char* label, std::ostream& log) {
  log << label << ":\n";
  for (std::size_t d = 0; d < report.directions.size(); ++d) {
    const auto& dir = report.directions[d];
    log << "  direction " << d << " (observed order " << dir.observed_order << ")\n";
    for (std::size_t i = 0; i < dir.steps.size(); ++i)
      log << "    step " << std::scientific << std::setprecision(1) << dir.steps[i]
          << "  rel error " << std::setprecision(3) << dir.rel_errors[i] << "\n"
          << std::defaultfloat;
    log << "    min rel error " << dir.min_rel_error << "\n";
  }
}

}  // namespace

int run_gradcheck(const ExperimentConfig& config, std::ostream& log) {
  if (!size_guard(config, log)) return 2;

  const Mesh mesh = Mesh::build(config.mesh_n);
  ReducedProblem problem(mesh, config.model_params(), config.cost_params(mesh),
                         config.initial_state(mesh), config.times(), config.fwd);
  const Control q = Control::Constant(mesh.nodes_per_side(), config.q_initial);

  std::mt19937 rng(16);
  std::vector<Control> dirs;
  for (int k = 0; k < 3; ++k) {
    Control d = random_control(mesh, rng);
    dirs.push_back(d / problem.gn_norm(d));
  }
  std::vector<double> grad_steps, hess_steps;
  for (double s = 1e0; s >= 1e-5 * (1 - 1e-12); s /= 10.0) grad_steps.push_back(s);
  for (double s = 1e0; s >= 1e-4 * (1 - 1e-12); s /= 10.0) hess_steps.push_back(s);

  const FdCheckReport grad = problem.fd_check_gradient(q, dirs, grad_steps);
  print_fd_report(grad, "gradient vs central differences of the cost", log);
  const FdCheckReport hess = problem.fd_check_hessian(q, dirs, hess_steps);
  print_fd_report(hess, "Hessian-vector product vs central differences of the gradient", log);
  log << "Hessian symmetry rel error: " << hess.symmetry_rel_error << "\n";

  const bool pass = grad.max_of_min_rel_error <= 1e-4 && hess.max_of_min_rel_error <= 1e-3 &&
                    hess.symmetry_rel_error <= 1e-8;
  log << (pass ? "gradcheck passed" : "gradcheck FAILED") << "\n";
  return pass ? 0 : 1;
}

}  // namespace pffc
