#include "pffc/optimizer.hpp"

#include "pffc/verification.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pffc;

namespace {

/// Edge-notch reduced problem on a 4x4 mesh with three steps.
struct OptFixture {
  Mesh mesh = Mesh::build(4);
  ModelParams params;
  CostParams cost;
  FieldVector initial;
  Control q0 = Control::Constant(5, 1.0);

  OptFixture() {
    params.gc = 1.0;
    params.eps = 4.0 * mesh.diameter();
    params.kappa = 1e-10;
    params.gamma = 1e3;
    params.eta = 1e2;
    params.eta0 = 1.0;
    std::tie(params.mu, params.lambda) = lame_from_engineering(1e6, 0.2);
    cost.alpha = 1e-6;
    cost.phi_d = interpolate_slit_field(mesh, 0.25, 0.5, mesh.diameter());
    cost.q_d = Control::Constant(5, 1e3);
    initial = make_state(mesh, interpolate_slit_field(mesh, 0.5, 1.0, 0.0));
  }

  NewtonSettings tight() const {
    NewtonSettings s;
    s.rel_tol = 1e-12;
    s.abs_tol = 1e-14;
    return s;
  }

  ReducedProblem problem() const {
    return ReducedProblem(mesh, params, cost, initial, uniform_times(1.0, 3), tight());
  }
};

}  // namespace

TEST_SUITE_BEGIN("optimizer");

TEST_CASE("reduced cost splits into tracking and tikhonov") {
  OptFixture fx;
  const ReducedProblem problem = fx.problem();

  SUBCASE("perfect tracking and nominal control give zero cost") {
    OptFixture perfect;
    perfect.cost.phi_d = ones_field(perfect.mesh);
    perfect.initial = make_state(perfect.mesh, ones_field(perfect.mesh));
    perfect.cost.q_d = Control::Zero(5);
    const ReducedProblem p2 = ReducedProblem(perfect.mesh, perfect.params, perfect.cost,
                                             perfect.initial, uniform_times(1.0, 3),
                                             perfect.tight());
    const CostEval eval = p2.reduced_cost(Control::Zero(5));
    REQUIRE(eval.ok());
    CHECK(eval.tikhonov == 0.0);
    CHECK(eval.total <= 1e-20);
  }
  SUBCASE("nominal control zeroes the tikhonov term regardless of tracking") {
    const CostEval eval = problem.reduced_cost(fx.cost.q_d);
    REQUIRE(eval.ok());
    CHECK(eval.tikhonov == 0.0);
    CHECK(eval.tracking > 0.0);
    CHECK(eval.total == eval.tracking);
  }
  SUBCASE("tikhonov matches the closed form") {
    const CostEval eval = problem.reduced_cost(fx.q0);
    REQUIRE(eval.ok());
    const Control d = fx.q0 - fx.cost.q_d;
    const double expected = 0.5 * fx.cost.alpha * 3 * problem.gn_dot(d, d);
    CHECK(eval.tikhonov == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("gradient-tangent duality and hessian symmetry hold on small instances") {
  CheckResult duality = check_duality();
  INFO(duality.detail);
  CHECK(duality.pass);
  CheckResult sym = check_hessian_symmetry();
  INFO(sym.detail);
  CHECK(sym.pass);
}

TEST_CASE("gradient vanishes with zero adjoint at the nominal control") {
  OptFixture fx;
  const ReducedProblem problem = fx.problem();
  Trajectory zero_adjoint;
  zero_adjoint.times = uniform_times(1.0, 3);
  zero_adjoint.states.assign(4, FieldVector::Zero(fx.mesh.num_dofs()));
  const Control g = problem.reduced_gradient(fx.cost.q_d, zero_adjoint);
  CHECK(g.norm() == 0.0);
}

TEST_CASE("hessian on a near-perfect tracking instance is the tikhonov multiple") {
  OptFixture fx;
  fx.cost.phi_d = ones_field(fx.mesh);
  fx.initial = make_state(fx.mesh, ones_field(fx.mesh));
  fx.cost.q_d = Control::Constant(5, 1.0);
  fx.cost.alpha = 1e-4;
  const ReducedProblem problem =
      ReducedProblem(fx.mesh, fx.params, fx.cost, fx.initial, uniform_times(1.0, 3), fx.tight());

  const Control q = fx.cost.q_d;
  const CostEval eval = problem.reduced_cost(q);
  REQUIRE(eval.ok());
  SweepOperators ops(problem.assembler(), eval.forward.trajectory);
  const Trajectory adjoint = solve_adjoint(ops, fx.cost.phi_d);

  std::mt19937 rng(47);
  const Control dq = random_control(fx.mesh, rng);
  const Control hd = problem.hessian_vector(ops, adjoint, dq);
  const Control tik = fx.cost.alpha * 3 * dq;
  CHECK(problem.gn_norm(hd - tik) <= 1e-3 * problem.gn_norm(tik));
}

TEST_CASE("newton_cg terminates immediately when the tolerance is already met") {
  OptFixture fx;
  const ReducedProblem problem = fx.problem();
  OptSettings settings;
  settings.newton_tol = 1e10;  // any iterate counts as optimal
  const NewtonCgResult result = problem.newton_cg(fx.q0, settings);
  CHECK(result.converged);
  CHECK(result.records.size() == 1);
  CHECK(result.records[0].rel_residual == 1.0);
  CHECK(result.records[0].cg_count == 0);
  CHECK((result.q - fx.q0).norm() == 0.0);
}

TEST_CASE("newton_cg converges on the small instance and logs consistent records") {
  OptFixture fx;
  const ReducedProblem problem = fx.problem();
  OptSettings settings;
  settings.newton_tol = 1e-6;
  settings.max_newton = 25;
  const NewtonCgResult result = problem.newton_cg(fx.q0, settings);
  REQUIRE(result.converged);
  REQUIRE(result.records.size() >= 2);

  CHECK(result.records[0].rel_residual == 1.0);
  CHECK(result.records[0].cg_count == 0);
  for (const auto& rec : result.records) {
    CHECK(rec.cost == doctest::Approx(rec.tracking + rec.tikhonov).epsilon(1e-14));
    // Independent recomputation from the stored iterate.
    const double tik = problem.tikhonov_value(rec.control);
    CHECK(rec.tikhonov == doctest::Approx(tik).epsilon(1e-13));
    CHECK(rec.max_force == rec.control.cwiseAbs().maxCoeff());
    CHECK(!rec.flagged);
  }
  const auto& last = result.records.back();
  CHECK(std::min(last.rel_residual, last.abs_residual) <= settings.newton_tol);

  // One exact Newton step on this nearly quadratic problem contracts hard.
  OptSettings exact = settings;
  exact.cg_forcing = 1e-10;
  exact.cg_max = 200;
  const NewtonCgResult precise = problem.newton_cg(fx.q0, exact);
  REQUIRE(precise.records.size() >= 2);
  CHECK(precise.records[1].rel_residual <= 0.5);
}

TEST_CASE("fd checks of gradient and hessian pass on the small instance") {
  OptFixture fx;
  const ReducedProblem problem = fx.problem();
  std::mt19937 rng(53);
  std::vector<Control> dirs;
  for (int k = 0; k < 2; ++k) {
    Control d = random_control(fx.mesh, rng);
    dirs.push_back(d / problem.gn_norm(d));
  }
  const std::vector<double> steps = {1.0, 0.1, 0.01, 0.001};

  const FdCheckReport grad = problem.fd_check_gradient(fx.q0, dirs, steps);
  CHECK(grad.max_of_min_rel_error <= 1e-6);
  for (const auto& d : grad.directions) {
    CHECK(d.steps.size() == steps.size());
    CHECK(std::isfinite(d.observed_order));
  }

  const FdCheckReport hess = problem.fd_check_hessian(fx.q0, dirs, steps);
  CHECK(hess.max_of_min_rel_error <= 1e-5);
  CHECK(hess.symmetry_rel_error <= 1e-8);
}

TEST_CASE("duality check detects a seeded control-coupling sign error") {
  // Emulates a sign slip in the control term of the tangent right-hand side
  // by sweeping the negated direction; the mismatch must be flagged loudly.
  // Loaded control and small alpha keep the tracking response dominant.
  OptFixture fx;
  fx.cost.alpha = 1e-10;
  fx.q0 = Control::Constant(5, 500.0);
  const ReducedProblem problem = fx.problem();
  const CostEval eval = problem.reduced_cost(fx.q0);
  REQUIRE(eval.ok());
  SweepOperators ops(problem.assembler(), eval.forward.trajectory);
  const Trajectory adjoint = solve_adjoint(ops, fx.cost.phi_d);
  const Control g = problem.reduced_gradient(fx.q0, adjoint);

  std::mt19937 rng(59);
  const Control dq = random_control(fx.mesh, rng);
  const double lhs = problem.gn_dot(g, dq);

  auto tangent_side = [&](const Trajectory& tangent) {
    double rhs = problem.cost_params().alpha * problem.num_steps() *
                 problem.gn_dot(fx.q0 - fx.cost.q_d, dq);
    for (int m = 1; m <= problem.num_steps(); ++m)
      rhs += problem.assembler()
                 .tracking_gradient(eval.forward.trajectory.states[m], fx.cost.phi_d)
                 .dot(tangent.states[m]);
    return rhs;
  };

  const double good = tangent_side(solve_tangent(ops, dq));
  const double bad = tangent_side(solve_tangent(ops, -dq));
  const double scale = std::max({std::abs(lhs), std::abs(good), 1e-300});
  CHECK(std::abs(lhs - good) / scale <= 1e-10);
  CHECK(std::abs(lhs - bad) / scale > 1e-3);
}

TEST_CASE("zero fd direction reports zero error against a zero product") {
  OptFixture fx;
  const ReducedProblem problem = fx.problem();
  const Control zero = Control::Zero(5);
  const FdCheckReport hess = problem.fd_check_hessian(fx.q0, {zero}, {0.1});
  CHECK(hess.directions[0].rel_errors[0] <= 1e-30);
}

TEST_CASE("order estimator recovers clean slopes") {
  const std::vector<double> steps = {1e-1, 1e-2, 1e-3, 1e-4};
  const std::vector<double> errs = {1e-2, 1e-4, 1e-6, 1e-8};
  CHECK(estimate_order(steps, errs) == doctest::Approx(2.0).epsilon(1e-12));
  const std::vector<double> noisy = {1e-2, 1e-4, 1e-6, 1e-5};
  CHECK(estimate_order(steps, noisy) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_SUITE_END();
