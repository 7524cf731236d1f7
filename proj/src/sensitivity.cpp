#include "pffc/sensitivity.hpp"

#include <Eigen/SparseLU>

#include <stdexcept>

namespace pffc {

struct SweepOperators::Factor {
  Eigen::SparseLU<SparseMat> lu;
};

SweepOperators::SweepOperators(const Assembler& assembler, const Trajectory& states,
                               bool cache_factorizations)
    : assembler_(&assembler), states_(&states), cache_(cache_factorizations) {
  const Mesh& mesh = assembler.mesh();
  const int M = states.num_steps();
  penalty_.reserve(M);
  if (cache_)
    factors_.reserve(M);
  else
    matrices_.reserve(M);
  for (int m = 1; m <= M; ++m) {
    penalty_.push_back(assembler.penalty_mass(states.states[m], states.states[m - 1]));
    SparseMat K = assembler.a_prime_matrix(states.states[m], states.dt(m));
    K += penalty_.back();
    apply_dirichlet(mesh, K, nullptr);
    if (cache_) {
      auto f = std::make_shared<Factor>();
      f->lu.compute(K);
      if (f->lu.info() != Eigen::Success)
        throw std::runtime_error("SweepOperators: factorization failed at step " +
                                 std::to_string(m));
      factors_.push_back(std::move(f));
    } else {
      matrices_.push_back(std::move(K));
    }
  }
}

Eigen::VectorXd SweepOperators::solve(int m, const Eigen::VectorXd& rhs) const {
  if (cache_) return factors_[m - 1]->lu.solve(rhs);
  Eigen::SparseLU<SparseMat> lu(matrices_[m - 1]);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("SweepOperators: factorization failed at step " +
                             std::to_string(m));
  return lu.solve(rhs);
}

Trajectory solve_adjoint(const SweepOperators& ops, const ScalarField& phi_d) {
  const Assembler& assembler = ops.assembler();
  const Mesh& mesh = assembler.mesh();
  const Trajectory& states = ops.states();
  const int M = ops.num_steps();

  Trajectory z;
  z.times = states.times;
  z.states.assign(M + 1, FieldVector());

  for (int m = M; m >= 1; --m) {
    Eigen::VectorXd rhs = assembler.tracking_gradient(states.states[m], phi_d);
    if (m < M) rhs += ops.penalty(m + 1) * z.states[m + 1];
    zero_dirichlet_rows(mesh, rhs);
    z.states[m] = ops.solve(m, rhs);
  }
  z.states[0] = z.states[1];
  return z;
}

Trajectory solve_tangent(const SweepOperators& ops, const Control& dq) {
  const Assembler& assembler = ops.assembler();
  const Mesh& mesh = assembler.mesh();
  const int M = ops.num_steps();

  Trajectory du;
  du.times = ops.states().times;
  du.states.assign(M + 1, FieldVector());
  du.states[0] = FieldVector::Zero(mesh.num_dofs());

  const Eigen::VectorXd load = assembler.boundary_load(dq);
  for (int m = 1; m <= M; ++m) {
    Eigen::VectorXd rhs = ops.states().dt(m) * load;
    rhs += ops.penalty(m) * du.states[m - 1];
    zero_dirichlet_rows(mesh, rhs);
    du.states[m] = ops.solve(m, rhs);
  }
  return du;
}

Trajectory solve_adjoint_hessian(const SweepOperators& ops, const Trajectory& adjoint,
                                 const Trajectory& tangent) {
  const Assembler& assembler = ops.assembler();
  const Mesh& mesh = assembler.mesh();
  const Trajectory& states = ops.states();
  const int M = ops.num_steps();

  Trajectory dz;
  dz.times = states.times;
  dz.states.assign(M + 1, FieldVector());

  for (int m = M; m >= 1; --m) {
    Eigen::VectorXd rhs = assembler.mass_phi() * tangent.states[m];
    rhs -= states.dt(m) * assembler.second_derivative_rhs(states.states[m], tangent.states[m],
                                                          adjoint.states[m]);
    if (m < M) rhs += ops.penalty(m + 1) * dz.states[m + 1];
    zero_dirichlet_rows(mesh, rhs);
    dz.states[m] = ops.solve(m, rhs);
  }
  dz.states[0] = dz.states[1];
  return dz;
}

}  // namespace pffc
