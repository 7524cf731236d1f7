#include "pffc/assembly.hpp"

#include <cmath>

namespace pffc {

namespace {

inline double ddot(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  return a(0, 0) * b(0, 0) + a(0, 1) * b(0, 1) + a(1, 0) * b(1, 0) + a(1, 1) * b(1, 1);
}

/// Strain of the local basis function (shape k, displacement component r).
inline Eigen::Matrix2d strain_basis(const Eigen::Vector2d& g, int r) {
  Eigen::Matrix2d e = Eigen::Matrix2d::Zero();
  if (r == 0) {
    e(0, 0) = g.x();
    e(0, 1) = e(1, 0) = 0.5 * g.y();
  } else {
    e(1, 1) = g.y();
    e(0, 1) = e(1, 0) = 0.5 * g.x();
  }
  return e;
}

}  // namespace

Assembler::Assembler(const Mesh& mesh, const ModelParams& params)
    : mesh_(&mesh), params_(params) {
  const double h = mesh.spacing();
  const auto& rule = gauss_2x2();
  for (int g = 0; g < 4; ++g) {
    const Q1Shape s = q1_eval(rule[g].xi, rule[g].eta);
    qp_[g].value = s.value;
    for (int k = 0; k < 4; ++k) qp_[g].grad_phys[k] = s.grad[k] / h;
    qp_[g].weight = rule[g].weight * h * h;
  }
  boundary_mass_ = assemble_boundary_mass(mesh);

  std::vector<Triplet> tp, tf;
  tp.reserve(mesh.num_cells() * 16);
  tf.reserve(mesh.num_cells() * 48);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto nodes = mesh.cell_nodes(c);
    for (const auto& s : qp_) {
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          const double m = s.weight * s.value[a] * s.value[b];
          tp.emplace_back(mesh.dof_phi(nodes[a]), mesh.dof_phi(nodes[b]), m);
          tf.emplace_back(mesh.dof_ux(nodes[a]), mesh.dof_ux(nodes[b]), m);
          tf.emplace_back(mesh.dof_uy(nodes[a]), mesh.dof_uy(nodes[b]), m);
          tf.emplace_back(mesh.dof_phi(nodes[a]), mesh.dof_phi(nodes[b]), m);
        }
      }
    }
  }
  mass_phi_.resize(mesh.num_dofs(), mesh.num_dofs());
  mass_phi_.setFromTriplets(tp.begin(), tp.end());
  mass_full_.resize(mesh.num_dofs(), mesh.num_dofs());
  mass_full_.setFromTriplets(tf.begin(), tf.end());
}

Assembler::LocalFields Assembler::local_fields(const FieldVector& U,
                                               const std::array<int, 4>& nodes,
                                               const QpShapes& s) const {
  LocalFields f;
  Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
  f.phi = 0.0;
  f.grad_phi.setZero();
  for (int k = 0; k < 4; ++k) {
    const double ux = U[mesh_->dof_ux(nodes[k])];
    const double uy = U[mesh_->dof_uy(nodes[k])];
    const double ph = U[mesh_->dof_phi(nodes[k])];
    grad_u(0, 0) += ux * s.grad_phys[k].x();
    grad_u(0, 1) += ux * s.grad_phys[k].y();
    grad_u(1, 0) += uy * s.grad_phys[k].x();
    grad_u(1, 1) += uy * s.grad_phys[k].y();
    f.phi += ph * s.value[k];
    f.grad_phi += ph * s.grad_phys[k];
  }
  f.strain = 0.5 * (grad_u + grad_u.transpose());
  return f;
}

double Assembler::boundary_pairing(const Control& q, const FieldVector& Phi) const {
  return q.dot(boundary_mass_ * trace_uy(Phi));
}

double Assembler::eval_a(const Control& q, const FieldVector& U, const FieldVector& Phi) const {
  const double kap = params_.kappa;
  double val = 0.0;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields u = local_fields(U, nodes, s);
      const LocalFields p = local_fields(Phi, nodes, s);
      const Eigen::Matrix2d sig = stress(u.strain, params_.mu, params_.lambda);
      double integrand = degradation(u.phi, kap) * ddot(sig, p.strain);
      integrand += params_.gc * params_.eps * u.grad_phi.dot(p.grad_phi);
      integrand -= params_.gc / params_.eps * (1.0 - u.phi) * p.phi;
      integrand += (1.0 - kap) * u.phi * ddot(sig, u.strain) * p.phi;
      val += s.weight * integrand;
    }
  }
  return val - boundary_pairing(q, Phi);
}

double Assembler::eval_a_prime_u(const FieldVector& U, const FieldVector& dU,
                                 const FieldVector& Phi) const {
  const double kap = params_.kappa;
  double val = 0.0;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields u = local_fields(U, nodes, s);
      const LocalFields d = local_fields(dU, nodes, s);
      const LocalFields p = local_fields(Phi, nodes, s);
      const Eigen::Matrix2d sig_u = stress(u.strain, params_.mu, params_.lambda);
      const Eigen::Matrix2d sig_d = stress(d.strain, params_.mu, params_.lambda);
      double integrand = degradation(u.phi, kap) * ddot(sig_d, p.strain);
      integrand += 2.0 * u.phi * (1.0 - kap) * d.phi * ddot(sig_u, p.strain);
      integrand += params_.gc * params_.eps * d.grad_phi.dot(p.grad_phi);
      integrand += params_.gc / params_.eps * d.phi * p.phi;
      integrand += (1.0 - kap) * d.phi * ddot(sig_u, u.strain) * p.phi;
      integrand += 2.0 * u.phi * (1.0 - kap) * ddot(sig_d, u.strain) * p.phi;
      val += s.weight * integrand;
    }
  }
  return val;
}

double Assembler::eval_a_prime_q(const Control& dq, const FieldVector& Phi) const {
  return -boundary_pairing(dq, Phi);
}

double Assembler::eval_a_second_uu(const FieldVector& U, const FieldVector& dU,
                                   const FieldVector& Phi, const FieldVector& Z) const {
  const double c2 = 2.0 * (1.0 - params_.kappa);
  double val = 0.0;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields u = local_fields(U, nodes, s);
      const LocalFields d = local_fields(dU, nodes, s);
      const LocalFields p = local_fields(Phi, nodes, s);
      const LocalFields z = local_fields(Z, nodes, s);
      const Eigen::Matrix2d sig_u = stress(u.strain, params_.mu, params_.lambda);
      const Eigen::Matrix2d sig_d = stress(d.strain, params_.mu, params_.lambda);
      const Eigen::Matrix2d sig_p = stress(p.strain, params_.mu, params_.lambda);
      double integrand = u.phi * p.phi * ddot(sig_d, z.strain);
      integrand += d.phi * p.phi * ddot(sig_u, z.strain);
      integrand += u.phi * d.phi * ddot(sig_p, z.strain);
      integrand += u.phi * ddot(sig_p, d.strain) * z.phi;
      integrand += d.phi * ddot(sig_p, u.strain) * z.phi;
      integrand += p.phi * ddot(sig_d, u.strain) * z.phi;
      val += s.weight * c2 * integrand;
    }
  }
  return val;
}

double Assembler::eval_penalty_coupling(const StepContext& ctx, const FieldVector& U_m,
                                        const FieldVector& Psi) const {
  double val = 0.0;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields cur = local_fields(U_m, nodes, s);
      const LocalFields prv = local_fields(*ctx.prev_state, nodes, s);
      const LocalFields psi = local_fields(Psi, nodes, s);
      const double chi = active_indicator(cur.phi, prv.phi);
      const double jump = cur.phi - prv.phi;
      val += s.weight * (params_.gamma * chi + params_.eta) * jump * psi.phi;
    }
  }
  return val;
}

Eigen::VectorXd Assembler::state_residual(const StepContext& ctx, const Control& q,
                                          const FieldVector& U) const {
  const double kap = params_.kappa;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh_->num_dofs());
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields u = local_fields(U, nodes, s);
      const LocalFields prv = local_fields(*ctx.prev_state, nodes, s);
      const Eigen::Matrix2d sig = stress(u.strain, params_.mu, params_.lambda);
      const double chi = active_indicator(u.phi, prv.phi);
      const double pen = (params_.gamma * chi + params_.eta) * (u.phi - prv.phi);
      const double bulk = ddot(sig, u.strain);
      const double phi_src =
          pen + ctx.dt * (-params_.gc / params_.eps * (1.0 - u.phi) + (1.0 - kap) * u.phi * bulk);
      const Eigen::Vector2d phi_flux = ctx.dt * params_.gc * params_.eps * u.grad_phi;
      const Eigen::Matrix2d u_flux = ctx.dt * degradation(u.phi, kap) * sig;
      for (int k = 0; k < 4; ++k) {
        const Eigen::Vector2d g = s.grad_phys[k];
        r[mesh_->dof_ux(nodes[k])] += s.weight * (u_flux(0, 0) * g.x() + u_flux(0, 1) * g.y());
        r[mesh_->dof_uy(nodes[k])] += s.weight * (u_flux(1, 0) * g.x() + u_flux(1, 1) * g.y());
        r[mesh_->dof_phi(nodes[k])] +=
            s.weight * (phi_src * s.value[k] + phi_flux.dot(g));
      }
    }
  }
  const Eigen::VectorXd load = boundary_load(q);
  return r - ctx.dt * load;
}

Eigen::VectorXd Assembler::a_functional(const Control& q, const FieldVector& U) const {
  const double kap = params_.kappa;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh_->num_dofs());
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields u = local_fields(U, nodes, s);
      const Eigen::Matrix2d sig = stress(u.strain, params_.mu, params_.lambda);
      const double bulk = ddot(sig, u.strain);
      const double phi_src =
          -params_.gc / params_.eps * (1.0 - u.phi) + (1.0 - kap) * u.phi * bulk;
      const Eigen::Vector2d phi_flux = params_.gc * params_.eps * u.grad_phi;
      const Eigen::Matrix2d u_flux = degradation(u.phi, kap) * sig;
      for (int k = 0; k < 4; ++k) {
        const Eigen::Vector2d g = s.grad_phys[k];
        r[mesh_->dof_ux(nodes[k])] += s.weight * (u_flux(0, 0) * g.x() + u_flux(0, 1) * g.y());
        r[mesh_->dof_uy(nodes[k])] += s.weight * (u_flux(1, 0) * g.x() + u_flux(1, 1) * g.y());
        r[mesh_->dof_phi(nodes[k])] += s.weight * (phi_src * s.value[k] + phi_flux.dot(g));
      }
    }
  }
  return r - boundary_load(q);
}

Eigen::VectorXd Assembler::restricted_phi_functional(const FieldVector& U_curr,
                                                     const FieldVector& U_prev,
                                                     const FieldVector& W) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh_->num_dofs());
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields cur = local_fields(U_curr, nodes, s);
      const LocalFields prv = local_fields(U_prev, nodes, s);
      if (!(cur.phi > prv.phi)) continue;
      const LocalFields w = local_fields(W, nodes, s);
      for (int k = 0; k < 4; ++k)
        r[mesh_->dof_phi(nodes[k])] += s.weight * w.phi * s.value[k];
    }
  }
  return r;
}

SparseMat Assembler::a_prime_matrix(const FieldVector& U, double scale) const {
  const double kap = params_.kappa;
  std::vector<Triplet> trips;
  trips.reserve(mesh_->num_cells() * 144);
  Eigen::Matrix<double, 12, 12> kloc;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    kloc.setZero();
    for (const auto& s : qp_) {
      const LocalFields u = local_fields(U, nodes, s);
      const Eigen::Matrix2d sig = stress(u.strain, params_.mu, params_.lambda);
      const double bulk = ddot(sig, u.strain);
      std::array<Eigen::Matrix2d, 8> eb;   // strain basis, dof (k, r)
      std::array<Eigen::Matrix2d, 8> sb;   // its stress
      std::array<double, 8> su;            // sigma(u) : eb
      for (int k = 0; k < 4; ++k) {
        for (int r = 0; r < 2; ++r) {
          eb[2 * k + r] = strain_basis(s.grad_phys[k], r);
          sb[2 * k + r] = stress(eb[2 * k + r], params_.mu, params_.lambda);
          su[2 * k + r] = ddot(sig, eb[2 * k + r]);
        }
      }
      const double g_phi = degradation(u.phi, kap);
      const double cpl = 2.0 * u.phi * (1.0 - kap);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          // u-u block
          for (int ra = 0; ra < 2; ++ra)
            for (int rb = 0; rb < 2; ++rb)
              kloc(3 * a + ra, 3 * b + rb) +=
                  s.weight * g_phi * ddot(sb[2 * b + rb], eb[2 * a + ra]);
          // u test row, phi trial column and its transpose
          for (int ra = 0; ra < 2; ++ra)
            kloc(3 * a + ra, 3 * b + 2) += s.weight * cpl * s.value[b] * su[2 * a + ra];
          for (int rb = 0; rb < 2; ++rb)
            kloc(3 * a + 2, 3 * b + rb) += s.weight * cpl * s.value[a] * su[2 * b + rb];
          // phi-phi block
          double pp = params_.gc * params_.eps * s.grad_phys[a].dot(s.grad_phys[b]);
          pp += (params_.gc / params_.eps + (1.0 - kap) * bulk) * s.value[a] * s.value[b];
          kloc(3 * a + 2, 3 * b + 2) += s.weight * pp;
        }
      }
    }
    kloc = 0.5 * (kloc + kloc.transpose()).eval();
    for (int a = 0; a < 4; ++a) {
      const std::array<int, 3> da = {mesh_->dof_ux(nodes[a]), mesh_->dof_uy(nodes[a]),
                                     mesh_->dof_phi(nodes[a])};
      for (int b = 0; b < 4; ++b) {
        const std::array<int, 3> db = {mesh_->dof_ux(nodes[b]), mesh_->dof_uy(nodes[b]),
                                       mesh_->dof_phi(nodes[b])};
        for (int ia = 0; ia < 3; ++ia)
          for (int ib = 0; ib < 3; ++ib)
            trips.emplace_back(da[ia], db[ib], scale * kloc(3 * a + ia, 3 * b + ib));
      }
    }
  }
  SparseMat K(mesh_->num_dofs(), mesh_->num_dofs());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

SparseMat Assembler::penalty_mass(const FieldVector& U_curr, const FieldVector& U_prev) const {
  std::vector<Triplet> trips;
  trips.reserve(mesh_->num_cells() * 16);
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields cur = local_fields(U_curr, nodes, s);
      const LocalFields prv = local_fields(U_prev, nodes, s);
      const double w =
          s.weight * (params_.gamma * active_indicator(cur.phi, prv.phi) + params_.eta);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          trips.emplace_back(mesh_->dof_phi(nodes[a]), mesh_->dof_phi(nodes[b]),
                             w * s.value[a] * s.value[b]);
    }
  }
  SparseMat P(mesh_->num_dofs(), mesh_->num_dofs());
  P.setFromTriplets(trips.begin(), trips.end());
  return P;
}

SparseMat Assembler::state_jacobian(const StepContext& ctx, const FieldVector& U) const {
  SparseMat K = a_prime_matrix(U, ctx.dt);
  K += penalty_mass(U, *ctx.prev_state);
  return K;
}

Eigen::VectorXd Assembler::boundary_load(const Control& q) const {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh_->num_dofs());
  const Eigen::VectorXd mq = boundary_mass_ * q;
  const auto& top = mesh_->top_nodes();
  for (std::size_t i = 0; i < top.size(); ++i) load[mesh_->dof_uy(top[i])] = mq[i];
  return load;
}

Eigen::VectorXd Assembler::trace_uy(const FieldVector& U) const {
  const auto& top = mesh_->top_nodes();
  Eigen::VectorXd t(top.size());
  for (std::size_t i = 0; i < top.size(); ++i) t[i] = U[mesh_->dof_uy(top[i])];
  return t;
}

FieldVector Assembler::embed_phi(const ScalarField& f) const {
  FieldVector v = FieldVector::Zero(mesh_->num_dofs());
  for (int node = 0; node < mesh_->num_nodes(); ++node) v[mesh_->dof_phi(node)] = f[node];
  return v;
}

Eigen::VectorXd Assembler::tracking_gradient(const FieldVector& U,
                                             const ScalarField& phi_d) const {
  return mass_phi_ * (U - embed_phi(phi_d));
}

double Assembler::tracking_value(const FieldVector& U, const ScalarField& phi_d) const {
  const FieldVector d = U - embed_phi(phi_d);
  return 0.5 * d.dot(mass_phi_ * d);
}

Eigen::VectorXd Assembler::second_derivative_rhs(const FieldVector& U, const FieldVector& dU,
                                                 const FieldVector& Z) const {
  const double c2 = 2.0 * (1.0 - params_.kappa);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh_->num_dofs());
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields u = local_fields(U, nodes, s);
      const LocalFields d = local_fields(dU, nodes, s);
      const LocalFields z = local_fields(Z, nodes, s);
      const Eigen::Matrix2d sig_u = stress(u.strain, params_.mu, params_.lambda);
      const Eigen::Matrix2d sig_d = stress(d.strain, params_.mu, params_.lambda);
      const Eigen::Matrix2d sig_z = stress(z.strain, params_.mu, params_.lambda);
      // Coefficient of Phi_phi and stress-like pairing of e(Phi_u).
      const double src = c2 * (d.phi * ddot(sig_u, z.strain) + u.phi * ddot(sig_d, z.strain) +
                               ddot(sig_d, u.strain) * z.phi);
      const Eigen::Matrix2d flux =
          c2 * (u.phi * d.phi * sig_z + u.phi * z.phi * sig_d + d.phi * z.phi * sig_u);
      for (int k = 0; k < 4; ++k) {
        const Eigen::Vector2d g = s.grad_phys[k];
        b[mesh_->dof_ux(nodes[k])] += s.weight * (flux(0, 0) * g.x() + flux(0, 1) * g.y());
        b[mesh_->dof_uy(nodes[k])] += s.weight * (flux(1, 0) * g.x() + flux(1, 1) * g.y());
        b[mesh_->dof_phi(nodes[k])] += s.weight * src * s.value[k];
      }
    }
  }
  return b;
}

double Assembler::violation_norm_sq(const FieldVector& U_m, const FieldVector& U_prev) const {
  double v = 0.0;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields cur = local_fields(U_m, nodes, s);
      const LocalFields prv = local_fields(U_prev, nodes, s);
      const double jump = cur.phi - prv.phi;
      if (jump > 0.0) v += s.weight * jump * jump;
    }
  }
  return v;
}

int Assembler::active_count(const FieldVector& U_m, const FieldVector& U_prev) const {
  int count = 0;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto nodes = mesh_->cell_nodes(c);
    for (const auto& s : qp_) {
      const LocalFields cur = local_fields(U_m, nodes, s);
      const LocalFields prv = local_fields(U_prev, nodes, s);
      if (cur.phi > prv.phi) ++count;
    }
  }
  return count;
}

}  // namespace pffc
