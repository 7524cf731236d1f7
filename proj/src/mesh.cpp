#include "pffc/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace pffc {

Mesh::Mesh(int n) : n_(n) {
  top_nodes_.reserve(n_ + 1);
  bottom_nodes_.reserve(n_ + 1);
  for (int i = 0; i <= n_; ++i) {
    top_nodes_.push_back(node_index(i, n_));
    bottom_nodes_.push_back(node_index(i, 0));
  }
  dirichlet_.assign(num_dofs(), 0);
  for (int node : bottom_nodes_) {
    dirichlet_[dof_ux(node)] = 1;
    dirichlet_[dof_uy(node)] = 1;
  }
}

Mesh Mesh::build(int n) {
  if (n < 2) throw std::invalid_argument("Mesh: need at least 2 cells per side");
  if (n % 2 != 0)
    throw std::invalid_argument("Mesh: n must be even so the notch lies on a node row");
  return Mesh(n);
}

double Mesh::diameter() const { return std::sqrt(2.0) / n_; }

Eigen::Vector2d Mesh::node_coord(int node) const {
  const int i = node % (n_ + 1);
  const int j = node / (n_ + 1);
  return {static_cast<double>(i) / n_, static_cast<double>(j) / n_};
}

std::array<int, 4> Mesh::cell_nodes(int cell) const {
  const int ci = cell % n_;
  const int cj = cell / n_;
  return {node_index(ci, cj), node_index(ci + 1, cj), node_index(ci + 1, cj + 1),
          node_index(ci, cj + 1)};
}

Eigen::Vector2d Mesh::cell_origin(int cell) const {
  const int ci = cell % n_;
  const int cj = cell / n_;
  return {static_cast<double>(ci) / n_, static_cast<double>(cj) / n_};
}

void Mesh::reflection_x(std::vector<int>& perm, std::vector<double>& sign) const {
  perm.resize(num_dofs());
  sign.resize(num_dofs());
  for (int j = 0; j <= n_; ++j) {
    for (int i = 0; i <= n_; ++i) {
      const int a = node_index(i, j);
      const int b = node_index(n_ - i, j);
      perm[dof_ux(a)] = dof_ux(b);
      perm[dof_uy(a)] = dof_uy(b);
      perm[dof_phi(a)] = dof_phi(b);
      sign[dof_ux(a)] = -1.0;
      sign[dof_uy(a)] = 1.0;
      sign[dof_phi(a)] = 1.0;
    }
  }
}

Q1Shape q1_eval(double xi, double eta) {
  Q1Shape s;
  s.value = {(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), xi * eta, (1.0 - xi) * eta};
  s.grad = {Eigen::Vector2d{-(1.0 - eta), -(1.0 - xi)}, Eigen::Vector2d{1.0 - eta, -xi},
            Eigen::Vector2d{eta, xi}, Eigen::Vector2d{-eta, 1.0 - xi}};
  return s;
}

const std::array<QuadPoint, 4>& gauss_2x2() {
  static const std::array<QuadPoint, 4> pts = [] {
    const double a = 0.5 - 0.5 / std::sqrt(3.0);
    const double b = 0.5 + 0.5 / std::sqrt(3.0);
    return std::array<QuadPoint, 4>{QuadPoint{a, a, 0.25}, QuadPoint{b, a, 0.25},
                                    QuadPoint{b, b, 0.25}, QuadPoint{a, b, 0.25}};
  }();
  return pts;
}

const std::array<QuadPoint1d, 2>& gauss_2pt_1d() {
  static const std::array<QuadPoint1d, 2> pts = [] {
    const double a = 0.5 - 0.5 / std::sqrt(3.0);
    const double b = 0.5 + 0.5 / std::sqrt(3.0);
    return std::array<QuadPoint1d, 2>{QuadPoint1d{a, 0.5}, QuadPoint1d{b, 0.5}};
  }();
  return pts;
}

ScalarField interpolate_slit_field(const Mesh& mesh, double x0, double x1, double halfwidth) {
  if (halfwidth < 0.0) throw std::invalid_argument("interpolate_slit_field: halfwidth < 0");
  // Geometric tolerance guards against roundoff in node coordinates; it is
  // far below the lattice spacing for any sane mesh.
  const double tol = 1e-12;
  ScalarField f = ScalarField::Ones(mesh.num_nodes());
  for (int node = 0; node < mesh.num_nodes(); ++node) {
    const Eigen::Vector2d p = mesh.node_coord(node);
    if (p.x() >= x0 - tol && p.x() <= x1 + tol && std::abs(p.y() - 0.5) <= halfwidth + tol)
      f[node] = 0.0;
  }
  return f;
}

ScalarField ones_field(const Mesh& mesh) { return ScalarField::Ones(mesh.num_nodes()); }

FieldVector make_state(const Mesh& mesh, const ScalarField& phi) {
  FieldVector u = FieldVector::Zero(mesh.num_dofs());
  for (int node = 0; node < mesh.num_nodes(); ++node) u[mesh.dof_phi(node)] = phi[node];
  return u;
}

SparseMat assemble_boundary_mass(const Mesh& mesh) {
  const int n = mesh.n();
  const double h = mesh.spacing();
  std::vector<Triplet> trips;
  trips.reserve(4 * n);
  // 1D Q1 mass on each top edge: h/6 * [2 1; 1 2].
  for (int e = 0; e < n; ++e) {
    trips.emplace_back(e, e, h / 3.0);
    trips.emplace_back(e + 1, e + 1, h / 3.0);
    trips.emplace_back(e, e + 1, h / 6.0);
    trips.emplace_back(e + 1, e, h / 6.0);
  }
  SparseMat m(n + 1, n + 1);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

void apply_dirichlet(const Mesh& mesh, SparseMat& K, Eigen::VectorXd* rhs) {
  const auto& mask = mesh.dirichlet_mask();
  for (int col = 0; col < K.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(K, col); it; ++it) {
      if (mask[it.row()] || mask[it.col()]) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    }
  }
  for (int d = 0; d < mesh.num_dofs(); ++d) {
    if (mask[d]) {
      K.coeffRef(d, d) = 1.0;  // inserts if the diagonal was structurally absent
      if (rhs) (*rhs)[d] = 0.0;
    }
  }
}

void zero_dirichlet_rows(const Mesh& mesh, Eigen::VectorXd& v) {
  const auto& mask = mesh.dirichlet_mask();
  for (int d = 0; d < mesh.num_dofs(); ++d)
    if (mask[d]) v[d] = 0.0;
}

}  // namespace pffc
