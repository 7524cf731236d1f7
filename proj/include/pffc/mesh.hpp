#pragma once

#include "pffc/types.hpp"

#include <array>
#include <vector>

namespace pffc {

/// Structured quadrilateral mesh on the unit square with Q1 nodes.
/// Boundary tags: Gamma_N is the top edge (y = 1, traction), Gamma_D the
/// bottom edge (y = 0, clamped displacement), the sides are traction-free.
class Mesh {
 public:
  /// n cells per side; n must be >= 2 and even so that the notch line
  /// y = 0.5 coincides with a node row.
  static Mesh build(int n);

  int n() const { return n_; }
  int nodes_per_side() const { return n_ + 1; }
  int num_nodes() const { return (n_ + 1) * (n_ + 1); }
  int num_cells() const { return n_ * n_; }
  int num_dofs() const { return 3 * num_nodes(); }

  double spacing() const { return 1.0 / n_; }          ///< lattice spacing
  double diameter() const;                             ///< cell diameter sqrt(2)/n

  int node_index(int i, int j) const { return j * (n_ + 1) + i; }
  Eigen::Vector2d node_coord(int node) const;

  /// Counterclockwise corner nodes of cell c: (i,j), (i+1,j), (i+1,j+1), (i,j+1).
  std::array<int, 4> cell_nodes(int cell) const;
  /// Lower-left corner coordinate of cell c.
  Eigen::Vector2d cell_origin(int cell) const;

  // Interleaved dof layout: (u_x, u_y, phi) per node.
  int dof_ux(int node) const { return 3 * node; }
  int dof_uy(int node) const { return 3 * node + 1; }
  int dof_phi(int node) const { return 3 * node + 2; }

  /// Gamma_N nodes in ascending x; index i corresponds to control dof i.
  const std::vector<int>& top_nodes() const { return top_nodes_; }
  /// Gamma_D nodes in ascending x.
  const std::vector<int>& bottom_nodes() const { return bottom_nodes_; }

  /// true for dofs eliminated by the Dirichlet condition u = 0 on Gamma_D.
  const std::vector<char>& dirichlet_mask() const { return dirichlet_; }
  int num_constraints() const { return 2 * (n_ + 1); }

  /// Signed permutation of the x-reflection symmetry x -> 1 - x:
  /// perm[d] is the source dof of d and sign[d] = -1 on u_x components.
  void reflection_x(std::vector<int>& perm, std::vector<double>& sign) const;

 private:
  explicit Mesh(int n);

  int n_ = 0;
  std::vector<int> top_nodes_, bottom_nodes_;
  std::vector<char> dirichlet_;
};

/// Bilinear basis on the reference cell [0,1]^2; node order
/// (0,0), (1,0), (1,1), (0,1).
struct Q1Shape {
  std::array<double, 4> value;
  std::array<Eigen::Vector2d, 4> grad;  ///< gradients w.r.t. reference coords
};

Q1Shape q1_eval(double xi, double eta);

/// 2x2 Gauss rule on the reference cell; weights sum to 1.
struct QuadPoint {
  double xi, eta, weight;
};
const std::array<QuadPoint, 4>& gauss_2x2();

/// Two-point Gauss rule on [0,1]; weights sum to 1.
struct QuadPoint1d {
  double xi, weight;
};
const std::array<QuadPoint1d, 2>& gauss_2pt_1d();

/// Nodal indicator field of a horizontal slit: 0 on nodes with
/// x in [x0, x1] and |y - 0.5| <= halfwidth, 1 elsewhere.
/// halfwidth = 0 selects exactly the y = 0.5 node row.
ScalarField interpolate_slit_field(const Mesh& mesh, double x0, double x1, double halfwidth);

/// All-ones field (no slit).
ScalarField ones_field(const Mesh& mesh);

/// Combine displacement (zero) and a nodal phase-field into a coupled vector.
FieldVector make_state(const Mesh& mesh, const ScalarField& phi);

/// Boundary mass matrix on the Gamma_N trace space (1D Q1 mass,
/// (n+1) x (n+1), tridiagonal, SPD). Realizes (p, q)_{Gamma_N} = p^T M q.
SparseMat assemble_boundary_mass(const Mesh& mesh);

/// Symmetric elimination of the Dirichlet dofs: zero the constrained rows
/// and columns of K, put 1 on the diagonal, and set rhs rows to the
/// prescribed values (zero here). Pass rhs = nullptr to constrain K only.
void apply_dirichlet(const Mesh& mesh, SparseMat& K, Eigen::VectorXd* rhs);

/// Zero the constrained rows of a residual or rhs vector.
void zero_dirichlet_rows(const Mesh& mesh, Eigen::VectorXd& v);

}  // namespace pffc
