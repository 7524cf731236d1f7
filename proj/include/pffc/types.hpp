#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace pffc {

/// Coupled nodal coefficient vector: (u_x, u_y, phi) per mesh node,
/// interleaved node-major. Length = 3 * num_nodes.
using FieldVector = Eigen::VectorXd;

/// Scalar nodal field (one value per mesh node), e.g. phi_0 or phi_d.
using ScalarField = Eigen::VectorXd;

/// Boundary control: one value per Gamma_N node (y-direction traction),
/// constant in time. Length = n + 1.
using Control = Eigen::VectorXd;

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Time-indexed sequence of coupled fields for t_0..t_M.
struct Trajectory {
  std::vector<FieldVector> states;
  std::vector<double> times;

  int num_steps() const { return static_cast<int>(times.size()) - 1; }
  double dt(int m) const { return times[m] - times[m - 1]; }
};

/// Uniform time grid 0 = t_0 < ... < t_M = T.
std::vector<double> uniform_times(double final_time, int num_steps);

}  // namespace pffc
