#pragma once

#include "pffc/mesh.hpp"
#include "pffc/optimizer.hpp"

#include <string>
#include <vector>

namespace pffc {

/// Shortest round-trip-exact decimal representation (17 significant digits).
std::string format_full(double x);

/// iterations.csv with the fixed header
/// iter,cg,rel_residual,abs_residual,cost,tracking,tikhonov,max_force.
void write_iterations_csv(const std::string& path, const std::vector<IterationRecord>& records);

/// Two whitespace-separated columns `x q(x)` over the Gamma_N nodes,
/// ascending in x.
void write_force_profile(const std::string& path, const Mesh& mesh, const Control& q);

/// Legacy-VTK structured-grid snapshot of (u_x, u_y, phi); field names
/// "displacement" (vector) and "phi" (scalar).
void write_vtk_state(const std::string& path, const Mesh& mesh, const FieldVector& U,
                     const std::string& title);

/// Same layout for an adjoint field; names "z_u" and "z_phi".
void write_vtk_adjoint(const std::string& path, const Mesh& mesh, const FieldVector& Z,
                       const std::string& title);

}  // namespace pffc
