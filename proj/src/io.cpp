#include "pffc/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pffc {

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  return out;
}

void write_vtk_fields(const std::string& path, const Mesh& mesh, const FieldVector& U,
                      const std::string& title, const char* vec_name, const char* scalar_name) {
  std::ofstream out = open_or_throw(path);
  const int nps = mesh.nodes_per_side();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n";
  out << "DATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << nps << " " << nps << " 1\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (int node = 0; node < mesh.num_nodes(); ++node) {
    const Eigen::Vector2d p = mesh.node_coord(node);
    out << format_full(p.x()) << " " << format_full(p.y()) << " 0\n";
  }
  out << "POINT_DATA " << mesh.num_nodes() << "\n";
  out << "SCALARS " << scalar_name << " double 1\nLOOKUP_TABLE default\n";
  for (int node = 0; node < mesh.num_nodes(); ++node)
    out << format_full(U[mesh.dof_phi(node)]) << "\n";
  out << "VECTORS " << vec_name << " double\n";
  for (int node = 0; node < mesh.num_nodes(); ++node)
    out << format_full(U[mesh.dof_ux(node)]) << " " << format_full(U[mesh.dof_uy(node)])
        << " 0\n";
}

}  // namespace

void write_iterations_csv(const std::string& path, const std::vector<IterationRecord>& records) {
  std::ofstream out = open_or_throw(path);
  out << "iter,cg,rel_residual,abs_residual,cost,tracking,tikhonov,max_force\n";
  for (const auto& r : records) {
    out << r.iter << "," << r.cg_count << "," << format_full(r.rel_residual) << ","
        << format_full(r.abs_residual) << "," << format_full(r.cost) << ","
        << format_full(r.tracking) << "," << format_full(r.tikhonov) << ","
        << format_full(r.max_force) << "\n";
  }
}

void write_force_profile(const std::string& path, const Mesh& mesh, const Control& q) {
  std::ofstream out = open_or_throw(path);
  for (int i = 0; i <= mesh.n(); ++i)
    out << format_full(static_cast<double>(i) / mesh.n()) << " " << format_full(q[i]) << "\n";
}

void write_vtk_state(const std::string& path, const Mesh& mesh, const FieldVector& U,
                     const std::string& title) {
  write_vtk_fields(path, mesh, U, title, "displacement", "phi");
}

void write_vtk_adjoint(const std::string& path, const Mesh& mesh, const FieldVector& Z,
                       const std::string& title) {
  write_vtk_fields(path, mesh, Z, title, "z_u", "z_phi");
}

}  // namespace pffc
