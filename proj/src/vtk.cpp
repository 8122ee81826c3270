#include "axistokes/vtk.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace axistokes {

VtkLattice sample_lattice(const FourierStack& stack, const MeridianMesh& mesh, int n_theta) {
  if (n_theta < 8) throw std::invalid_argument("VTK export needs n_theta >= 8");
  VtkLattice out;
  out.n_theta = n_theta;
  const std::size_t nv = mesh.num_vertices();
  const std::vector<double> thetas = angular_nodes(n_theta);
  for (double th : thetas) {
    const double c = std::cos(th), s = std::sin(th);
    for (std::size_t v = 0; v < nv; ++v) {
      const RZ& x = mesh.vertices()[v];
      out.points.push_back({x.r * c, x.r * s, x.z});
      const Reconstruction rec = reconstruct_at_vertex(stack, v, th);
      out.velocity.push_back({rec.u[0].real(), rec.u[1].real(), rec.u[2].real()});
      out.pressure.push_back(rec.p.real());
    }
  }
  for (int j = 0; j < n_theta; ++j) {
    const std::size_t a = static_cast<std::size_t>(j) * nv;
    const std::size_t b = static_cast<std::size_t>((j + 1) % n_theta) * nv;
    for (const auto& t : mesh.triangles())
      out.wedges.push_back({a + t[0], a + t[1], a + t[2], b + t[0], b + t[1], b + t[2]});
  }
  return out;
}

std::string format_vtk(const VtkLattice& lattice) {
  std::ostringstream o;
  o.precision(std::numeric_limits<double>::max_digits10);
  o << "# vtk DataFile Version 3.0\naxistokes reconstructed field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  o << "POINTS " << lattice.points.size() << " double\n";
  for (const auto& p : lattice.points) o << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  o << "CELLS " << lattice.wedges.size() << ' ' << 7 * lattice.wedges.size() << '\n';
  for (const auto& w : lattice.wedges) {
    o << 6;
    for (std::size_t i : w) o << ' ' << i;
    o << '\n';
  }
  o << "CELL_TYPES " << lattice.wedges.size() << '\n';
  for (std::size_t i = 0; i < lattice.wedges.size(); ++i) o << "13\n";
  o << "POINT_DATA " << lattice.points.size() << "\nVECTORS velocity double\n";
  for (const auto& u : lattice.velocity) o << u[0] << ' ' << u[1] << ' ' << u[2] << '\n';
  o << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (double p : lattice.pressure) o << p << '\n';
  return o.str();
}

void export_vtk(const FourierStack& stack, const MeridianMesh& mesh, int n_theta, const std::filesystem::path& path) {
  const std::string text = format_vtk(sample_lattice(stack, mesh, n_theta));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace axistokes
