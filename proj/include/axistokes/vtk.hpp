#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "axistokes/fourier.hpp"

namespace axistokes {

/// Reconstructed field on the lattice of mesh vertices swept through n_theta angles.
/// Point index is theta_index * num_vertices + vertex.
struct VtkLattice {
  int n_theta = 0;
  std::vector<std::array<double, 3>> points;    ///< Cartesian x, y, z
  std::vector<std::array<double, 3>> velocity;  ///< Cartesian components, real part
  std::vector<double> pressure;
  std::vector<std::array<std::size_t, 6>> wedges;
};

/// Throws std::invalid_argument when n_theta < 8.
VtkLattice sample_lattice(const FourierStack& stack, const MeridianMesh& mesh, int n_theta);

/// Legacy ASCII unstructured grid with wedge cells, point vectors `velocity` and scalars `pressure`.
std::string format_vtk(const VtkLattice& lattice);
void export_vtk(const FourierStack& stack, const MeridianMesh& mesh, int n_theta, const std::filesystem::path& path);

}  // namespace axistokes
