#pragma once

#include <array>
#include <cstddef>

#include "axistokes/mesh.hpp"

namespace axistokes {

/// Affine triangle geometry: barycentric gradients and area.
struct TriangleGeometry {
  std::array<RZ, 3> x;
  std::array<std::array<double, 2>, 3> grad_lambda;  // (d/dr, d/dz) of each barycentric
  double area = 0.0;

  TriangleGeometry(const MeridianMesh& mesh, std::size_t t);
  RZ map(const std::array<double, 3>& bary) const;
};

/// Local P2 node ordering: vertices 0..2, then the midpoint of the edge opposite vertex i
/// at position 3+i (matching MeridianMesh::triangle_edges).
struct P2Eval {
  std::array<double, 6> phi;
  std::array<double, 6> d_r;
  std::array<double, 6> d_z;
};

P2Eval eval_p2(const TriangleGeometry& g, const std::array<double, 3>& bary);

/// Global P2 node index of local node `i` of triangle t.
inline std::size_t p2_node(const MeridianMesh& mesh, std::size_t t, int i) {
  return i < 3 ? mesh.triangles()[t][i] : mesh.num_vertices() + mesh.triangle_edges(t)[i - 3];
}

inline std::size_t num_p2_nodes(const MeridianMesh& mesh) {
  return mesh.num_vertices() + mesh.edges().size();
}

/// Coordinates of global P2 node n.
RZ p2_node_position(const MeridianMesh& mesh, std::size_t n);

}  // namespace axistokes
