#include "axistokes/basis.hpp"

namespace axistokes {

TriangleGeometry::TriangleGeometry(const MeridianMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles()[t];
  for (int i = 0; i < 3; ++i) x[i] = mesh.vertices()[tri[i]];
  const double det = (x[1].r - x[0].r) * (x[2].z - x[0].z) - (x[2].r - x[0].r) * (x[1].z - x[0].z);
  area = 0.5 * det;
  for (int i = 0; i < 3; ++i) {
    const RZ& a = x[(i + 1) % 3];
    const RZ& b = x[(i + 2) % 3];
    grad_lambda[i] = {(a.z - b.z) / det, (b.r - a.r) / det};
  }
}

RZ TriangleGeometry::map(const std::array<double, 3>& bary) const {
  return {bary[0] * x[0].r + bary[1] * x[1].r + bary[2] * x[2].r,
          bary[0] * x[0].z + bary[1] * x[1].z + bary[2] * x[2].z};
}

P2Eval eval_p2(const TriangleGeometry& g, const std::array<double, 3>& l) {
  P2Eval e;
  for (int i = 0; i < 3; ++i) {
    e.phi[i] = l[i] * (2.0 * l[i] - 1.0);
    const double s = 4.0 * l[i] - 1.0;
    e.d_r[i] = s * g.grad_lambda[i][0];
    e.d_z[i] = s * g.grad_lambda[i][1];
  }
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    e.phi[3 + i] = 4.0 * l[j] * l[k];
    e.d_r[3 + i] = 4.0 * (l[j] * g.grad_lambda[k][0] + l[k] * g.grad_lambda[j][0]);
    e.d_z[3 + i] = 4.0 * (l[j] * g.grad_lambda[k][1] + l[k] * g.grad_lambda[j][1]);
  }
  return e;
}

RZ p2_node_position(const MeridianMesh& mesh, std::size_t n) {
  const std::size_t nv = mesh.num_vertices();
  if (n < nv) return mesh.vertices()[n];
  const auto& e = mesh.edges()[n - nv];
  const RZ& a = mesh.vertices()[e[0]];
  const RZ& b = mesh.vertices()[e[1]];
  return {0.5 * (a.r + b.r), 0.5 * (a.z + b.z)};
}

}  // namespace axistokes
