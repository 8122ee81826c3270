#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "axistokes/mesh.hpp"

namespace axistokes {

/// Barycentric rule on the reference triangle. Weights sum to one, so the physical
/// integral over triangle T is area(T) * sum_q w_q f(x_q).
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// 7-point rule exact to degree 5; default for assembly.
const QuadratureRule& rule_degree5();
/// Collapsed Gauss product rule exact to degree 10; default for norm verification.
const QuadratureRule& rule_degree10();
/// Collapsed Gauss product rule with n points per direction, exact to degree 2n-2.
QuadratureRule collapsed_gauss_rule(int n);

/// Gauss-Legendre nodes and weights on [0,1] (weights sum to one).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};
LineRule gauss_legendre_unit(int n);

/// Physical coordinates of barycentric point `bary` in triangle t.
RZ map_to_triangle(const MeridianMesh& mesh, std::size_t t, const std::array<double, 3>& bary);

}  // namespace axistokes
