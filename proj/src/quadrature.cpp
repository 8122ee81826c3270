#include "axistokes/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <stdexcept>

namespace axistokes {

namespace {

template <int N>
LineRule gauss_table() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  LineRule rule;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool centre = (N % 2 == 1) && i == 0;
    rule.points.push_back(0.5 * (1.0 + x[i]));
    rule.weights.push_back(0.5 * w[i]);
    if (!centre) {
      rule.points.push_back(0.5 * (1.0 - x[i]));
      rule.weights.push_back(0.5 * w[i]);
    }
  }
  return rule;
}

}  // namespace

LineRule gauss_legendre_unit(int n) {
  switch (n) {
    case 1: return gauss_table<1>();
    case 2: return gauss_table<2>();
    case 3: return gauss_table<3>();
    case 4: return gauss_table<4>();
    case 5: return gauss_table<5>();
    case 6: return gauss_table<6>();
    case 7: return gauss_table<7>();
    case 8: return gauss_table<8>();
    case 10: return gauss_table<10>();
    case 12: return gauss_table<12>();
    case 16: return gauss_table<16>();
    default: throw std::invalid_argument("unsupported Gauss-Legendre order " + std::to_string(n));
  }
}

QuadratureRule collapsed_gauss_rule(int n) {
  const LineRule g = gauss_legendre_unit(n);
  QuadratureRule rule;
  rule.degree = 2 * n - 2;
  for (std::size_t i = 0; i < g.points.size(); ++i)
    for (std::size_t j = 0; j < g.points.size(); ++j) {
      const double u = g.points[i];
      const double v = g.points[j];
      const double x = u;
      const double y = v * (1.0 - u);
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - u));
    }
  return rule;
}

const QuadratureRule& rule_degree5() {
  static const QuadratureRule rule = [] {
    QuadratureRule q;
    q.degree = 5;
    const double a1 = 0.059715871789769820, b1 = 0.470142064105115090;
    const double a2 = 0.797426985353087322, b2 = 0.101286507323456339;
    const double w1 = 0.132394152788506181, w2 = 0.125939180544827153;
    q.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                {a2, b2, b2},                {b2, a2, b2}, {b2, b2, a2}};
    q.weights = {0.225, w1, w1, w1, w2, w2, w2};
    return q;
  }();
  return rule;
}

const QuadratureRule& rule_degree10() {
  static const QuadratureRule rule = collapsed_gauss_rule(6);
  return rule;
}

RZ map_to_triangle(const MeridianMesh& mesh, std::size_t t, const std::array<double, 3>& bary) {
  const auto& tri = mesh.triangles()[t];
  const auto& v = mesh.vertices();
  RZ p;
  for (int i = 0; i < 3; ++i) {
    p.r += bary[i] * v[tri[i]].r;
    p.z += bary[i] * v[tri[i]].z;
  }
  return p;
}

}  // namespace axistokes
