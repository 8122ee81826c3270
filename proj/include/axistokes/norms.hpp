#pragma once

#include <array>
#include <functional>
#include <string>

#include "axistokes/mesh.hpp"
#include "axistokes/mode_fn.hpp"
#include "axistokes/quadrature.hpp"

namespace axistokes {

/// Weighted integrals of one component: int |v|^2 r, int |v|^2 / r, int |grad v|^2 r.
struct ComponentIntegrals {
  double l2_1_sq = 0.0;
  double l2_m1_sq = 0.0;
  double h1_1_semi_sq = 0.0;
};

/// Squared weighted norms of a scalar or vector mode coefficient. The starred norm is
/// defined for |k| >= 2 only and is NaN otherwise.
struct NormReport {
  int k = 0;
  bool is_vector = false;
  std::array<ComponentIntegrals, 3> components{};

  double l2_1_sq = 0.0;
  double l2_m1_sq = 0.0;
  double h1_1_semi_sq = 0.0;
  double v1_1_sq = 0.0;
  double h1k_sq = 0.0;
  double h1k_semi_sq = 0.0;
  double h1k_star_sq = 0.0;

  double l2_1() const;
  double l2_m1() const;
  double h1_1_semi() const;
  double v1_1() const;
  double h1k() const;
  double h1k_semi() const;
  double h1k_star() const;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Sum over triangles of area * sum_q w_q f(x_q) r_q^weight_exponent.
cplx integrate_weighted(const MeridianMesh& mesh, const std::function<cplx(double, double)>& f,
                        int weight_exponent, const QuadratureRule& rule = rule_degree10());

NormReport scalar_mode_norm(const MeridianMesh& mesh, const ScalarModeFn& q, int k,
                            const QuadratureRule& rule = rule_degree10());

NormReport vector_mode_norm(const MeridianMesh& mesh, const VectorModeFn& v,
                            const QuadratureRule& rule = rule_degree10());

/// Outcome of evaluating a mesh-dependent quantity on successive uniform refinements.
struct DivergenceCheck {
  std::array<double, 3> values{};
  double increment_ratio = 0.0;  // |v2 - v1| / |v1 - v0|
  bool diverging = false;
};

/// Flags a quantity whose refinement increments fail to contract, the signature of an
/// integral that does not exist (e.g. L^2_{-1} of a field not vanishing on the axis).
DivergenceCheck divergence_alarm(const MeridianMesh& mesh,
                                 const std::function<double(const MeridianMesh&)>& quantity,
                                 double contraction = 0.75);

}  // namespace axistokes
