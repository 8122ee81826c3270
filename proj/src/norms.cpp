#include "axistokes/norms.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "axistokes/basis.hpp"

namespace axistokes {

namespace {

double root(double sq) { return std::sqrt(std::max(sq, 0.0)); }

double sq(const cplx& a) { return std::norm(a); }

}  // namespace

double NormReport::l2_1() const { return root(l2_1_sq); }
double NormReport::l2_m1() const { return root(l2_m1_sq); }
double NormReport::h1_1_semi() const { return root(h1_1_semi_sq); }
double NormReport::v1_1() const { return root(v1_1_sq); }
double NormReport::h1k() const { return root(h1k_sq); }
double NormReport::h1k_semi() const { return root(h1k_semi_sq); }
double NormReport::h1k_star() const { return std::isnan(h1k_star_sq) ? h1k_star_sq : root(h1k_star_sq); }

std::string NormReport::csv_header() {
  return "k,l2_1_sq,l2_m1_sq,h1_1_semi_sq,h1k_sq,h1k_semi_sq,h1k_star_sq";
}

std::string NormReport::csv_row() const {
  std::ostringstream os;
  os << std::setprecision(17) << k << ',' << l2_1_sq << ',' << l2_m1_sq << ',' << h1_1_semi_sq << ','
     << h1k_sq << ',' << h1k_semi_sq << ',';
  if (std::isnan(h1k_star_sq))
    os << "nan";
  else
    os << h1k_star_sq;
  return os.str();
}

cplx integrate_weighted(const MeridianMesh& mesh, const std::function<cplx(double, double)>& f,
                        int weight_exponent, const QuadratureRule& rule) {
  if (weight_exponent < -1 || weight_exponent > 1)
    throw std::invalid_argument("weight exponent must be -1, 0 or 1");
  cplx total{};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry g(mesh, t);
    cplx local{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const RZ p = g.map(rule.points[q]);
      const double w = weight_exponent == 1 ? p.r : weight_exponent == -1 ? 1.0 / p.r : 1.0;
      local += rule.weights[q] * f(p.r, p.z) * w;
    }
    total += g.area * local;
  }
  return total;
}

NormReport scalar_mode_norm(const MeridianMesh& mesh, const ScalarModeFn& q, int k,
                            const QuadratureRule& rule) {
  if (!q.has_derivatives()) throw std::logic_error("scalar mode norm needs derivative evaluators");
  ComponentIntegrals c;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry g(mesh, t);
    ComponentIntegrals local;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const RZ p = g.map(rule.points[i]);
      const ModeSample s = q.sample(t, rule.points[i], p.r, p.z);
      const double w = rule.weights[i];
      local.l2_1_sq += w * sq(s.value) * p.r;
      local.l2_m1_sq += w * sq(s.value) / p.r;
      local.h1_1_semi_sq += w * (sq(s.d_r) + sq(s.d_z)) * p.r;
    }
    c.l2_1_sq += g.area * local.l2_1_sq;
    c.l2_m1_sq += g.area * local.l2_m1_sq;
    c.h1_1_semi_sq += g.area * local.h1_1_semi_sq;
  }
  NormReport rep;
  rep.k = k;
  rep.components[0] = c;
  rep.l2_1_sq = c.l2_1_sq;
  rep.l2_m1_sq = c.l2_m1_sq;
  rep.h1_1_semi_sq = c.h1_1_semi_sq;
  rep.v1_1_sq = c.l2_m1_sq + c.h1_1_semi_sq;
  const double kk = double(k) * double(k);
  rep.h1k_semi_sq = c.h1_1_semi_sq + (k == 0 ? 0.0 : kk * c.l2_m1_sq);
  rep.h1k_sq = c.l2_1_sq + rep.h1k_semi_sq;
  rep.h1k_star_sq = std::numeric_limits<double>::quiet_NaN();
  return rep;
}

NormReport vector_mode_norm(const MeridianMesh& mesh, const VectorModeFn& v, const QuadratureRule& rule) {
  for (const auto& c : v.c)
    if (!c.has_derivatives()) throw std::logic_error("vector mode norm needs derivative evaluators");
  const int k = v.k;
  const double kk = double(k) * double(k);
  const int ak = std::abs(k);

  std::array<ComponentIntegrals, 3> comp{};
  double coupled = 0.0;  // 1/r-weighted part of the mode norm, accumulated pointwise
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry g(mesh, t);
    std::array<ComponentIntegrals, 3> local{};
    double local_coupled = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const RZ p = g.map(rule.points[i]);
      const double w = rule.weights[i];
      std::array<ModeSample, 3> s;
      for (int c = 0; c < 3; ++c) {
        s[c] = v.c[c].sample(t, rule.points[i], p.r, p.z);
        local[c].l2_1_sq += w * sq(s[c].value) * p.r;
        local[c].l2_m1_sq += w * sq(s[c].value) / p.r;
        local[c].h1_1_semi_sq += w * (sq(s[c].d_r) + sq(s[c].d_z)) * p.r;
      }
      const cplx vr = s[0].value, vt = s[1].value, vz = s[2].value;
      double m = 0.0;
      if (ak == 0) {
        m = sq(vr) + sq(vt);
      } else if (ak == 1) {
        m = 2.0 * sq(vr + cplx(0.0, k) * vt) + sq(vz);
      } else {
        const double im = vr.imag() * vt.real() - vr.real() * vt.imag();  // Im(v_r conj(v_theta))
        m = (1.0 + kk) * (sq(vr) + sq(vt)) + kk * sq(vz) + 4.0 * k * im;
      }
      local_coupled += w * m / p.r;
    }
    for (int c = 0; c < 3; ++c) {
      comp[c].l2_1_sq += g.area * local[c].l2_1_sq;
      comp[c].l2_m1_sq += g.area * local[c].l2_m1_sq;
      comp[c].h1_1_semi_sq += g.area * local[c].h1_1_semi_sq;
    }
    coupled += g.area * local_coupled;
  }

  NormReport rep;
  rep.k = k;
  rep.is_vector = true;
  rep.components = comp;
  for (const auto& c : comp) {
    rep.l2_1_sq += c.l2_1_sq;
    rep.l2_m1_sq += c.l2_m1_sq;
    rep.h1_1_semi_sq += c.h1_1_semi_sq;
  }
  rep.v1_1_sq = rep.l2_m1_sq + rep.h1_1_semi_sq;
  rep.h1k_semi_sq = rep.h1_1_semi_sq + coupled;
  rep.h1k_sq = rep.l2_1_sq + rep.h1k_semi_sq;
  rep.h1k_star_sq = ak >= 2 ? rep.l2_1_sq + rep.h1_1_semi_sq + kk * rep.l2_m1_sq
                            : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

DivergenceCheck divergence_alarm(const MeridianMesh& mesh,
                                 const std::function<double(const MeridianMesh&)>& quantity,
                                 double contraction) {
  DivergenceCheck out;
  MeridianMesh m = mesh;
  for (int level = 0; level < 3; ++level) {
    out.values[level] = quantity(m);
    if (level < 2) m = refine_uniform(m);
  }
  const double d1 = std::abs(out.values[1] - out.values[0]);
  const double d2 = std::abs(out.values[2] - out.values[1]);
  const double scale = std::max(std::abs(out.values[2]), 1e-300);
  if (d1 <= 1e-14 * scale) {
    out.increment_ratio = 0.0;
    out.diverging = d2 > 1e-14 * scale;
  } else {
    out.increment_ratio = d2 / d1;
    out.diverging = out.increment_ratio > contraction && d2 > 1e-12 * scale;
  }
  return out;
}

}  // namespace axistokes
