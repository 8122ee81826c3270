#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "axistokes/basis.hpp"
#include "axistokes/verification.hpp"

namespace axistokes {

namespace {

const cplx I{0.0, 1.0};

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

CExpr random_profile(std::mt19937& gen) {
  std::normal_distribution<double> d;
  const Expr r = Expr::r(), z = Expr::z();
  const std::vector<Expr> basis = {Expr(1.0), r, z, r * z, z * z, cos(r + z)};
  CExpr out(Expr(0.0));
  for (const auto& b : basis) out = out + CExpr(Expr(d(gen)), Expr(d(gen))) * CExpr(b);
  return out;
}

VectorModeFn scaled(const VectorModeFn& v, cplx a) {
  VectorModeFn out;
  out.k = v.k;
  for (int c = 0; c < 3; ++c) out.c[c] = ScalarModeFn::combine(a, v.c[c], 0.0, v.c[c]);
  return out;
}

}  // namespace

VectorModeFn random_admissible_mode(int k, unsigned seed) {
  std::mt19937 gen(seed);
  const CExpr r(Expr::r());
  const CExpr p1 = random_profile(gen), p2 = random_profile(gen), p3 = random_profile(gen);
  const int ak = std::abs(k);
  CExpr ur, ut, uz;
  if (ak == 0) {
    ur = r * p1;
    ut = r * p2;
    uz = p3;
  } else if (ak == 1) {
    // u_r + ik u_theta vanishes on the axis
    const CExpr q = random_profile(gen);
    ur = q + r * p1;
    ut = CExpr(Expr(0.0), Expr(1.0 / k)) * q + r * p2;
    uz = r * p3;
  } else {
    ur = r * p1;
    ut = r * p2;
    uz = r * p3;
  }
  return VectorModeFn{{to_fn(ur), to_fn(ut), to_fn(uz)}, k};
}

ScalarModeFn random_scalar_mode(unsigned seed) {
  std::mt19937 gen(seed);
  return to_fn(random_profile(gen));
}

FnStack random_trig_field(const std::vector<int>& ks, unsigned seed) {
  FnStack s;
  for (int k : ks) {
    s.N = std::max(s.N, std::abs(k));
    s.velocity[k] = random_admissible_mode(k, seed * 7919u + static_cast<unsigned>(2 * k + 101));
    s.pressure[k] = random_scalar_mode(seed * 104729u + static_cast<unsigned>(2 * k + 101));
  }
  return s;
}

Norms3D tensor_norms(const MeridianMesh& mesh, const FnStack& stack, int n_theta, const QuadratureRule& rule) {
  const double inv = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const auto thetas = angular_nodes(n_theta);
  const double dtheta = 2.0 * std::numbers::pi / n_theta;
  struct ModeSamples {
    int k;
    std::array<ModeSample, 3> v;
  };
  Norms3D out;
  std::vector<ModeSamples> vs;
  std::vector<std::pair<int, cplx>> ps;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry g(mesh, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const RZ x = g.map(rule.points[q]);
      vs.clear();
      ps.clear();
      for (const auto& [k, v] : stack.velocity) {
        ModeSamples m{k, {}};
        for (int c = 0; c < 3; ++c) m.v[c] = v.c[c].sample(t, rule.points[q], x.r, x.z);
        vs.push_back(m);
      }
      for (const auto& [k, p] : stack.pressure) ps.emplace_back(k, p.sample(t, rule.points[q], x.r, x.z, false).value);
      const double w = g.area * rule.weights[q] * x.r * dtheta;
      for (double th : thetas) {
        const double c = std::cos(th), s = std::sin(th);
        Vec3 val{}, dr{}, dth{}, dz{};
        for (const auto& m : vs) {
          const cplx e = std::polar(inv, m.k * th);
          const cplx vr = m.v[0].value, vt = m.v[1].value;
          // Cartesian components R_theta v and their derivatives
          const Vec3 cart{c * vr - s * vt, s * vr + c * vt, m.v[2].value};
          const Vec3 cart_r{c * m.v[0].d_r - s * m.v[1].d_r, s * m.v[0].d_r + c * m.v[1].d_r, m.v[2].d_r};
          const Vec3 cart_z{c * m.v[0].d_z - s * m.v[1].d_z, s * m.v[0].d_z + c * m.v[1].d_z, m.v[2].d_z};
          const Vec3 rot_prime{-s * vr - c * vt, c * vr - s * vt, 0.0};
          const cplx ik(0.0, double(m.k));
          for (int i = 0; i < 3; ++i) {
            val[i] += cart[i] * e;
            dr[i] += cart_r[i] * e;
            dz[i] += cart_z[i] * e;
            dth[i] += (rot_prime[i] + ik * cart[i]) * e;
          }
        }
        cplx p{};
        for (const auto& [k, pv] : ps) p += pv * std::polar(inv, k * th);
        double l2 = 0.0, semi = 0.0;
        for (int i = 0; i < 3; ++i) {
          l2 += std::norm(val[i]);
          semi += std::norm(dr[i]) + std::norm(dth[i]) / (x.r * x.r) + std::norm(dz[i]);
        }
        out.velocity_l2_sq += w * l2;
        out.velocity_h1_semi_sq += w * semi;
        out.pressure_l2_sq += w * std::norm(p);
      }
    }
  }
  return out;
}

CheckSummary isometry_checks(const std::string& label, const MeridianMesh& mesh, const FnStack& field,
                             const IsometryOptions& opt) {
  const Norms3D n3 = tensor_norms(mesh, field, 4 * field.N + 8);
  double l2 = 0.0, h1 = 0.0, semi = 0.0, pl2 = 0.0;
  for (const auto& [k, v] : field.velocity) {
    const NormReport r = opt.engine.vector(mesh, v, rule_degree10());
    l2 += r.l2_1_sq;
    h1 += r.h1k_sq;
    semi += r.h1k_semi_sq;
  }
  for (const auto& [k, p] : field.pressure) pl2 += opt.engine.scalar(mesh, p, k, rule_degree10()).l2_1_sq;
  CheckSummary s;
  s.at_most(label + ".l2_scalar", rel(n3.pressure_l2_sq, pl2), opt.tolerance);
  s.at_most(label + ".l2_vector", rel(n3.velocity_l2_sq, l2), opt.tolerance);
  s.at_most(label + ".h1_full", rel(n3.velocity_l2_sq + n3.velocity_h1_semi_sq, h1), opt.tolerance);
  s.at_most(label + ".h1_semi", rel(n3.velocity_h1_semi_sq, semi), opt.tolerance);
  return s;
}

double polarization_defect(const MeridianMesh& mesh, const VectorModeFn& v, const ModeNormEngine& engine) {
  const int k = v.k;
  const auto& rule = rule_degree10();
  const double lhs = engine.vector(mesh, v, rule).h1k_sq;
  const ScalarModeFn plus = ScalarModeFn::combine(1.0, v.c[0], I, v.c[1]);
  const ScalarModeFn minus = ScalarModeFn::combine(1.0, v.c[0], -I, v.c[1]);
  const double rhs = 0.5 * engine.scalar(mesh, plus, k + 1, rule).h1k_sq +
                     0.5 * engine.scalar(mesh, minus, k - 1, rule).h1k_sq + engine.scalar(mesh, v.c[2], k, rule).h1k_sq;
  return rel(lhs, rhs);
}

EquivalenceRange equivalence_range(const MeridianMesh& mesh, int k, int samples, unsigned seed,
                                   const ModeNormEngine& engine) {
  if (std::abs(k) < 2) throw std::invalid_argument("the starred norm needs |k| >= 2");
  EquivalenceRange out;
  out.k = k;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const NormReport r = engine.vector(mesh, random_admissible_mode(k, seed + 977u * static_cast<unsigned>(i)),
                                       rule_degree10());
    const double ratio = std::sqrt(r.h1k_sq / r.h1k_star_sq);
    out.min_ratio = std::min(out.min_ratio, ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

double equivalence_family_ratio(const MeridianMesh& mesh, int k, bool upper, const ModeNormEngine& engine) {
  const double sigma = (upper ? -1.0 : 1.0) * (k > 0 ? 1.0 : -1.0);
  const auto phi = ScalarModeFn::closed_form([](double r, double) { return cplx(r); },
                                             [](double, double) { return cplx(1.0); },
                                             [](double, double) { return cplx(0.0); });
  const VectorModeFn v{{phi, ScalarModeFn::combine(I * sigma, phi, 0.0, phi), ScalarModeFn::zero()}, k};
  const NormReport r = engine.vector(mesh, v, rule_degree10());
  return std::sqrt(r.h1k_sq / r.h1k_star_sq);
}

double angular_derivative_defect(const MeridianMesh& mesh, const FnStack& field, int s) {
  double lhs = 0.0;
  for (int l = 0; l <= s; ++l) {
    FnStack d;
    d.N = field.N;
    for (const auto& [k, v] : field.velocity) d.velocity[k] = scaled(v, std::pow(cplx(0.0, double(k)), l));
    const Norms3D n = tensor_norms(mesh, d, 4 * field.N + 8);
    lhs += n.velocity_l2_sq + n.velocity_h1_semi_sq;
  }
  std::map<int, double> norms;
  for (const auto& [k, v] : field.velocity) norms[k] = vector_mode_norm(mesh, v).h1k();
  return rel(lhs, angular_derivative_norm_sq(norms, s));
}

CheckSummary run_property_suite(const VerifyOptions& opt) {
  auto tol = [&opt](double t) { return opt.tolerance ? *opt.tolerance : t; };
  CheckSummary out;
  const std::vector<std::pair<std::string, MeridianMesh>> domains = {
      {"square", mesh_domain(unit_square(opt.h))}, {"lshape", mesh_domain(l_shape(opt.h))}};
  std::mt19937 gen(opt.seed);

  // decomposition isometries
  IsometryOptions iso;
  iso.tolerance = tol(1e-8);
  iso.engine = opt.engine;
  for (const auto& [name, mesh] : domains) {
    for (int f = 0; f < opt.fields; ++f) {
      std::vector<int> ks;
      if (f == 0)
        ks = {0};
      else if (f == 1)
        ks = {-2, 0, 3};
      else {
        std::vector<int> all = {-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5};
        std::shuffle(all.begin(), all.end(), gen);
        ks.assign(all.begin(), all.begin() + 2 + f % 4);
        std::sort(ks.begin(), ks.end());
      }
      const FnStack field = random_trig_field(ks, opt.seed + static_cast<unsigned>(f));
      out.append(isometry_checks("isometry." + name + ".field" + std::to_string(f), mesh, field, iso));
    }
    // 2v has four times every squared norm
    const FnStack v = random_trig_field({-1, 2}, opt.seed + 99u);
    FnStack v2 = v;
    for (auto& [k, m] : v2.velocity) m = scaled(m, 2.0);
    const Norms3D a = tensor_norms(mesh, v, 16), b = tensor_norms(mesh, v2, 16);
    out.at_most("homogeneity." + name, rel(4.0 * (a.velocity_l2_sq + a.velocity_h1_semi_sq),
                                            b.velocity_l2_sq + b.velocity_h1_semi_sq),
                tol(1e-12));
  }

  const MeridianMesh& square = domains[0].second;

  // polarization identity
  double pol = 0.0;
  for (int k = -5; k <= 5; ++k)
    for (unsigned i = 0; i < 3; ++i)
      pol = std::max(pol, polarization_defect(domains[i % 2].second,
                                              random_admissible_mode(k, opt.seed + 31u * i + static_cast<unsigned>(k + 50)),
                                              opt.engine));
  out.at_most("polarization.max_defect", pol, tol(1e-12));

  // norm equivalence
  for (int k : {2, 3, 5, 10}) {
    const EquivalenceRange r = equivalence_range(square, k, 100, opt.seed + static_cast<unsigned>(k), opt.engine);
    out.at_least("equivalence.k" + std::to_string(k) + ".lower", r.min_ratio, 0.5);
    out.at_most("equivalence.k" + std::to_string(k) + ".upper", r.max_ratio, 1.5);
  }
  {
    const std::vector<int> ks = {2, 3, 5, 10, 20, 40};
    double worst_up = -1.0, worst_down = -1.0, range = 0.0;
    double prev_up = std::numeric_limits<double>::infinity(), prev_down = 0.0;
    for (int k : ks) {
      const double up = equivalence_family_ratio(square, k, true, opt.engine);
      const double down = equivalence_family_ratio(square, k, false, opt.engine);
      // upper family decreases toward 1 from above, lower family increases toward 1 from below
      worst_up = std::max(worst_up, up - prev_up);
      worst_down = std::max(worst_down, prev_down - down);
      range = std::max({range, up - 1.5, 0.5 - down, 1.0 - up, down - 1.0});
      prev_up = up;
      prev_down = down;
    }
    out.at_most("equivalence.family_upper_monotone", worst_up, 0.0);
    out.at_most("equivalence.family_lower_monotone", worst_down, 0.0);
    out.at_most("equivalence.family_bounds", range, 0.0);
  }

  // angular derivatives of trigonometric polynomials
  {
    const FnStack field = random_trig_field({-3, -1, 0, 2, 4}, opt.seed + 7u);
    std::map<int, double> norms;
    for (const auto& [k, v] : field.velocity) norms[k] = vector_mode_norm(square, v).h1k();
    for (int s = 0; s <= 2; ++s) {
      out.at_most("angular_derivatives.s" + std::to_string(s), angular_derivative_defect(square, field, s), tol(1e-8));
      const double an = anisotropic_norm(norms, s);
      const double d = angular_derivative_norm_sq(norms, s);
      out.at_least("angular_derivatives.s" + std::to_string(s) + ".lower", d / (an * an),
                   std::pow(2.0, -s) * (1.0 - 1e-12));
      out.at_most("angular_derivatives.s" + std::to_string(s) + ".upper", d / (an * an) - 1.0, tol(1e-14));
    }
  }

  // discrete dual norm is the Riesz representer norm; conjugate data gives the same value
  for (int k : {0, 1, 3}) {
    auto plus = std::make_shared<FemSpace>(build_space(square, k));
    auto minus = std::make_shared<FemSpace>(build_space(square, -k));
    const SaddleSystem sp = assemble(plus, square, k), sm = assemble(minus, square, -k);
    std::normal_distribution<double> d;
    VecC w(sp.A.rows());
    for (auto& x : w) x = cplx(d(gen), d(gen));
    const VecC f = sp.A * w;
    out.at_most("dual_norm.riesz.k" + std::to_string(k), rel(dual_mode_norm(sp, f), std::sqrt(w.dot(sp.A * w).real())),
                tol(1e-10));
    out.at_most("dual_norm.conjugate.k" + std::to_string(k),
                rel(dual_mode_norm(sp, f), dual_mode_norm(sm, VecC(f.conjugate()))), tol(1e-10));
  }

  // membership alarm: L^2_{-1} of a constant diverges, of q = r it does not
  {
    const auto one = ScalarModeFn::closed_form([](double, double) { return cplx(1.0); },
                                               [](double, double) { return cplx(0.0); },
                                               [](double, double) { return cplx(0.0); });
    const auto lin = ScalarModeFn::closed_form([](double r, double) { return cplx(r); },
                                               [](double, double) { return cplx(1.0); },
                                               [](double, double) { return cplx(0.0); });
    auto quantity = [](const ScalarModeFn& q) {
      return [q](const MeridianMesh& m) { return scalar_mode_norm(m, q, 2).h1k_sq; };
    };
    const DivergenceCheck bad = divergence_alarm(square, quantity(one));
    const DivergenceCheck good = divergence_alarm(square, quantity(lin));
    out.add({"divergence_alarm.constant_flagged", bad.diverging, bad.increment_ratio, 0.75});
    out.add({"divergence_alarm.linear_clear", !good.diverging, good.increment_ratio, 0.75});
  }

  // squared norms of conjugate modes agree
  {
    double worst = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const VectorModeFn v = random_admissible_mode(k, opt.seed + 500u + static_cast<unsigned>(k));
      VectorModeFn c;
      c.k = -k;
      for (int i = 0; i < 3; ++i) {
        const ScalarModeFn src = v.c[i];
        c.c[i] = ScalarModeFn::closed_form(
            [src](double r, double z) { return std::conj(src(r, z)); },
            [src](double r, double z) { return std::conj(src.sample(0, {}, r, z).d_r); },
            [src](double r, double z) { return std::conj(src.sample(0, {}, r, z).d_z); });
      }
      worst = std::max(worst, rel(vector_mode_norm(square, v).h1k_sq, vector_mode_norm(square, c).h1k_sq));
    }
    out.at_most("conjugate_modes.h1k", worst, tol(1e-12));
  }
  return out;
}

}  // namespace axistokes
