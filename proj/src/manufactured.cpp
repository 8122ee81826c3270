#include "axistokes/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "axistokes/norms.hpp"

namespace axistokes {

namespace {

CExpr real(double v) { return CExpr(Expr(v)); }
CExpr imag(double v) { return CExpr(Expr(0.0), Expr(v)); }

CExpr lap_a(const CExpr& u) {
  const CExpr ur = u.diff(Var::R);
  return ur.diff(Var::R) + ur / Expr::r() + u.diff(Var::Z).diff(Var::Z);
}

CExpr rpow(int n) { return n == 0 ? real(1.0) : CExpr(pow(Expr::r(), Expr(double(n)))); }

}  // namespace

ScalarModeFn to_fn(const CExpr& e) {
  const CExpr er = e.diff(Var::R), ez = e.diff(Var::Z);
  return ScalarModeFn::closed_form([e](double r, double z) { return e.eval(r, z); },
                                   [er](double r, double z) { return er.eval(r, z); },
                                   [ez](double r, double z) { return ez.eval(r, z); });
}

ManufacturedCase conjugate_case(const ManufacturedCase& c) {
  return make_case(c.name + "_conj", -c.k, c.u[0].conj(), c.u[1].conj(), c.u[2].conj(), c.p.conj());
}

VectorModeFn ManufacturedCase::velocity() const { return {{to_fn(u[0]), to_fn(u[1]), to_fn(u[2])}, k}; }

ScalarModeFn ManufacturedCase::pressure() const { return to_fn(p); }

VectorModeFn ManufacturedCase::forcing() const {
  VectorModeFn v;
  v.k = k;
  for (int c = 0; c < 3; ++c) {
    const CExpr e = f[c];
    v.c[c] = ScalarModeFn::closed_form([e](double r, double z) { return e.eval(r, z); });
  }
  return v;
}

ManufacturedCase ManufacturedCase::mean_corrected(const MeridianMesh& mesh) const {
  if (k != 0) return *this;
  const CExpr pe = p;
  const cplx num = integrate_weighted(mesh, [&pe](double r, double z) { return pe.eval(r, z); }, 1);
  const cplx den = integrate_weighted(mesh, [](double, double) { return cplx(1.0); }, 1);
  const cplx mean = num / den;
  ManufacturedCase out = *this;
  out.p = p - CExpr(Expr(mean.real()), Expr(mean.imag()));
  return out;
}

ManufacturedCase make_case(std::string name, int k, CExpr u_r, CExpr u_theta, CExpr u_z, CExpr p) {
  ManufacturedCase c;
  c.name = std::move(name);
  c.k = k;
  c.u = {u_r, u_theta, u_z};
  c.p = p;
  const double kk = double(k) * double(k);
  const Expr r2 = Expr::r() * Expr::r();
  c.f[0] = -lap_a(u_r) + real(1.0 + kk) * u_r / r2 + imag(2.0 * k) * u_theta / r2 + p.diff(Var::R);
  c.f[1] = -lap_a(u_theta) + real(1.0 + kk) * u_theta / r2 - imag(2.0 * k) * u_r / r2 + imag(k) * p / Expr::r();
  c.f[2] = -lap_a(u_z) + real(kk) * u_z / r2 + p.diff(Var::Z);
  return c;
}

ManufacturedCase make_solenoidal_case(std::string name, int k, const CExpr& R, const CExpr& Z, const CExpr& P) {
  if (k == 0) throw std::invalid_argument("solenoidal construction needs k != 0");
  const int ak = std::abs(k);
  const CExpr u_r = rpow(ak - 1) * R;
  const CExpr u_z = rpow(ak) * Z;
  const CExpr r = CExpr(Expr::r());
  const CExpr u_theta = imag(1.0 / k) * ((r * u_r).diff(Var::R) + r * u_z.diff(Var::Z));
  return make_case(std::move(name), k, u_r, u_theta, u_z, rpow(ak) * P);
}

ManufacturedCase make_axisymmetric_case(std::string name, const Expr& F, const Expr& G, const Expr& p) {
  const Expr r = Expr::r();
  const Expr u_r = r * F.diff(Var::Z);
  const Expr u_z = -(Expr(2.0) * F + r * F.diff(Var::R));
  return make_case(std::move(name), 0, CExpr(u_r), CExpr(r * G), CExpr(u_z), CExpr(p));
}

StrongResidual strong_residual(const ManufacturedCase& c, double r, double z) {
  if (!(r > 0.0)) throw std::invalid_argument("strong residual is evaluated at r > 0 only");
  const double kk = double(c.k) * double(c.k);
  const cplx ik(0.0, double(c.k));
  std::array<cplx, 3> u, lap;
  for (int i = 0; i < 3; ++i) {
    u[i] = c.u[i].eval(r, z);
    lap[i] = lap_a(c.u[i]).eval(r, z);
  }
  const cplx p = c.p.eval(r, z);
  const cplx pr = c.p.diff(Var::R).eval(r, z), pz = c.p.diff(Var::Z).eval(r, z);
  StrongResidual res;
  const double r2 = r * r;
  res.momentum[0] = c.f[0].eval(r, z) - (-lap[0] + (1.0 + kk) / r2 * u[0] + 2.0 * ik / r2 * u[1] + pr);
  res.momentum[1] = c.f[1].eval(r, z) - (-lap[1] + (1.0 + kk) / r2 * u[1] - 2.0 * ik / r2 * u[0] + ik / r * p);
  res.momentum[2] = c.f[2].eval(r, z) - (-lap[2] + kk / r2 * u[2] + pz);
  res.divergence = c.u[0].diff(Var::R).eval(r, z) + u[0] / r + ik / r * u[1] + c.u[2].diff(Var::Z).eval(r, z);
  return res;
}

CaseValidation validate_case(const ManufacturedCase& c, const MeridianMesh& mesh, unsigned seed) {
  CaseValidation v;
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int s = 0; s < 64; ++s) {
    const std::size_t t = gen() % mesh.num_triangles();
    double l0 = unif(gen), l1 = unif(gen) * (1.0 - l0);
    const std::array<double, 3> bary = {l0, l1, 1.0 - l0 - l1};
    const auto& tri = mesh.triangles()[t];
    double r = 0, z = 0;
    for (int i = 0; i < 3; ++i) {
      r += bary[i] * mesh.vertices()[tri[i]].r;
      z += bary[i] * mesh.vertices()[tri[i]].z;
    }
    if (!(r > 0.0)) continue;
    const auto res = strong_residual(c, r, z);
    double scale = 1.0;
    for (const auto& fc : c.f) scale = std::max(scale, std::abs(fc.eval(r, z)));
    for (const auto& m : res.momentum) v.max_residual = std::max(v.max_residual, std::abs(m) / scale);
    v.max_residual = std::max(v.max_residual, std::abs(res.divergence) / scale);
  }
  const ManufacturedCase cc = c;
  v.divergence_l2 = std::sqrt(std::abs(integrate_weighted(
      mesh,
      [&cc](double r, double z) { return cplx(std::norm(strong_residual(cc, r, z).divergence)); }, 1)));

  const int ak = std::abs(c.k);
  const cplx ik(0.0, double(c.k));
  for (const auto& e : mesh.boundary_edges()) {
    if (e.tag != BoundaryTag::Gamma0) continue;
    const RZ a = mesh.vertices()[e.v[0]], b = mesh.vertices()[e.v[1]];
    for (double s : {0.0, 0.5}) {
      const double z = a.z + s * (b.z - a.z);
      const cplx ur = c.u[0].eval(0.0, z), ut = c.u[1].eval(0.0, z), uz = c.u[2].eval(0.0, z);
      double viol = 0.0;
      if (ak == 0)
        viol = std::max(std::abs(ur), std::abs(ut));
      else if (ak == 1)
        viol = std::max(std::abs(uz), std::abs(ur + ik * ut));
      else
        viol = std::max({std::abs(ur), std::abs(ut), std::abs(uz)});
      v.axis_violation = std::max(v.axis_violation, viol);
    }
  }
  if (c.k == 0) {
    const CExpr pe = c.p;
    v.pressure_mean = std::abs(integrate_weighted(mesh, [&pe](double r, double z) { return pe.eval(r, z); }, 1));
  }
  if (v.max_residual > 1e-10)
    v.reason = "strong residual " + std::to_string(v.max_residual) + " exceeds 1e-10";
  else if (v.divergence_l2 > 1e-12)
    v.reason = "divergence " + std::to_string(v.divergence_l2) + " exceeds 1e-12";
  else if (v.axis_violation > 1e-12)
    v.reason = "axis condition violated by " + std::to_string(v.axis_violation);
  else if (v.pressure_mean > 1e-12)
    v.reason = "pressure mean " + std::to_string(v.pressure_mean) + " is not zero";
  v.admitted = v.reason.empty();
  return v;
}

ManufacturedCase builtin_case(const std::string& name) {
  const Expr r = Expr::r(), z = Expr::z();
  const Expr one(1.0), two(2.0);
  if (name == "exact_k0")
    return make_case(name, 0, CExpr(r * (one - two * z)), CExpr(r * (one + z)), CExpr(-two * (z - z * z)),
                     CExpr(r + z));
  if (name == "exact_k1")
    return make_solenoidal_case(name, 1, CExpr(one - z + Expr(0.5) * r), CExpr(one + z), CExpr(one));
  if (name == "exact_k3")
    return make_case(name, 3, CExpr(r * r), CExpr(Expr(0.0), r * r), CExpr(Expr(0.0)), CExpr(Expr(0.0)));
  if (name == "smooth_k0")
    return make_axisymmetric_case(name, exp(-r) * sin(Expr(std::numbers::pi) * z) + r * z,
                                  cos(z) * exp(Expr(0.5) * r), sin(r) * cos(z));
  if (name.rfind("smooth_k", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(name.substr(8));
    } catch (const std::exception&) {
      throw std::invalid_argument("unknown manufactured case '" + name + "'");
    }
    if (k == 0) return builtin_case("smooth_k0");
    const CExpr R(cos(z) * exp(Expr(0.5) * r), sin(r * z));
    const CExpr Z(sin(r * z + z) + one, Expr(0.3) * cos(r));
    const CExpr P(cos(r + z), Expr(0.5) * sin(z));
    return make_solenoidal_case(name, k, R, Z, P);
  }
  throw std::invalid_argument("unknown manufactured case '" + name + "'");
}

std::vector<std::string> builtin_case_names() {
  return {"exact_k0", "exact_k1", "exact_k3", "smooth_k0", "smooth_k1", "smooth_k3"};
}

}  // namespace axistokes
