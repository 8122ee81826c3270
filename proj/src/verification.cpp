#include "axistokes/verification.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "axistokes/basis.hpp"
#include "axistokes/parallel.hpp"

namespace axistokes {

std::string format_check(const CheckResult& c) {
  std::ostringstream out;
  out << "CHECK " << c.name << ' ' << (c.pass ? "PASS" : "FAIL") << ' ' << std::setprecision(6) << c.value << ' '
      << c.tolerance;
  return out.str();
}

void CheckSummary::at_most(const std::string& name, double value, double tolerance) {
  checks.push_back({name, value <= tolerance, value, tolerance});
}

void CheckSummary::at_least(const std::string& name, double value, double tolerance) {
  checks.push_back({name, value >= tolerance, value, tolerance});
}

void CheckSummary::append(const CheckSummary& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

bool CheckSummary::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string CheckSummary::format() const {
  std::string out;
  for (const auto& c : checks) out += format_check(c) + "\n";
  return out;
}

DomainSpec unit_square(double h, unsigned level) { return DomainSpec::rectangle(0, 1, 0, 1, h, level); }

DomainSpec l_shape(double h, unsigned level) {
  DomainSpec s;
  s.polygon = {{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}};
  s.target_h = h;
  s.refinement_level = level;
  return s;
}

MeridianMesh mesh_domain(const DomainSpec& spec) {
  const auto& p = spec.polygon;
  const bool rect = p.size() == 4 && p[0].z == p[1].z && p[1].r == p[2].r && p[2].z == p[3].z && p[3].r == p[0].r &&
                    p[0].r < p[1].r && p[1].z < p[2].z;
  return rect ? generate_structured(spec) : triangulate_polygon(spec);
}

// ---- convergence ----

namespace {

VectorModeFn difference(const VectorModeFn& a, const VectorModeFn& b) {
  VectorModeFn d;
  d.k = a.k;
  for (int c = 0; c < 3; ++c) d.c[c] = ScalarModeFn::combine(1.0, a.c[c], -1.0, b.c[c]);
  return d;
}

struct Solved {
  std::shared_ptr<FemSpace> space;
  SaddleSystem sys;
  SolveResult result;
};

Solved solve_case(const ManufacturedCase& c, const MeridianMesh& mesh, const SolverConfig& cfg) {
  Solved s;
  s.space = std::make_shared<FemSpace>(build_space(mesh, c.k));
  s.sys = assemble(s.space, mesh, c.k);
  set_load(s.sys, assemble_rhs(*s.space, c.forcing()));
  set_dirichlet(s.sys, c.boundary());
  s.result = solve(s.sys, cfg);
  return s;
}

double rate(double e0, double e1, double h0, double h1) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(e0 / e1) / std::log(h0 / h1);
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

}  // namespace

std::string ConvergenceTable::csv_header() { return "h,err_u,rate_u,err_p,rate_p"; }

std::string ConvergenceTable::csv() const {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows)
    out += fmt(r.h) + "," + fmt(r.err_u) + "," + fmt(r.rate_u) + "," + fmt(r.err_p) + "," + fmt(r.rate_p) + "\n";
  return out;
}

ConvergenceTable convergence_study(const ManufacturedCase& c, const MeridianMesh& coarse, int levels,
                                   const SolverConfig& cfg, const QuadratureRule& rule) {
  if (levels < 3) throw std::invalid_argument("convergence study needs at least 3 mesh levels");
  const ManufacturedCase cc = c.mean_corrected(coarse);
  const CaseValidation v = validate_case(cc, coarse);
  if (!v.admitted) throw std::invalid_argument("case '" + c.name + "' rejected: " + v.reason);

  ConvergenceTable table;
  table.case_name = c.name;
  table.k = c.k;
  const VectorModeFn u_exact = cc.velocity();
  const ScalarModeFn p_exact = cc.pressure();
  MeridianMesh mesh = coarse;
  for (int level = 0; level < levels; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    const Solved s = solve_case(cc, mesh, cfg);
    ConvergenceRow row;
    row.h = mesh.max_edge_length();
    row.velocity_dofs = s.space->n_full();
    row.err_u = vector_mode_norm(mesh, difference(s.result.field.velocity_fn(mesh), u_exact), rule).h1k();
    row.err_p =
        scalar_mode_norm(mesh, ScalarModeFn::combine(1.0, s.result.field.pressure_fn(mesh), -1.0, p_exact), c.k, rule)
            .l2_1();
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      row.rate_u = rate(prev.err_u, row.err_u, prev.h, row.h);
      row.rate_p = rate(prev.err_p, row.err_p, prev.h, row.h);
      if (row.err_u > prev.err_u || row.err_p > prev.err_p) table.monotone = false;
    } else {
      row.rate_u = row.rate_p = std::numeric_limits<double>::quiet_NaN();
    }
    table.rows.push_back(row);
  }
  if (!table.monotone) {
    std::ostringstream d;
    d << "non-monotone errors for case " << c.name << " (k = " << c.k << ")\n";
    for (const auto& r : table.rows)
      d << "  h = " << r.h << " dofs = " << r.velocity_dofs << " err_u = " << r.err_u << " err_p = " << r.err_p
        << "\n";
    table.diagnostic = d.str();
  }
  return table;
}

// ---- truncation ----

double DecayFamily::amplitude(int k) const {
  if (last_mode && std::abs(k) > *last_mode) return 0.0;
  return std::pow(1.0 + std::abs(k), -(s + 1.0));
}

std::string TruncationTable::csv_header() { return "N,tail,bound_ratio"; }

std::string TruncationTable::csv() const {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += std::to_string(r.N) + "," + fmt(r.tail) + "," + fmt(r.bound_ratio) + "\n";
  return out;
}

namespace {

TruncationTable truncation_impl(const std::function<double(int)>& mode_norm_sq,
                                const std::function<void(int, int)>& prefetch, double s,
                                const std::vector<int>& N_list, const TruncationOptions& opt) {
  if (N_list.empty()) throw std::invalid_argument("empty truncation list");
  if (!std::is_sorted(N_list.begin(), N_list.end()) || N_list.front() < 1)
    throw std::invalid_argument("truncation orders must be positive and ascending");
  if (s < 0.0) throw std::invalid_argument("decay order s must be nonnegative");
  const int n_max = N_list.back();
  int K = 4 * n_max;
  if (prefetch) prefetch(0, K);
  std::vector<double> g;  // g[k] = m(k) + m(-k), g[0] = m(0)
  auto extend = [&](int upto) {
    for (int k = static_cast<int>(g.size()); k <= upto; ++k)
      g.push_back(k == 0 ? mode_norm_sq(0) : mode_norm_sq(k) + mode_norm_sq(-k));
  };
  while (true) {
    extend(K);
    double tail_sq = 0.0;
    for (int k = n_max + 1; k <= K; ++k) tail_sq += g[static_cast<std::size_t>(k)];
    const double gK = g[static_cast<std::size_t>(K)], gH = g[static_cast<std::size_t>(K / 2)];
    double remainder = 0.0;
    if (gK > 0.0) {
      const double alpha = gH > 0.0 ? std::log(gH / gK) / std::log(2.0) : 0.0;
      remainder = alpha > 1.0 ? gK * K / (alpha - 1.0) : std::numeric_limits<double>::infinity();
    }
    const bool converged =
        remainder == 0.0 || (tail_sq > 0.0 && std::sqrt(1.0 + remainder / tail_sq) - 1.0 <= opt.tail_tolerance);
    if (converged) break;
    if (2 * K > opt.k_max_cap)
      throw TruncationError("tail not converged to " + fmt(100 * opt.tail_tolerance) + "% with K_max = " +
                            std::to_string(K) + " (cap " + std::to_string(opt.k_max_cap) + ")");
    if (prefetch) prefetch(K + 1, 2 * K);
    K *= 2;
  }

  TruncationTable t;
  t.s = s;
  t.k_max = K;
  for (int N : N_list) {
    double tail_sq = 0.0;
    for (int k = N + 1; k <= K; ++k) tail_sq += g[static_cast<std::size_t>(k)];
    const double tail = std::sqrt(tail_sq);
    t.rows.push_back({N, tail, tail * std::pow(double(N), s)});
  }
  std::vector<const TruncationRow*> pos;
  for (const auto& r : t.rows)
    if (r.tail > 0.0) pos.push_back(&r);
  t.slope = t.fitted_slope = std::numeric_limits<double>::quiet_NaN();
  t.bound_spread = 1.0;
  if (pos.size() >= 2) {
    const auto& a = *pos[pos.size() - 2];
    const auto& b = *pos.back();
    t.slope = std::log(b.tail / a.tail) / std::log(double(b.N) / a.N);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto* r : pos) {
      const double x = std::log(double(r->N)), y = std::log(r->tail);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = double(pos.size());
    t.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto* r : pos) {
      lo = std::min(lo, r->bound_ratio);
      hi = std::max(hi, r->bound_ratio);
    }
    t.bound_spread = hi / lo;
  }
  return t;
}

}  // namespace

TruncationTable truncation_from_mode_norms(const std::function<double(int)>& mode_norm_sq, double s,
                                           const std::vector<int>& N_list, const TruncationOptions& opt) {
  return truncation_impl(mode_norm_sq, {}, s, N_list, opt);
}

TruncationTable truncation_study(const DecayFamily& family, const std::vector<int>& N_list,
                                 const TruncationOptions& opt) {
  return truncation_from_mode_norms(
      [&family](int k) {
        const double a = family.amplitude(k);
        return a * a;
      },
      family.s, N_list, opt);
}

namespace {

VectorModeFn forcing_shape(int k) {
  const double pi = std::numbers::pi;
  return VectorModeFn{{ScalarModeFn::closed_form([](double r, double z) { return cplx(std::cos(z) * (1.0 + r)); }),
                       ScalarModeFn::closed_form([](double r, double z) { return cplx(r * std::sin(z) + 1.0); }),
                       ScalarModeFn::closed_form([pi](double r, double z) { return cplx(std::exp(-r) * std::cos(pi * z)); })},
                      k};
}

struct Response {
  double u_norm = 0.0;
  double p_norm = 0.0;
  double dual = 0.0;
};

Response respond(const MeridianMesh& mesh, const VectorModeFn& f, const SolverConfig& cfg) {
  auto space = std::make_shared<FemSpace>(build_space(mesh, f.k));
  SaddleSystem sys = assemble(space, mesh, f.k);
  set_load(sys, assemble_rhs(*space, f));
  const SolveResult res = solve(sys, cfg);
  const VecC u = sys.restrict(res.field.u);
  Response out;
  out.u_norm = std::sqrt(std::max(0.0, u.dot(sys.A * u).real()));
  out.p_norm = std::sqrt(std::max(0.0, res.field.p.dot(sys.pressure_mass.cast<cplx>() * res.field.p).real()));
  out.dual = dual_mode_norm(sys, sys.rhs_u);
  return out;
}

}  // namespace

double unit_forcing_response_sq(const MeridianMesh& mesh, int k, const SolverConfig& cfg) {
  const Response r = respond(mesh, forcing_shape(k), cfg);
  return (r.u_norm * r.u_norm + r.p_norm * r.p_norm) / (r.dual * r.dual);
}

TruncationTable truncation_study_with_solves(const DecayFamily& family, const std::vector<int>& N_list,
                                             const MeridianMesh& mesh, const SolveStudyOptions& opt) {
  std::vector<double> response;  // indexed by |k|
  auto prefetch = [&](int lo, int hi) {
    if (static_cast<int>(response.size()) <= hi) response.resize(static_cast<std::size_t>(hi) + 1, -1.0);
    std::vector<int> todo;
    for (int k = lo; k <= hi; ++k)
      if (family.amplitude(k) > 0.0 && response[static_cast<std::size_t>(k)] < 0.0) todo.push_back(k);
    parallel_for(todo.size(), opt.jobs, [&](std::size_t i) {
      response[static_cast<std::size_t>(todo[i])] = unit_forcing_response_sq(mesh, todo[i], opt.solver);
    });
  };
  auto norm_sq = [&](int k) {
    const double a = family.amplitude(k);
    return a > 0.0 ? a * a * response.at(static_cast<std::size_t>(std::abs(k))) : 0.0;
  };
  TruncationOptions t;
  t.k_max_cap = opt.k_max_cap;
  return truncation_impl(norm_sq, prefetch, family.s, N_list, t);
}

// ---- stability and inf-sup ----

StabilityStudy stability_study(const MeridianMesh& mesh, const std::vector<int>& ks, const SolverConfig& cfg) {
  if (ks.empty()) throw std::invalid_argument("stability study needs at least one wavenumber");
  const double pi = std::numbers::pi;
  using PF = ScalarModeFn::PointFn;
  const std::vector<std::array<PF, 3>> family = {
      {PF([](double, double) { return cplx(1.0); }), PF([](double, double) { return cplx(1.0); }),
       PF([](double, double) { return cplx(1.0); })},
      {PF([pi](double, double z) { return cplx(std::sin(pi * z)); }), PF([](double r, double) { return cplx(r); }),
       PF([pi](double r, double) { return cplx(std::cos(pi * r)); })},
      {PF([](double, double z) { return cplx(z * (1.0 - z)); }), PF([](double r, double z) { return cplx(0.0, r * z); }),
       PF([](double r, double) { return cplx(std::exp(-r)); })},
  };
  StabilityStudy out;
  for (int k : ks) {
    StabilityRow row;
    row.k = k;
    for (const auto& f : family) {
      const VectorModeFn fk{{ScalarModeFn::closed_form(f[0]), ScalarModeFn::closed_form(f[1]),
                             ScalarModeFn::closed_form(f[2])},
                            k};
      const Response r = respond(mesh, fk, cfg);
      row.constant = std::max(row.constant, (r.u_norm + r.p_norm) / r.dual);
    }
    out.rows.push_back(row);
  }
  double hi = 0.0;
  for (const auto& r : out.rows) hi = std::max(hi, r.constant);
  out.growth = hi / out.rows.front().constant;
  return out;
}

InfSupStudy inf_sup_study(const MeridianMesh& coarse, int levels, const std::vector<int>& ks, const SolverConfig& cfg) {
  InfSupStudy out;
  std::map<int, std::vector<double>> by_k;
  std::vector<std::vector<double>> by_level;
  MeridianMesh mesh = coarse;
  for (int level = 0; level < levels; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    by_level.emplace_back();
    for (int k : ks) {
      auto space = std::make_shared<FemSpace>(build_space(mesh, k));
      const SaddleSystem sys = assemble(space, mesh, k);
      const InfSupEstimate e = estimate_inf_sup(sys, cfg);
      out.rows.push_back({k, e.mesh_h, e.beta_h});
      by_k[k].push_back(e.beta_h);
      by_level.back().push_back(e.beta_h);
    }
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / *hi;
  };
  for (const auto& [k, v] : by_k) out.level_spread = std::max(out.level_spread, spread(v));
  for (const auto& v : by_level) out.k_spread = std::max(out.k_spread, spread(v));
  return out;
}

// ---- solver consistency ----

namespace {

double rel_diff(const VecC& a, const VecC& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

double conjugation_defect(const ManufacturedCase& c, const MeridianMesh& mesh, const SolverConfig& cfg) {
  const ManufacturedCase plus = c.mean_corrected(mesh);
  const ManufacturedCase minus = conjugate_case(plus);
  const Solved a = solve_case(plus, mesh, cfg);
  const Solved b = solve_case(minus, mesh, cfg);
  return std::max(rel_diff(a.result.field.u.conjugate(), b.result.field.u),
                  rel_diff(a.result.field.p.conjugate(), b.result.field.p));
}

double decoupling_defect(const ManufacturedCase& c, const MeridianMesh& mesh, const SolverConfig& cfg) {
  if (c.k != 0) throw std::invalid_argument("decoupling applies to k = 0 only");
  const Solved a = solve_case(c.mean_corrected(mesh), mesh, cfg);
  const SolveResult fast = solve_axisymmetric_real(a.sys, cfg);
  return std::max(rel_diff(a.result.field.u, fast.field.u), rel_diff(a.result.field.p, fast.field.p));
}

}  // namespace axistokes
