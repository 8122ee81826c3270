#include "axistokes/driver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>

#include "axistokes/basis.hpp"
#include "axistokes/manufactured.hpp"
#include "axistokes/norms.hpp"
#include "axistokes/parallel.hpp"

namespace axistokes {

namespace {

/// Mode data for one wavenumber; `zero` marks modes that need no solve.
struct ModeData {
  VectorModeFn forcing;
  VectorModeFn boundary;
  bool zero = false;
};

struct ModeOutcome {
  SolveResult result;
  DirichletReport dirichlet;
};

bool imaginary_parts_vanish(const ManufacturedCase& c, const MeridianMesh& mesh) {
  for (const RZ& x : mesh.vertices()) {
    if (c.p.eval(x.r, x.z).imag() != 0.0) return false;
    for (int i = 0; i < 3; ++i)
      if (c.u[i].eval(x.r, x.z).imag() != 0.0 || c.f[i].eval(x.r, x.z).imag() != 0.0) return false;
  }
  return true;
}

CartesianField cartesian(const std::array<Expr, 3>& cyl) {
  return [cyl](double r, double theta, double z) {
    const Vec3 v{cyl[0].eval(r, z, theta), cyl[1].eval(r, z, theta), cyl[2].eval(r, z, theta)};
    return mat_vec(rotation(theta), v);
  };
}

ModeField zero_field(const MeridianMesh& mesh, int k) {
  ModeField f;
  f.k = k;
  f.u = VecC::Zero(static_cast<Eigen::Index>(3 * num_p2_nodes(mesh)));
  f.p = VecC::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  return f;
}

ModeOutcome solve_mode(const MeridianMesh& mesh, int k, const ModeData& d, bool real_data, const SolverConfig& cfg) {
  auto space = std::make_shared<FemSpace>(build_space(mesh, k));
  SaddleSystem sys = assemble(space, mesh, k);
  set_load(sys, assemble_rhs(*space, d.forcing));
  ModeOutcome out;
  out.dirichlet = set_dirichlet(sys, d.boundary);
  const bool fast = real_data && k == 0 && cfg.method == SolverConfig::Method::Direct;
  out.result = fast ? solve_axisymmetric_real(sys, cfg) : solve(sys, cfg);
  return out;
}

}  // namespace

std::vector<int> run_wavenumbers(const RunConfig& config) {
  std::vector<int> ks;
  if (config.wavenumbers) {
    ks = *config.wavenumbers;
  } else {
    for (int k = -config.N; k <= config.N; ++k) ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

SolveSummary run_solve(const RunConfig& config, const MeridianMesh& mesh, unsigned jobs) {
  config.require_data();
  const std::vector<int> ks = run_wavenumbers(config);
  int k_max = 0;
  for (int k : ks) k_max = std::max(k_max, std::abs(k));

  SolveSummary summary;
  std::optional<ManufacturedCase> mcase;
  bool real_data = true;
  int n_theta = 0;
  if (config.manufactured) {
    mcase = builtin_case(*config.manufactured).mean_corrected(mesh);
    real_data = mcase->k == 0 && imaginary_parts_vanish(*mcase, mesh);
    if (!std::count(ks.begin(), ks.end(), mcase->k))
      summary.warnings.push_back("case wavenumber " + std::to_string(mcase->k) + " lies outside the mode range");
  } else {
    n_theta = config.n_theta > 0 ? config.n_theta : default_n_theta(k_max);
    check_angular_resolution(k_max, n_theta);
  }

  // real data: solve k >= 0 only, the rest follows by conjugation
  std::vector<int> to_solve;
  for (int k : ks) {
    const int kk = real_data ? std::abs(k) : k;
    if (std::find(to_solve.begin(), to_solve.end(), kk) == to_solve.end()) to_solve.push_back(kk);
  }
  std::sort(to_solve.begin(), to_solve.end());

  std::vector<ModeData> data(to_solve.size());
  for (std::size_t i = 0; i < to_solve.size(); ++i) {
    const int k = to_solve[i];
    if (mcase) {
      if (k == mcase->k) {
        data[i].forcing = mcase->forcing();
        data[i].boundary = mcase->boundary();
      } else {
        data[i].zero = true;
      }
    } else {
      data[i].forcing = extract_coefficient(cartesian(config.expressions->forcing), k, n_theta);
      data[i].boundary = extract_coefficient(cartesian(config.expressions->boundary), k, n_theta);
    }
  }

  std::vector<ModeOutcome> outcomes(to_solve.size());
  parallel_for(to_solve.size(), jobs, [&](std::size_t i) {
    if (!data[i].zero) outcomes[i] = solve_mode(mesh, to_solve[i], data[i], real_data, config.solver);
  });

  FourierStack& stack = summary.stack;
  stack.N = k_max;
  stack.real_data = real_data;
  stack.mesh_id = mesh.id();
  for (std::size_t i = 0; i < to_solve.size(); ++i) {
    const int k = to_solve[i];
    stack.modes[k] = data[i].zero ? zero_field(mesh, k) : outcomes[i].result.field;
    for (const auto& w : outcomes[i].dirichlet.warnings) summary.warnings.push_back("mode " + std::to_string(k) + ": " + w);
    if (k == 0 && !data[i].zero) {
      summary.flux = outcomes[i].dirichlet.flux;
      summary.flux_violation = outcomes[i].dirichlet.flux_violation;
      if (summary.flux_violation)
        summary.warnings.push_back("boundary data at k = 0 has nonzero flux; the discrete problem is incompatible");
    }
  }
  if (real_data) stack.mirror_conjugates();

  const std::set<int> solved(to_solve.begin(), to_solve.end());
  for (const auto& [k, field] : stack.modes) {
    ModeSummary m;
    m.k = k;
    m.mirrored = !solved.count(k);
    if (!m.mirrored) {
      const auto i = static_cast<std::size_t>(std::find(to_solve.begin(), to_solve.end(), k) - to_solve.begin());
      m.solved = !data[i].zero;
      if (m.solved) {
        m.res_u = outcomes[i].result.report.res_u;
        m.res_p = outcomes[i].result.report.res_p;
        m.iterations = outcomes[i].result.report.iterations;
      }
    }
    m.velocity_norm = vector_mode_norm(mesh, field.velocity_fn(mesh)).h1k();
    m.pressure_norm = scalar_mode_norm(mesh, field.pressure_fn(mesh), k).l2_1();
    summary.modes.push_back(m);
  }

  if (mcase && stack.modes.count(mcase->k)) {
    const ModeField& f = stack.modes.at(mcase->k);
    const VectorModeFn uh = f.velocity_fn(mesh), ue = mcase->velocity();
    VectorModeFn diff;
    diff.k = mcase->k;
    for (int c = 0; c < 3; ++c) diff.c[c] = ScalarModeFn::combine(1.0, uh.c[c], -1.0, ue.c[c]);
    summary.err_u = vector_mode_norm(mesh, diff).h1k();
    summary.err_p =
        scalar_mode_norm(mesh, ScalarModeFn::combine(1.0, f.pressure_fn(mesh), -1.0, mcase->pressure()), mcase->k).l2_1();
  }
  return summary;
}

std::string format_summary(const SolveSummary& s) {
  std::ostringstream o;
  o.precision(6);
  for (const auto& m : s.modes) {
    o << "mode " << m.k << ' ' << (m.mirrored ? "mirrored" : m.solved ? "solved" : "zero") << " |u|_H1k "
      << m.velocity_norm << " |p|_L2 " << m.pressure_norm;
    if (m.solved) o << " res_u " << m.res_u << " res_p " << m.res_p << " iterations " << m.iterations;
    o << '\n';
  }
  if (s.flux) o << "flux k=0 " << s.flux->real() << ' ' << s.flux->imag() << (s.flux_violation ? " VIOLATION" : " ok") << '\n';
  if (s.err_u) o << "error |u - u_exact|_H1k " << *s.err_u << " |p - p_exact|_L2 " << *s.err_p << '\n';
  for (const auto& w : s.warnings) o << "warning: " << w << '\n';
  return o.str();
}

}  // namespace axistokes
