#include "axistokes/saddle_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

namespace axistokes {

namespace {

using LDLT = Eigen::SimplicialLDLT<SpMat, Eigen::Lower>;
using LDLTR = Eigen::SimplicialLDLT<SpMatR, Eigen::Lower>;

double safe_norm(double x) { return x > 0.0 ? x : 1.0; }

double rhs_norm(const SaddleSystem& s) {
  return safe_norm(std::sqrt(s.rhs_u.squaredNorm() + s.rhs_p.squaredNorm()));
}

// Relative block residuals of (u, p, lambda) against the bordered system.
void fill_residuals(const SaddleSystem& s, const VecC& u, const VecC& p, cplx lambda, SolveReport& rep) {
  const double scale = rhs_norm(s);
  rep.res_u = (s.A * u + s.B.adjoint() * p - s.rhs_u).norm() / scale;
  VecC rp = s.B * u - s.rhs_p;
  if (s.mean_constraint) rp += lambda * s.mean_constraint->cast<cplx>();
  rep.res_p = rp.norm() / scale;
  rep.multiplier = lambda;
}

void remove_weighted_mean(const SaddleSystem& s, VecC& p) {
  if (!s.mean_constraint) return;
  const VecR& c = *s.mean_constraint;
  const cplx mean = c.cast<cplx>().dot(p) / c.sum();
  p.array() -= mean;
}

SolveResult solve_direct(const SaddleSystem& s) {
  const Eigen::Index nu = s.A.rows(), np = s.B.rows();
  SpMat K = s.bordered();
  K.makeCompressed();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) {
    if (s.k == 0 && !s.mean_constraint)
      throw SolverBreakdown("singular saddle matrix: k=0 system has no pressure mean constraint", {});
    throw SolverBreakdown("sparse LU factorization of the saddle matrix failed: " + lu.lastErrorMessage(), {});
  }
  VecC rhs = VecC::Zero(K.rows());
  rhs.head(nu) = s.rhs_u;
  rhs.segment(nu, np) = s.rhs_p;
  VecC x = lu.solve(rhs);
  for (int step = 0; step < 2; ++step) x += lu.solve(VecC(rhs - K * x));
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw SolverBreakdown("sparse LU solve produced a non-finite solution", {});
  SolveResult out;
  VecC u = x.head(nu), p = x.segment(nu, np);
  const cplx lambda = s.mean_constraint ? x[nu + np] : cplx{};
  fill_residuals(s, u, p, lambda, out.report);
  out.report.iterations = 1;
  out.report.history.push_back({1, out.report.res_u, out.report.res_p});
  out.field = s.expand(u, p);
  return out;
}

SolveResult solve_uzawa(const SaddleSystem& s, const SolverConfig& cfg) {
  LDLT a_inv(s.A);
  if (a_inv.info() != Eigen::Success)
    throw SolverBreakdown("velocity block is not positive definite (check boundary constraints)", {});
  LDLTR m_inv;
  if (cfg.pressure_mass_precond) {
    m_inv.compute(s.pressure_mass);
    if (m_inv.info() != Eigen::Success) throw SolverBreakdown("pressure mass matrix factorization failed", {});
  }
  auto precond = [&](const VecC& r) -> VecC {
    if (!cfg.pressure_mass_precond) return r;
    const VecR re = m_inv.solve(VecR(r.real()));
    const VecR im = m_inv.solve(VecR(r.imag()));
    VecC z(r.size());
    z.real() = re;
    z.imag() = im;
    return z;
  };

  const double scale = rhs_norm(s);
  const VecC u0 = a_inv.solve(s.rhs_u);
  VecC b = s.B * u0 - s.rhs_p;
  cplx lambda{};
  if (s.mean_constraint) {
    const VecR& c = *s.mean_constraint;
    lambda = s.rhs_p.sum() / c.sum();
    b += lambda * c.cast<cplx>();
  } else if (s.k == 0) {
    throw SolverBreakdown("singular pressure Schur complement: k=0 system has no mean constraint", {});
  }
  const double bnorm = safe_norm(b.norm());

  VecC p = VecC::Zero(b.size());
  VecC u = u0;
  VecC r = b;
  VecC z = precond(r);
  VecC d = z;
  cplx rz = r.dot(z);
  SolveReport rep;
  bool converged = r.norm() <= cfg.rel_tol * bnorm;
  int it = 0;
  while (!converged && it < cfg.max_iter) {
    ++it;
    const VecC w = a_inv.solve(s.B.adjoint() * d);
    const VecC sd = s.B * w;
    const cplx dsd = d.dot(sd);
    if (std::abs(dsd) == 0.0 || !std::isfinite(std::abs(dsd))) break;
    const cplx alpha = rz / dsd;
    p += alpha * d;
    u -= alpha * w;
    r -= alpha * sd;
    const double res_u = (s.A * u + s.B.adjoint() * p - s.rhs_u).norm() / scale;
    rep.history.push_back({it, res_u, r.norm() / scale});
    if (r.norm() <= cfg.rel_tol * bnorm) {
      converged = true;
      break;
    }
    z = precond(r);
    const cplx rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }
  if (!converged)
    throw SolverBreakdown("Uzawa-CG did not converge in " + std::to_string(cfg.max_iter) + " iterations",
                          rep.history);
  remove_weighted_mean(s, p);
  rep.iterations = it;
  fill_residuals(s, u, p, lambda, rep);
  SolveResult out;
  out.report = rep;
  out.field = s.expand(u, p);
  return out;
}

SpMatR selection(const std::vector<Eigen::Index>& rows, Eigen::Index n) {
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t j = 0; j < rows.size(); ++j) t.emplace_back(rows[j], static_cast<Eigen::Index>(j), 1.0);
  SpMatR s(n, static_cast<Eigen::Index>(rows.size()));
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

double imag_ratio(const VecC& v) {
  const double n = v.norm();
  return n > 0.0 ? v.imag().norm() / n : 0.0;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("solver rel_tol must be positive");
  if (max_iter <= 0) throw std::invalid_argument("solver max_iter must be positive");
}

SolverConfig::Method parse_method(const std::string& name) {
  if (name == "direct") return SolverConfig::Method::Direct;
  if (name == "uzawa_cg") return SolverConfig::Method::UzawaCG;
  throw std::invalid_argument("unknown solver method '" + name + "' (expected direct or uzawa_cg)");
}

std::string method_name(SolverConfig::Method m) { return m == SolverConfig::Method::Direct ? "direct" : "uzawa_cg"; }

SolveResult solve(const SaddleSystem& system, const SolverConfig& cfg) {
  cfg.validate();
  if (system.k == 0 && !system.mean_constraint)
    throw SolverBreakdown("singular pressure block: k=0 system has no mean constraint", {});
  return cfg.method == SolverConfig::Method::Direct ? solve_direct(system) : solve_uzawa(system, cfg);
}

SolveResult solve_axisymmetric_real(const SaddleSystem& s, const SolverConfig& cfg) {
  cfg.validate();
  if (s.k != 0) throw std::invalid_argument("axisymmetric fast path needs k = 0");
  if (!s.mean_constraint) throw SolverBreakdown("singular pressure block: k=0 system has no mean constraint", {});
  if (imag_ratio(s.rhs_u) > 1e-14 || imag_ratio(s.rhs_p) > 1e-14)
    throw std::invalid_argument("axisymmetric fast path needs real data");

  const FemSpace& space = *s.space;
  const auto nu = static_cast<Eigen::Index>(space.n_free());
  std::vector<Eigen::Index> meridional, swirl;
  for (Eigen::Index f = 0; f < nu; ++f)
    (space.free_dofs[static_cast<std::size_t>(f)] % 3 == 1 ? swirl : meridional).push_back(f);
  const SpMatR Sm = selection(meridional, nu);
  const SpMatR Ss = selection(swirl, nu);
  const SpMatR A = s.A.real();
  const SpMatR B = s.B.real();
  const SpMatR Am = Sm.transpose() * A * Sm;
  const SpMatR As = Ss.transpose() * A * Ss;
  const SpMatR Bm = B * Sm;
  const VecR bu = s.rhs_u.real();
  const VecR bp = s.rhs_p.real();
  const VecR& c = *s.mean_constraint;

  const Eigen::Index nm = Am.rows(), np = Bm.rows();
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index j = 0; j < Am.outerSize(); ++j)
    for (SpMatR::InnerIterator it(Am, j); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index j = 0; j < Bm.outerSize(); ++j)
    for (SpMatR::InnerIterator it(Bm, j); it; ++it) {
      t.emplace_back(nm + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), nm + it.row(), it.value());
    }
  for (Eigen::Index m = 0; m < np; ++m) {
    t.emplace_back(nm + m, nm + np, c[m]);
    t.emplace_back(nm + np, nm + m, c[m]);
  }
  SpMatR K(nm + np + 1, nm + np + 1);
  K.setFromTriplets(t.begin(), t.end());
  K.makeCompressed();
  Eigen::SparseLU<SpMatR, Eigen::COLAMDOrdering<int>> lu(K);
  if (lu.info() != Eigen::Success) throw SolverBreakdown("meridional system factorization failed", {});
  VecR rhs = VecR::Zero(K.rows());
  rhs.head(nm) = Sm.transpose() * bu;
  rhs.segment(nm, np) = bp;
  VecR x = lu.solve(rhs);
  for (int step = 0; step < 2; ++step) x += lu.solve(VecR(rhs - K * x));

  LDLTR swirl_solver(As);
  if (swirl_solver.info() != Eigen::Success) throw SolverBreakdown("swirl block is not positive definite", {});
  const VecR bs = Ss.transpose() * bu;
  VecR us = swirl_solver.solve(bs);
  for (int step = 0; step < 2; ++step) us += swirl_solver.solve(VecR(bs - As * us));

  const VecR u_real = Sm * x.head(nm) + Ss * us;
  SolveResult out;
  const VecC u = u_real.cast<cplx>();
  const VecC p = x.segment(nm, np).cast<cplx>();
  fill_residuals(s, u, p, x[nm + np], out.report);
  out.report.iterations = 1;
  out.report.history.push_back({1, out.report.res_u, out.report.res_p});
  out.field = s.expand(u, p);
  return out;
}

void write_residual_history(const std::vector<ResidualEntry>& history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iter,res_u,res_p\n" << std::setprecision(10);
  for (const auto& h : history) out << h.iter << ',' << h.res_u << ',' << h.res_p << '\n';
}

InfSupEstimate estimate_inf_sup(const SaddleSystem& s, const SolverConfig& cfg, double tol) {
  cfg.validate();
  LDLT a_inv(s.A);
  if (a_inv.info() != Eigen::Success) throw SolverBreakdown("velocity block is not positive definite", {});
  LDLTR m_inv(s.pressure_mass);
  if (m_inv.info() != Eigen::Success) throw SolverBreakdown("pressure mass matrix factorization failed", {});
  const SpMat M = s.pressure_mass.cast<cplx>();
  const Eigen::Index np = s.B.rows();

  auto m_solve = [&](const VecC& r) {
    VecC z(r.size());
    z.real() = m_inv.solve(VecR(r.real()));
    z.imag() = m_inv.solve(VecR(r.imag()));
    return z;
  };
  std::optional<VecC> constant;
  double constant_mass = 0.0;
  if (s.k == 0) {
    constant = VecC::Ones(np);
    constant_mass = (M * *constant).real().sum();
  }
  auto deflate = [&](VecC& v) {
    if (!constant) return;
    const cplx coef = (M * v).sum() / constant_mass;
    v -= coef * *constant;
  };
  auto m_dot = [&](const VecC& a, const VecC& b) { return a.dot(M * b); };

  std::mt19937 gen(1234567);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  VecC q(np);
  for (Eigen::Index i = 0; i < np; ++i) q[i] = cplx(unif(gen), unif(gen));
  deflate(q);
  q /= std::sqrt(m_dot(q, q).real());

  const Eigen::Index dim = np - (constant ? 1 : 0);
  const Eigen::Index max_steps = std::min<Eigen::Index>(dim, std::max(cfg.max_iter, 50));
  std::vector<VecC> basis;
  std::vector<double> alpha, beta;
  double theta = 0.0;
  int steps = 0;
  bool converged = false;
  while (steps < max_steps) {
    basis.push_back(q);
    const VecC w = s.B * a_inv.solve(s.B.adjoint() * q);  // S q
    VecC z = m_solve(w);
    const double a = q.dot(w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& v : basis) z -= m_dot(v, z) * v;
      deflate(z);
    }
    const double b = std::sqrt(std::max(m_dot(z, z).real(), 0.0));
    ++steps;

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
    theta = eig.eigenvalues()[0];
    const double ritz_residual = b * std::abs(eig.eigenvectors()(m - 1, 0));
    if ((steps >= 3 && ritz_residual <= tol * std::abs(theta)) || b <= 1e-14 * std::abs(a) || steps == dim) {
      converged = true;
      break;
    }
    beta.push_back(b);
    q = z / b;
  }
  if (!converged) throw SolverBreakdown("inf-sup Lanczos iteration stagnated", {});
  InfSupEstimate est;
  est.beta_h = std::sqrt(std::max(theta, 0.0));
  est.mesh_h = s.space && s.space->mesh ? s.space->mesh->max_edge_length() : 0.0;
  est.k = s.k;
  est.iterations = steps;
  return est;
}

double dual_mode_norm(const SaddleSystem& system, const VecC& f_free) {
  if (f_free.size() != system.A.rows()) throw std::invalid_argument("functional has the wrong length");
  if (f_free.norm() == 0.0) return 0.0;
  LDLT a_inv(system.A);
  if (a_inv.info() != Eigen::Success)
    throw SolverBreakdown("velocity block is singular (boundary constraints missing?)", {});
  const VecC w = a_inv.solve(f_free);
  return std::sqrt(std::max(f_free.dot(w).real(), 0.0));
}

}  // namespace axistokes
