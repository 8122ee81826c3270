#include "axistokes/mode_system.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "axistokes/basis.hpp"

namespace axistokes {

namespace {

const cplx kI{0.0, 1.0};

using Triplets = std::vector<Eigen::Triplet<cplx>>;

// Barycentric coordinates of (r, z) in triangle g; inside when all are >= -tol.
std::array<double, 3> barycentric(const TriangleGeometry& g, double r, double z) {
  std::array<double, 3> l;
  for (int i = 0; i < 3; ++i) {
    const RZ& a = g.x[(i + 1) % 3];
    l[i] = g.grad_lambda[i][0] * (r - a.r) + g.grad_lambda[i][1] * (z - a.z);
  }
  return l;
}

}  // namespace

std::size_t FemSpace::count(DofKind which) const {
  std::size_t n = 0;
  for (auto k_ : kind) n += (k_ == which);
  return n;
}

FemSpace build_space(const MeridianMesh& mesh, int k) {
  FemSpace s;
  s.mesh = &mesh;
  s.k = k;
  s.n_nodes = num_p2_nodes(mesh);
  s.n_pressure = mesh.num_vertices();
  s.on_gamma.assign(s.n_nodes, false);
  s.on_axis.assign(s.n_nodes, false);
  const std::size_t nv = mesh.num_vertices();
  for (std::size_t e = 0; e < mesh.edges().size(); ++e) {
    if (!mesh.edge_on_boundary(e)) continue;
    auto& flag = mesh.edge_tag(e) == BoundaryTag::Gamma ? s.on_gamma : s.on_axis;
    flag[mesh.edges()[e][0]] = flag[mesh.edges()[e][1]] = flag[nv + e] = true;
  }

  s.kind.assign(s.n_full(), DofKind::Free);
  const int ak = std::abs(k);
  for (std::size_t n = 0; n < s.n_nodes; ++n) {
    if (s.on_gamma[n]) {
      for (int c = 0; c < 3; ++c) s.kind[vdof(n, c)] = DofKind::Dirichlet;
    } else if (s.on_axis[n]) {
      if (ak == 0) {
        s.kind[vdof(n, 0)] = s.kind[vdof(n, 1)] = DofKind::AxisZero;
      } else if (ak == 1) {
        s.kind[vdof(n, 2)] = DofKind::AxisZero;
        s.kind[vdof(n, 0)] = DofKind::AxisCoupled;
        // u_r + i k u_theta = 0
        s.couplings.push_back({vdof(n, 0), vdof(n, 1), -kI * double(k)});
      } else {
        for (int c = 0; c < 3; ++c) s.kind[vdof(n, c)] = DofKind::AxisZero;
      }
    }
  }

  s.free_index.assign(s.n_full(), -1);
  for (std::size_t d = 0; d < s.n_full(); ++d)
    if (s.kind[d] == DofKind::Free) {
      s.free_index[d] = static_cast<long>(s.free_dofs.size());
      s.free_dofs.push_back(d);
    }

  Triplets t;
  t.reserve(s.n_free() + s.couplings.size());
  for (std::size_t f = 0; f < s.n_free(); ++f) t.emplace_back(s.free_dofs[f], f, 1.0);
  for (const auto& c : s.couplings) t.emplace_back(c.dependent, s.free_index[c.master], c.factor);
  s.prolongation.resize(static_cast<Eigen::Index>(s.n_full()), static_cast<Eigen::Index>(s.n_free()));
  s.prolongation.setFromTriplets(t.begin(), t.end());
  return s;
}

VectorModeFn ModeField::velocity_fn(const MeridianMesh& mesh) const {
  VectorModeFn v;
  v.k = k;
  const VecC* coeff = &u;
  for (int c = 0; c < 3; ++c) {
    v.c[c] = ScalarModeFn::on_mesh([&mesh, coeff, c](std::size_t t, const std::array<double, 3>& l, double, double) {
      const TriangleGeometry g(mesh, t);
      const P2Eval e = eval_p2(g, l);
      ModeSample s;
      for (int i = 0; i < 6; ++i) {
        const cplx a = (*coeff)[static_cast<Eigen::Index>(vdof(p2_node(mesh, t, i), c))];
        s.value += a * e.phi[i];
        s.d_r += a * e.d_r[i];
        s.d_z += a * e.d_z[i];
      }
      return s;
    });
  }
  return v;
}

ScalarModeFn ModeField::pressure_fn(const MeridianMesh& mesh) const {
  const VecC* coeff = &p;
  return ScalarModeFn::on_mesh([&mesh, coeff](std::size_t t, const std::array<double, 3>& l, double, double) {
    const TriangleGeometry g(mesh, t);
    const auto& tri = mesh.triangles()[t];
    ModeSample s;
    for (int i = 0; i < 3; ++i) {
      const cplx a = (*coeff)[static_cast<Eigen::Index>(tri[i])];
      s.value += a * l[i];
      s.d_r += a * g.grad_lambda[i][0];
      s.d_z += a * g.grad_lambda[i][1];
    }
    return s;
  });
}

bool ModeField::evaluate(const MeridianMesh& mesh, double r, double z, std::array<cplx, 3>& u_out,
                         cplx& p_out) const {
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry g(mesh, t);
    const auto l = barycentric(g, r, z);
    if (l[0] < -1e-12 || l[1] < -1e-12 || l[2] < -1e-12) continue;
    const P2Eval e = eval_p2(g, l);
    u_out = {};
    for (int i = 0; i < 6; ++i) {
      const std::size_t n = p2_node(mesh, t, i);
      for (int c = 0; c < 3; ++c) u_out[c] += u[static_cast<Eigen::Index>(vdof(n, c))] * e.phi[i];
    }
    p_out = 0.0;
    for (int i = 0; i < 3; ++i) p_out += p[static_cast<Eigen::Index>(mesh.triangles()[t][i])] * l[i];
    return true;
  }
  return false;
}

void SaddleSystem::update_rhs() {
  const SpMat& P = space->prolongation;
  rhs_u = P.adjoint() * (load_full - A_full * lift);
  rhs_p = -(B_full * lift);
}

ModeField SaddleSystem::expand(const VecC& u_free, const VecC& p) const {
  ModeField f;
  f.k = k;
  f.u = space->prolongation * u_free + lift;
  f.p = p;
  return f;
}

VecC SaddleSystem::restrict(const VecC& full) const { return space->prolongation.adjoint() * full; }

SpMat SaddleSystem::bordered() const {
  const Eigen::Index nu = A.rows(), np = B.rows();
  const Eigen::Index extra = mean_constraint ? 1 : 0;
  Triplets t;
  t.reserve(static_cast<std::size_t>(A.nonZeros() + 2 * B.nonZeros() + 2 * np));
  for (Eigen::Index j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index j = 0; j < B.outerSize(); ++j)
    for (SpMat::InnerIterator it(B, j); it; ++it) {
      t.emplace_back(nu + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), nu + it.row(), std::conj(it.value()));
    }
  if (mean_constraint)
    for (Eigen::Index m = 0; m < np; ++m) {
      const double c = (*mean_constraint)[m];
      t.emplace_back(nu + m, nu + np, c);
      t.emplace_back(nu + np, nu + m, c);
    }
  SpMat K(nu + np + extra, nu + np + extra);
  K.setFromTriplets(t.begin(), t.end());
  return K;
}

SaddleSystem assemble(std::shared_ptr<const FemSpace> space, const MeridianMesh& mesh, int k,
                      const QuadratureRule& rule) {
  if (!space || space->k != k) throw std::invalid_argument("space was built for a different wavenumber");
  if (space->mesh != &mesh) throw std::invalid_argument("space was built on a different mesh");
  if (rule.degree < 5) throw std::invalid_argument("assembly needs a quadrature rule of degree >= 5");

  const double kk = double(k) * double(k);
  // M[c][d]: coefficient of phi_j phi_i / r for test component c, trial component d.
  cplx M[3][3] = {};
  M[0][0] = M[1][1] = 1.0 + kk;
  M[2][2] = kk;
  M[0][1] = 2.0 * kI * double(k);
  M[1][0] = -2.0 * kI * double(k);

  Triplets ta, tb;
  std::vector<Eigen::Triplet<double>> tm;
  const std::size_t nt = mesh.num_triangles();
  ta.reserve(nt * 18 * 18 / 2);
  tb.reserve(nt * 3 * 18);
  tm.reserve(nt * 9);
  VecR mean = VecR::Zero(static_cast<Eigen::Index>(space->n_pressure));

  for (std::size_t t = 0; t < nt; ++t) {
    const TriangleGeometry g(mesh, t);
    Eigen::Matrix<cplx, 18, 18> E = Eigen::Matrix<cplx, 18, 18>::Zero();
    Eigen::Matrix<cplx, 3, 18> Be = Eigen::Matrix<cplx, 3, 18>::Zero();
    Eigen::Matrix3d Me = Eigen::Matrix3d::Zero();
    Eigen::Vector3d ce = Eigen::Vector3d::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const RZ x = g.map(l);
      const double w = rule.weights[q] * g.area;
      const P2Eval e = eval_p2(g, l);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          const double grad = (e.d_r[i] * e.d_r[j] + e.d_z[i] * e.d_z[j]) * x.r * w;
          const double mass = e.phi[i] * e.phi[j] / x.r * w;
          for (int c = 0; c < 3; ++c)
            for (int d = 0; d < 3; ++d) {
              cplx v = M[c][d] * mass;
              if (c == d) v += grad;
              if (v != cplx{}) E(3 * i + c, 3 * j + d) += v;
            }
        }
      for (int m = 0; m < 3; ++m) {
        const double psi = l[m];
        for (int j = 0; j < 6; ++j) {
          Be(m, 3 * j + 0) -= (e.phi[j] + x.r * e.d_r[j]) * psi * w;
          Be(m, 3 * j + 1) -= kI * double(k) * e.phi[j] * psi * w;
          Be(m, 3 * j + 2) -= x.r * e.d_z[j] * psi * w;
        }
        for (int n = 0; n < 3; ++n) Me(m, n) += psi * l[n] * x.r * w;
        ce(m) += psi * x.r * w;
      }
    }
    E = 0.5 * (E + E.adjoint()).eval();

    std::array<std::size_t, 6> nodes;
    for (int i = 0; i < 6; ++i) nodes[i] = p2_node(mesh, t, i);
    const auto& tri = mesh.triangles()[t];
    for (int a = 0; a < 18; ++a)
      for (int b = 0; b < 18; ++b)
        if (E(a, b) != cplx{}) ta.emplace_back(vdof(nodes[a / 3], a % 3), vdof(nodes[b / 3], b % 3), E(a, b));
    for (int m = 0; m < 3; ++m) {
      for (int b = 0; b < 18; ++b)
        if (Be(m, b) != cplx{}) tb.emplace_back(tri[m], vdof(nodes[b / 3], b % 3), Be(m, b));
      for (int n = 0; n < 3; ++n) tm.emplace_back(tri[m], tri[n], Me(m, n));
      mean[static_cast<Eigen::Index>(tri[m])] += ce(m);
    }
  }

  const auto nf = static_cast<Eigen::Index>(space->n_full());
  const auto np = static_cast<Eigen::Index>(space->n_pressure);
  SaddleSystem s;
  s.k = k;
  s.space = space;
  s.A_full.resize(nf, nf);
  s.A_full.setFromTriplets(ta.begin(), ta.end());
  s.B_full.resize(np, nf);
  s.B_full.setFromTriplets(tb.begin(), tb.end());
  s.pressure_mass.resize(np, np);
  s.pressure_mass.setFromTriplets(tm.begin(), tm.end());
  const SpMat& P = space->prolongation;
  s.A = SpMat(P.adjoint() * s.A_full * P);
  s.A = 0.5 * (s.A + SpMat(s.A.adjoint()));
  s.B = s.B_full * P;
  s.A.prune(cplx{});
  s.B.prune(cplx{});
  if (k == 0) s.mean_constraint = mean;
  s.load_full = VecC::Zero(nf);
  s.lift = VecC::Zero(nf);
  s.update_rhs();
  return s;
}

VecC assemble_rhs(const FemSpace& space, const VectorModeFn& f, const QuadratureRule& rule) {
  const MeridianMesh& mesh = *space.mesh;
  VecC b = VecC::Zero(static_cast<Eigen::Index>(space.n_full()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry g(mesh, t);
    std::array<std::array<cplx, 3>, 6> local{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const RZ x = g.map(l);
      const double w = rule.weights[q] * g.area * x.r;
      const P2Eval e = eval_p2(g, l);
      for (int c = 0; c < 3; ++c) {
        const cplx fc = f.c[c].sample(t, l, x.r, x.z, false).value;
        if (fc == cplx{}) continue;
        for (int i = 0; i < 6; ++i) local[i][c] += fc * e.phi[i] * w;
      }
    }
    for (int i = 0; i < 6; ++i)
      for (int c = 0; c < 3; ++c) b[static_cast<Eigen::Index>(vdof(p2_node(mesh, t, i), c))] += local[i][c];
  }
  return b;
}

void set_load(SaddleSystem& system, const VecC& load_full) {
  if (load_full.size() != system.A_full.rows()) throw std::invalid_argument("load vector has the wrong length");
  system.load_full = load_full;
  system.update_rhs();
}

cplx boundary_flux(const MeridianMesh& mesh, const VectorModeFn& g, int gauss_points) {
  const LineRule line = gauss_legendre_unit(gauss_points);
  cplx flux{};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      const std::size_t e = mesh.triangle_edges(t)[i];
      if (!mesh.edge_on_boundary(e) || mesh.edge_tag(e) != BoundaryTag::Gamma) continue;
      const RZ a = mesh.vertices()[tri[(i + 1) % 3]];
      const RZ b = mesh.vertices()[tri[(i + 2) % 3]];
      // Triangle is counter-clockwise, so a -> b runs with the interior on the left.
      const double len = std::hypot(b.r - a.r, b.z - a.z);
      const double nr = (b.z - a.z) / len, nz = -(b.r - a.r) / len;
      for (std::size_t q = 0; q < line.points.size(); ++q) {
        const double s = line.points[q];
        const double r = a.r + s * (b.r - a.r), z = a.z + s * (b.z - a.z);
        flux += line.weights[q] * len * r * (g.c[0](r, z) * nr + g.c[2](r, z) * nz);
      }
    }
  }
  return flux;
}

DirichletReport set_dirichlet(SaddleSystem& system, const VectorModeFn& g, double tolerance) {
  const FemSpace& space = *system.space;
  const MeridianMesh& mesh = *space.mesh;
  if (g.k != system.k) throw std::invalid_argument("Dirichlet data has a different wavenumber");
  DirichletReport rep;
  VecC lift = VecC::Zero(static_cast<Eigen::Index>(space.n_full()));
  const int ak = std::abs(system.k);
  for (std::size_t n = 0; n < space.n_nodes; ++n) {
    if (!space.on_gamma[n]) continue;
    const RZ x = p2_node_position(mesh, n);
    std::array<cplx, 3> v;
    for (int c = 0; c < 3; ++c) v[c] = g.c[c](x.r, x.z);
    for (int c = 0; c < 3; ++c) lift[static_cast<Eigen::Index>(vdof(n, c))] = v[c];
    if (!space.on_axis[n]) continue;
    double violation = 0.0;
    if (ak == 0)
      violation = std::max(std::abs(v[0]), std::abs(v[1]));
    else if (ak == 1)
      violation = std::max(std::abs(v[2]), std::abs(v[0] + kI * double(system.k) * v[1]));
    else
      violation = std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
    if (violation > tolerance) {
      std::ostringstream os;
      os << "corner node " << n << " at (" << x.r << ", " << x.z << "): Dirichlet data violates the k="
         << system.k << " axis condition by " << violation << "; Dirichlet value kept";
      rep.warnings.push_back(os.str());
    }
  }
  system.lift = lift;
  system.update_rhs();
  rep.flux = boundary_flux(mesh, g);
  if (system.k == 0 && std::abs(rep.flux) > tolerance) {
    rep.flux_violation = true;
    std::ostringstream os;
    os << "boundary data carries net flux " << std::abs(rep.flux) << " at k=0 (compatibility requires zero)";
    rep.warnings.push_back(os.str());
  }
  return rep;
}

ModeField interpolate(const MeridianMesh& mesh, const VectorModeFn& u, const ScalarModeFn& p, int k) {
  ModeField f;
  f.k = k;
  const std::size_t nn = num_p2_nodes(mesh);
  f.u = VecC::Zero(static_cast<Eigen::Index>(3 * nn));
  for (std::size_t n = 0; n < nn; ++n) {
    const RZ x = p2_node_position(mesh, n);
    for (int c = 0; c < 3; ++c) f.u[static_cast<Eigen::Index>(vdof(n, c))] = u.c[c](x.r, x.z);
  }
  f.p = VecC::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    f.p[static_cast<Eigen::Index>(v)] = p(mesh.vertices()[v].r, mesh.vertices()[v].z);
  return f;
}

std::string format_coo(const SpMat& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "axistokes-coo v1 " << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (Eigen::Index j = 0; j < m.outerSize(); ++j)
    for (SpMat::InnerIterator it(m, j); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
  return os.str();
}

void export_coo(const SpMat& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_coo(m);
}

}  // namespace axistokes
