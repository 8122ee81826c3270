#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <random>

#include "axistokes/basis.hpp"
#include "axistokes/mode_system.hpp"
#include "axistokes/norms.hpp"

using namespace axistokes;

namespace {

const cplx I{0.0, 1.0};

struct Setup {
  MeridianMesh mesh;
  std::shared_ptr<FemSpace> space;
  SaddleSystem sys;
};

std::unique_ptr<Setup> make(double h, int k, DomainSpec spec = DomainSpec::rectangle(0, 1, 0, 1, 0.5)) {
  auto s = std::make_unique<Setup>();
  spec.target_h = h;
  s->mesh = generate_structured(spec);
  s->space = std::make_shared<FemSpace>(build_space(s->mesh, k));
  s->sys = assemble(s->space, s->mesh, k);
  return s;
}

VecC random_vec(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  VecC v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(d(gen), d(gen));
  return v;
}

double max_abs(const SpMat& m) {
  double a = 0.0;
  for (Eigen::Index j = 0; j < m.outerSize(); ++j)
    for (SpMat::InnerIterator it(m, j); it; ++it) a = std::max(a, std::abs(it.value()));
  return a;
}

VectorModeFn constant_field(cplx a, cplx b, cplx c, int k) {
  auto cst = [](cplx v) {
    return ScalarModeFn::closed_form([v](double, double) { return v; }, [](double, double) { return cplx{}; },
                                     [](double, double) { return cplx{}; });
  };
  return {{cst(a), cst(b), cst(c)}, k};
}

}  // namespace

TEST_CASE("axis constraint counts per wavenumber") {
  const auto mesh = generate_structured(DomainSpec::rectangle(0, 1, 0, 1, 0.5));
  // axis P2 nodes off the corners: vertex (0, 0.5) and midpoints (0, 0.25), (0, 0.75)
  const auto s0 = build_space(mesh, 0);
  CHECK(s0.count(DofKind::AxisZero) == 6);
  CHECK(s0.count(DofKind::AxisCoupled) == 0);
  const auto s1 = build_space(mesh, 1);
  CHECK(s1.count(DofKind::AxisZero) == 3);
  CHECK(s1.count(DofKind::AxisCoupled) == 3);
  CHECK(s1.couplings.size() == 3);
  for (const auto& c : s1.couplings) {
    CHECK(c.dependent % 3 == 0);
    CHECK(c.master == c.dependent + 1);
    CHECK(c.factor == -I);
  }
  const auto sm1 = build_space(mesh, -1);
  CHECK(sm1.couplings[0].factor == I);
  const auto s5 = build_space(mesh, 5);
  CHECK(s5.count(DofKind::AxisZero) == 9);
  // Gamma P2 nodes: 8 boundary vertices + 8 midpoints minus the 3 off-corner axis nodes
  CHECK(s0.count(DofKind::Dirichlet) == 3 * (25 - 9 - 3));
  CHECK(s0.n_free() + s0.count(DofKind::Dirichlet) + s0.count(DofKind::AxisZero) == s0.n_full());
}

TEST_CASE("assembled blocks are Hermitian and sized consistently") {
  for (int k : {0, 1, -1, 2, 5}) {
    const auto s = make(0.25, k);
    const auto& sys = s->sys;
    CHECK(sys.A.rows() == static_cast<Eigen::Index>(s->space->n_free()));
    CHECK(sys.B.rows() == static_cast<Eigen::Index>(s->mesh.num_vertices()));
    CHECK(max_abs(SpMat(sys.A - SpMat(sys.A.adjoint()))) <= 1e-13 * max_abs(sys.A));
    const SpMat K = sys.bordered();
    CHECK(max_abs(SpMat(K - SpMat(K.adjoint()))) <= 1e-13 * max_abs(K));
    CHECK(sys.mean_constraint.has_value() == (k == 0));
  }
}

TEST_CASE("mean constraint entries integrate the P1 basis") {
  const auto s = make(0.25, 0);
  CHECK(s->sys.mean_constraint->sum() == doctest::Approx(0.5).epsilon(1e-14));
  const VecR ones = VecR::Ones(s->sys.pressure_mass.rows());
  CHECK((s->sys.pressure_mass * ones - *s->sys.mean_constraint).norm() <= 1e-14);
}

TEST_CASE("conjugation symmetry of the assembled system") {
  for (int k : {1, 2, 4}) {
    const auto plus = make(0.25, k);
    const auto minus = make(0.25, -k);
    CHECK(max_abs(SpMat(minus->sys.A - SpMat(plus->sys.A.conjugate()))) <= 1e-14 * max_abs(plus->sys.A));
    CHECK(max_abs(SpMat(minus->sys.B - SpMat(plus->sys.B.conjugate()))) <= 1e-14 * max_abs(plus->sys.B));
  }
}

TEST_CASE("A is the Gram matrix of the mode energy form") {
  for (int k : {0, 1, -1, 2, 3, 7}) {
    const auto s = make(0.25, k);
    const auto& sys = s->sys;
    const VecC x = random_vec(sys.A.rows(), 7 + static_cast<unsigned>(k + 10));
    ModeField field = sys.expand(x, VecC::Zero(sys.B.rows()));
    const auto rep = vector_mode_norm(s->mesh, field.velocity_fn(s->mesh), rule_degree5());
    const double form = x.dot(sys.A * x).real();
    CHECK(std::abs(form - rep.h1k_semi_sq) <= 1e-12 * form);
    CHECK(std::abs(x.dot(sys.A * x).imag()) <= 1e-13 * form);
  }
}

TEST_CASE("A restricted to the axial component is the r-weighted Laplacian at k = 0") {
  const auto s = make(0.25, 0);
  const auto& sp = *s->space;
  VecC x = VecC::Zero(sp.n_free());
  std::mt19937 gen(2);
  std::normal_distribution<double> d;
  for (std::size_t f = 0; f < sp.n_free(); ++f)
    if (sp.free_dofs[f] % 3 == 2) x[static_cast<Eigen::Index>(f)] = d(gen);
  const ModeField field = s->sys.expand(x, VecC::Zero(s->sys.B.rows()));
  const auto rep = scalar_mode_norm(s->mesh, field.velocity_fn(s->mesh).c[2], 0, rule_degree5());
  CHECK(x.dot(s->sys.A * x).real() == doctest::Approx(rep.h1_1_semi_sq).epsilon(1e-12));
}

TEST_CASE("coercivity: velocity block has a positive spectrum") {
  for (int k : {0, 1, -1, 2, -2, 5, 10}) {
    const auto s = make(0.25, k);
    const Eigen::MatrixXcd A = Eigen::MatrixXcd(s->sys.A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("divergence form: constant pressure sees zero flux at k = 0") {
  const auto s = make(0.25, 0);
  const VecC x = random_vec(s->sys.A.rows(), 3);
  const cplx total = (s->sys.B * x).sum();
  CHECK(std::abs(total) <= 1e-13 * x.norm());
}

TEST_CASE("B row sums match direct quadrature of the mode divergence") {
  for (int k : {0, 2}) {
    const auto s = make(0.25, k);
    const VecC u = random_vec(static_cast<Eigen::Index>(s->space->n_full()), 5);
    ModeField field{k, u, VecC::Zero(s->sys.B.rows())};
    const auto v = field.velocity_fn(s->mesh);
    cplx direct{};
    const auto& rule = rule_degree5();
    for (std::size_t t = 0; t < s->mesh.num_triangles(); ++t) {
      const TriangleGeometry g(s->mesh, t);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const RZ x = g.map(rule.points[q]);
        const auto sr = v.c[0].sample(t, rule.points[q], x.r, x.z);
        const auto st = v.c[1].sample(t, rule.points[q], x.r, x.z);
        const auto sz = v.c[2].sample(t, rule.points[q], x.r, x.z);
        const cplx div = sr.d_r + sr.value / x.r + I * double(k) / x.r * st.value + sz.d_z;
        direct -= rule.weights[q] * g.area * div * x.r;
      }
    }
    CHECK(std::abs((s->sys.B_full * u).sum() - direct) <= 1e-12 * std::abs(direct));
  }
}

TEST_CASE("assemble_rhs examples") {
  const auto s = make(0.25, 0);
  const auto& sp = *s->space;
  const VecC zero = assemble_rhs(sp, VectorModeFn::zero(0));
  CHECK(zero.norm() == 0.0);
  const VecC b = assemble_rhs(sp, constant_field(1.0, 0.0, 0.0, 0));
  cplx sum{};
  for (std::size_t n = 0; n < sp.n_nodes; ++n) sum += b[static_cast<Eigen::Index>(vdof(n, 0))];
  CHECK(sum.real() == doctest::Approx(0.5).epsilon(1e-14));
  const VecC bt = assemble_rhs(sp, constant_field(0.0, 2.0, 0.0, 0));
  for (std::size_t n = 0; n < sp.n_nodes; ++n) {
    CHECK(bt[static_cast<Eigen::Index>(vdof(n, 0))] == cplx{});
    CHECK(bt[static_cast<Eigen::Index>(vdof(n, 2))] == cplx{});
  }
  CHECK(bt.norm() > 0.0);
}

TEST_CASE("set_dirichlet with zero data leaves the system unchanged") {
  auto s = make(0.25, 0);
  set_load(s->sys, assemble_rhs(*s->space, constant_field(1.0, 0.5, -1.0, 0)));
  const VecC ru = s->sys.rhs_u, rp = s->sys.rhs_p;
  const auto rep = set_dirichlet(s->sys, VectorModeFn::zero(0));
  CHECK(rep.warnings.empty());
  CHECK((s->sys.rhs_u - ru).norm() == 0.0);
  CHECK((s->sys.rhs_p - rp).norm() == 0.0);
}

TEST_CASE("boundary flux and corner warnings") {
  auto s = make(0.25, 0);
  const auto radial = set_dirichlet(s->sys, constant_field(1.0, 0.0, 0.0, 0));
  CHECK(std::abs(radial.flux - 1.0) <= 1e-14);
  CHECK(radial.flux_violation);
  CHECK(radial.warnings.size() == 3);  // two corners plus the flux

  const auto axial = set_dirichlet(s->sys, constant_field(0.0, 0.0, 1.0, 0));
  CHECK(std::abs(axial.flux) <= 1e-14);
  CHECK_FALSE(axial.flux_violation);
  CHECK(axial.warnings.empty());

  auto zero = [](double, double) { return cplx{}; };
  const VectorModeFn lid{{ScalarModeFn::closed_form(zero), ScalarModeFn::closed_form(zero),
                          ScalarModeFn::closed_form([](double, double z) { return cplx(z); })},
                         0};
  const auto lid_rep = set_dirichlet(s->sys, lid);
  CHECK(std::abs(lid_rep.flux - 0.5) <= 1e-14);
  CHECK(lid_rep.flux_violation);
}

TEST_CASE("flux on a domain away from the axis") {
  const auto mesh = generate_structured(DomainSpec::rectangle(1, 2, 0, 1, 0.5));
  // radial field 1/r has zero divergence: outflow at r = 2 equals inflow at r = 1
  auto inv = [](double r, double) { return cplx(1.0 / r); };
  auto zero = [](double, double) { return cplx{}; };
  const VectorModeFn g{{ScalarModeFn::closed_form(inv), ScalarModeFn::closed_form(zero),
                        ScalarModeFn::closed_form(zero)},
                       0};
  CHECK(std::abs(boundary_flux(mesh, g)) <= 1e-14);
}

TEST_CASE("lifting interpolates the data on Gamma only") {
  auto s = make(0.5, 3);
  auto lin = [](double r, double z) { return cplx(r + 2 * z, r); };
  const VectorModeFn g{{ScalarModeFn::closed_form(lin), ScalarModeFn::closed_form(lin),
                        ScalarModeFn::closed_form(lin)},
                       3};
  const auto rep = set_dirichlet(s->sys, g);
  CHECK(rep.warnings.size() == 1);  // data vanishes at (0, 0) but not at (0, 1)
  for (std::size_t n = 0; n < s->space->n_nodes; ++n) {
    const RZ x = p2_node_position(s->mesh, n);
    const cplx expect = s->space->on_gamma[n] ? lin(x.r, x.z) : cplx{};
    CHECK(s->sys.lift[static_cast<Eigen::Index>(vdof(n, 1))] == expect);
  }
}

TEST_CASE("inconsistent wavenumbers are rejected") {
  const auto mesh = generate_structured(DomainSpec::rectangle(0, 1, 0, 1, 0.5));
  auto space = std::make_shared<FemSpace>(build_space(mesh, 2));
  CHECK_THROWS_AS(assemble(space, mesh, 3), std::invalid_argument);
  auto sys = assemble(space, mesh, 2);
  CHECK_THROWS_AS(set_dirichlet(sys, VectorModeFn::zero(1)), std::invalid_argument);
}

TEST_CASE("zero load gives zero right-hand sides") {
  const auto s = make(0.5, 2);
  CHECK(s->sys.rhs_u.norm() == 0.0);
  CHECK(s->sys.rhs_p.norm() == 0.0);
}

TEST_CASE("coordinate export") {
  const auto s = make(1.0, 2);
  const std::string text = format_coo(s->sys.B);
  std::istringstream in(text);
  std::string magic, version;
  long rows = 0, cols = 0, nnz = 0;
  in >> magic >> version >> rows >> cols >> nnz;
  CHECK(magic == "axistokes-coo");
  CHECK(version == "v1");
  CHECK(rows == s->sys.B.rows());
  CHECK(cols == s->sys.B.cols());
  CHECK(nnz == s->sys.B.nonZeros());
  long lines = 0;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) ++lines;
  CHECK(lines == nnz);
  const auto path = std::filesystem::temp_directory_path() / "axistokes_test.coo";
  export_coo(s->sys.B, path);
  CHECK(std::filesystem::file_size(path) == text.size());
  std::filesystem::remove(path);
}
