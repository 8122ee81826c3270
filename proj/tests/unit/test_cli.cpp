#include <doctest.h>

#include <cmath>

#include "axistokes/config.hpp"
#include "axistokes/driver.hpp"
#include "axistokes/vtk.hpp"

using namespace axistokes;

namespace {

const std::string square = "[domain]\npolygon = 0 0, 1 0, 1 1, 0 1\nh = 0.25\n";

double max_abs(const VecC& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("full file") {
    const RunConfig c = parse_config(square +
                                     "[modes]\nN = 3\nn_theta = 32\n"
                                     "[data]\nf_z = r*cos(theta)\n"
                                     "[solver]\nmethod = uzawa_cg\nrel_tol = 1e-9\n"
                                     "[output]\nformats = stack vtk\n"
                                     "[truncation]\ns = 2\nN = 2 4 8\n");
    CHECK(c.domain);
    CHECK(c.N == 3);
    CHECK(c.n_theta == 32);
    CHECK(c.expressions);
    CHECK_FALSE(c.manufactured);
    CHECK(c.solver.method == SolverConfig::Method::UzawaCG);
    CHECK(c.formats.size() == 2);
    CHECK(c.family.s == 2.0);
    CHECK(c.truncation_N == std::vector<int>{2, 4, 8});
    CHECK(c.expressions->forcing[2].eval(2.0, 0.0, 0.0) == doctest::Approx(2.0));
  }
  SUBCASE("empty file is valid without data") {
    const RunConfig c = parse_config("");
    CHECK_FALSE(c.has_data());
    CHECK_THROWS_AS(c.require_data(), ConfigError);
    CHECK_THROWS_AS(c.build_mesh(), ConfigError);
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(parse_config("[modes]\nN = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[modes]\nM = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[extra]\na = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[data]\ncase = exact_k0\nf_r = r\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[data]\nf_r = r +\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[data]\ncase = nope\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nmethod = gmres\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[modes]\nN = two\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[domain]\npolygon = 0 0, 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[output]\nformats = png\n"), ConfigError);
  }
}

TEST_CASE("axisymmetric manufactured case is one real solve") {
  const RunConfig c = parse_config(square + "[data]\ncase = exact_k0\n");
  const MeridianMesh mesh = c.build_mesh();
  const SolveSummary s = run_solve(c, mesh);
  REQUIRE(s.modes.size() == 1);
  CHECK(s.modes[0].solved);
  CHECK(s.stack.real_data);
  REQUIRE(s.flux);
  CHECK(std::abs(*s.flux) <= 1e-10);
  CHECK(*s.err_u <= 1e-9);
  // cylindrical components do not depend on theta
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Reconstruction a = reconstruct_at_vertex(s.stack, v, 0.0);
    for (double th : {0.7, 2.0, -1.1}) {
      const Reconstruction b = reconstruct_at_vertex(s.stack, v, th);
      const Vec3 cyl = mat_vec(rotation(-th), b.u);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(cyl[i] - a.u[i]) <= 1e-13);
      CHECK(std::abs(b.p - a.p) <= 1e-13);
    }
  }
}

TEST_CASE("real data solves non-negative modes and mirrors the rest") {
  const RunConfig c = parse_config(square + "[modes]\nN = 3\n[data]\nf_r = z*cos(theta)\nf_z = r*sin(2*theta)\n");
  const SolveSummary s = run_solve(c, c.build_mesh());
  CHECK(s.stack.modes.size() == 7);
  int solved = 0, mirrored = 0;
  for (const auto& m : s.modes) {
    if (m.solved) {
      CHECK(m.k >= 0);
      ++solved;
    }
    if (m.mirrored) {
      CHECK(m.k < 0);
      ++mirrored;
    }
  }
  CHECK(solved == 4);
  CHECK(mirrored == 3);
  CHECK(s.stack.conjugate_symmetry_defect() == 0.0);
}

TEST_CASE("cos theta data excites exactly the modes +-1") {
  const RunConfig c = parse_config(square + "[modes]\nN = 3\n[data]\nf_z = r*cos(theta)\n");
  const SolveSummary s = run_solve(c, c.build_mesh());
  double peak = 0.0;
  for (const auto& m : s.modes) peak = std::max(peak, m.velocity_norm);
  REQUIRE(peak > 0.0);
  for (const auto& m : s.modes) {
    if (std::abs(m.k) == 1)
      CHECK(m.velocity_norm > 0.1 * peak);
    else
      CHECK(m.velocity_norm <= 1e-12 * peak);
  }
}

TEST_CASE("worker count does not change the result") {
  const RunConfig c = parse_config(square + "[modes]\nN = 2\n[data]\nf_r = z*cos(theta)\nf_theta = r*z\n");
  const MeridianMesh mesh = c.build_mesh();
  const SolveSummary a = run_solve(c, mesh, 1), b = run_solve(c, mesh, 3);
  for (const auto& [k, f] : a.stack.modes) {
    CHECK(f.u == b.stack.modes.at(k).u);
    CHECK(f.p == b.stack.modes.at(k).p);
  }
}

TEST_CASE("complex manufactured case fills only its own mode") {
  const RunConfig c = parse_config(square + "[modes]\nN = 1\n[data]\ncase = exact_k1\n");
  const SolveSummary s = run_solve(c, c.build_mesh());
  CHECK_FALSE(s.stack.real_data);
  CHECK(s.stack.modes.size() == 3);
  CHECK(max_abs(s.stack.modes.at(0).u) == 0.0);
  CHECK(max_abs(s.stack.modes.at(-1).u) == 0.0);
  CHECK(max_abs(s.stack.modes.at(1).u) > 0.0);
  CHECK_FALSE(s.flux);
}

TEST_CASE("VTK lattice") {
  const RunConfig c = parse_config(square + "[modes]\nN = 1\n[data]\nf_r = z*cos(theta)\nf_z = 1 + r*r\n");
  const MeridianMesh mesh = c.build_mesh();
  const SolveSummary s = run_solve(c, mesh);
  const std::size_t nv = mesh.num_vertices();

  SUBCASE("matches reconstruction at the lattice points") {
    const VtkLattice lat = sample_lattice(s.stack, mesh, 8);
    CHECK(lat.points.size() == 8 * nv);
    CHECK(lat.wedges.size() == 8 * mesh.num_triangles());
    const std::vector<double> th = angular_nodes(8);
    for (int j = 0; j < 8; ++j)
      for (std::size_t v = 0; v < nv; ++v) {
        const std::size_t i = j * nv + v;
        const Reconstruction rv = reconstruct_at_vertex(s.stack, v, th[j]);
        for (int a = 0; a < 3; ++a) CHECK(lat.velocity[i][a] == rv.u[a].real());
        CHECK(lat.pressure[i] == rv.p.real());
        const RZ& x = mesh.vertices()[v];
        const Reconstruction rd = reconstruct(s.stack, mesh, x.r, th[j], x.z);
        for (int a = 0; a < 3; ++a) CHECK(lat.velocity[i][a] == doctest::Approx(rd.u[a].real()).epsilon(1e-12));
      }
  }
  SUBCASE("axisymmetric stack gives identical slices") {
    FourierStack k0 = s.stack;
    k0.modes.erase(1);
    k0.modes.erase(-1);
    const VtkLattice lat = sample_lattice(k0, mesh, 16);
    for (int j = 1; j < 16; ++j)
      for (std::size_t v = 0; v < nv; ++v) {
        CHECK(lat.pressure[j * nv + v] == doctest::Approx(lat.pressure[v]).epsilon(1e-13));
        CHECK(lat.velocity[j * nv + v][2] == doctest::Approx(lat.velocity[v][2]).epsilon(1e-13));
      }
  }
  SUBCASE("zero stack gives zero arrays") {
    FourierStack z = s.stack;
    for (auto& [k, f] : z.modes) {
      f.u.setZero();
      f.p.setZero();
    }
    const VtkLattice lat = sample_lattice(z, mesh, 8);
    for (std::size_t i = 0; i < lat.points.size(); ++i) {
      CHECK(lat.pressure[i] == 0.0);
      for (int a = 0; a < 3; ++a) CHECK(lat.velocity[i][a] == 0.0);
    }
  }
  SUBCASE("legacy format layout") {
    const std::string text = format_vtk(sample_lattice(s.stack, mesh, 8));
    CHECK(text.rfind("# vtk DataFile Version 3.0", 0) == 0);
    CHECK(text.find("POINTS " + std::to_string(8 * nv) + " double") != std::string::npos);
    CHECK(text.find("VECTORS velocity double") != std::string::npos);
    CHECK(text.find("SCALARS pressure double 1") != std::string::npos);
  }
  SUBCASE("too few angles") { CHECK_THROWS_AS(sample_lattice(s.stack, mesh, 4), std::invalid_argument); }
}
