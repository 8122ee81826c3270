#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "axistokes/mesh.hpp"

using namespace axistokes;

namespace {

std::size_t count_tag(const MeridianMesh& m, BoundaryTag tag) {
  return static_cast<std::size_t>(std::count_if(m.boundary_edges().begin(), m.boundary_edges().end(),
                                                [tag](const BoundaryEdge& e) { return e.tag == tag; }));
}

double polygon_area(const std::vector<RZ>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const RZ& u = p[i];
    const RZ& v = p[(i + 1) % p.size()];
    a += u.r * v.z - v.r * u.z;
  }
  return std::abs(0.5 * a);
}

double axis_length(const MeridianMesh& m) {
  double len = 0.0;
  for (const auto& e : m.boundary_edges())
    if (e.tag == BoundaryTag::Gamma0)
      len += std::abs(m.vertices()[e.v[0]].z - m.vertices()[e.v[1]].z);
  return len;
}

const std::vector<RZ> kLShape = {{0, 0.5}, {1, 0.5}, {1, 0}, {3, 0}, {3, 1}, {0, 1}};

}  // namespace

TEST_CASE("structured unit square with h = 0.5") {
  const auto m = generate_structured(DomainSpec::rectangle(0, 1, 0, 1, 0.5));
  CHECK(m.num_vertices() == 9);
  CHECK(m.num_triangles() == 8);
  CHECK(count_tag(m, BoundaryTag::Gamma0) == 2);
  CHECK(count_tag(m, BoundaryTag::Gamma) == 6);
  CHECK(m.corner_nodes() == std::set<std::size_t>{0, 6});
  CHECK(m.max_edge_length() <= doctest::Approx(0.5 * std::sqrt(2.0)));
}

TEST_CASE("structured single cell") {
  const auto m = generate_structured(DomainSpec::rectangle(0, 1, 0, 1, 1.0));
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_triangles() == 2);
  CHECK(count_tag(m, BoundaryTag::Gamma0) == 1);
  CHECK(count_tag(m, BoundaryTag::Gamma) == 3);
}

TEST_CASE("structured rectangle away from the axis has no Gamma0") {
  const auto m = generate_structured(DomainSpec::rectangle(1, 2, 0, 1, 0.25));
  CHECK(count_tag(m, BoundaryTag::Gamma0) == 0);
  CHECK(m.corner_nodes().empty());
  CHECK(count_tag(m, BoundaryTag::Gamma) == 16);
}

TEST_CASE("structured generator rejects inverted rectangles") {
  CHECK_THROWS_AS(generate_structured(DomainSpec::rectangle(1, 0, 0, 1, 0.5)), MeshError);
  CHECK_THROWS_AS(generate_structured(DomainSpec::rectangle(0, 1, 1, 0, 0.5)), MeshError);
  CHECK_THROWS_AS(generate_structured(DomainSpec::rectangle(-1, 1, 0, 1, 0.5)), MeshError);
}

TEST_CASE("structured refinement level doubles resolution") {
  const auto m = generate_structured(DomainSpec::rectangle(0, 1, 0, 2, 0.5, 1));
  CHECK(m.num_triangles() == 2 * 4 * 8);
  CHECK(m.total_area() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("L-shaped half section triangulation") {
  DomainSpec spec;
  spec.polygon = kLShape;
  spec.target_h = 0.3;
  const auto m = triangulate_polygon(spec);
  CHECK(std::abs(m.total_area() - polygon_area(kLShape)) <= 1e-12 * polygon_area(kLShape));
  CHECK(m.max_edge_length() <= 0.3);
  for (const auto& e : m.boundary_edges()) {
    const RZ a = m.vertices()[e.v[0]];
    const RZ b = m.vertices()[e.v[1]];
    if (e.tag == BoundaryTag::Gamma0) {
      CHECK(a.r == 0.0);
      CHECK(b.r == 0.0);
      CHECK(std::min(a.z, b.z) >= 0.5);
      CHECK(std::max(a.z, b.z) <= 1.0);
    }
  }
  CHECK(axis_length(m) == doctest::Approx(0.5).epsilon(1e-14));
  for (auto c : m.corner_nodes()) {
    const RZ p = m.vertices()[c];
    CHECK(p.r == 0.0);
    CHECK((p.z == 0.5 || p.z == 1.0));
  }
}

TEST_CASE("unit square through the polygon path tags like the structured path") {
  const DomainSpec spec = DomainSpec::rectangle(0, 1, 0, 1, 0.75);
  const auto m = triangulate_polygon(spec);
  const auto s = generate_structured(spec);
  CHECK(m.num_triangles() == s.num_triangles());
  CHECK(axis_length(m) == doctest::Approx(1.0));
  CHECK(count_tag(m, BoundaryTag::Gamma0) == count_tag(s, BoundaryTag::Gamma0));
  CHECK(count_tag(m, BoundaryTag::Gamma) == count_tag(s, BoundaryTag::Gamma));
  CHECK(m.corner_nodes().size() == 2);
}

TEST_CASE("triangle with a side on the axis") {
  DomainSpec spec;
  spec.polygon = {{0, 0}, {1, 0}, {0, 1}};
  spec.target_h = 2.0;
  const auto m = triangulate_polygon(spec);
  CHECK(m.num_triangles() == 1);
  CHECK(count_tag(m, BoundaryTag::Gamma0) == 1);
  CHECK(count_tag(m, BoundaryTag::Gamma) == 2);
}

TEST_CASE("clockwise input is reoriented") {
  DomainSpec spec;
  spec.polygon = {{0, 1}, {1, 1}, {1, 0}, {0, 0}};
  spec.target_h = 0.5;
  const auto m = triangulate_polygon(spec);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) CHECK(m.triangle_area(t) > 0.0);
}

TEST_CASE("polygon errors") {
  DomainSpec bow;
  bow.polygon = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(triangulate_polygon(bow), MeshError);

  DomainSpec negative;
  negative.polygon = {{-0.1, 0}, {1, 0}, {1, 1}};
  CHECK_THROWS_AS(triangulate_polygon(negative), MeshError);

  DomainSpec point_contact;
  point_contact.polygon = {{0, 0}, {1, -1}, {1, 1}};
  CHECK_THROWS_AS(triangulate_polygon(point_contact), MeshError);
}

TEST_CASE("Gamma0 edges exist iff the polygon has a side on the axis") {
  DomainSpec off;
  off.polygon = {{0.5, 0}, {2, 0}, {2, 1}, {0.5, 1}};
  off.target_h = 0.5;
  CHECK(count_tag(triangulate_polygon(off), BoundaryTag::Gamma0) == 0);

  DomainSpec on = off;
  on.polygon[0].r = 0.0;
  on.polygon[3].r = 0.0;
  CHECK(count_tag(triangulate_polygon(on), BoundaryTag::Gamma0) > 0);
}

TEST_CASE("uniform refinement quadruples triangles and keeps tags") {
  DomainSpec spec;
  spec.polygon = kLShape;
  spec.target_h = 1.0;
  const auto coarse = triangulate_polygon(spec);
  const auto fine = refine_uniform(coarse);
  CHECK(fine.num_triangles() == 4 * coarse.num_triangles());
  CHECK(fine.boundary_edges().size() == 2 * coarse.boundary_edges().size());
  CHECK(count_tag(fine, BoundaryTag::Gamma0) == 2 * count_tag(coarse, BoundaryTag::Gamma0));
  for (std::size_t i = 0; i < coarse.boundary_edges().size(); ++i) {
    CHECK(fine.boundary_edges()[2 * i].tag == coarse.boundary_edges()[i].tag);
    CHECK(fine.boundary_edges()[2 * i + 1].tag == coarse.boundary_edges()[i].tag);
  }
  CHECK(std::abs(fine.total_area() - coarse.total_area()) <= 1e-12 * coarse.total_area());
}

TEST_CASE("native format round trip") {
  const auto m = generate_structured(DomainSpec::rectangle(0, 1.3, -0.2, 0.7, 0.3));
  const auto path = std::filesystem::temp_directory_path() / "axistokes_roundtrip.mesh";
  write_mesh(m, path);
  const auto back = read_mesh(path);
  std::filesystem::remove(path);
  REQUIRE(back.num_vertices() == m.num_vertices());
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    CHECK(back.vertices()[i].r == m.vertices()[i].r);
    CHECK(back.vertices()[i].z == m.vertices()[i].z);
  }
  CHECK(back.triangles() == m.triangles());
  REQUIRE(back.boundary_edges().size() == m.boundary_edges().size());
  for (std::size_t i = 0; i < m.boundary_edges().size(); ++i) {
    CHECK(back.boundary_edges()[i].v == m.boundary_edges()[i].v);
    CHECK(back.boundary_edges()[i].tag == m.boundary_edges()[i].tag);
  }
  CHECK(back.corner_nodes() == m.corner_nodes());
  CHECK(back.id() == m.id());
}

TEST_CASE("native format validation errors") {
  const std::string good =
      "axistokes-mesh v1\n"
      "# unit square\n"
      "vertices 4\n0 0\n1 0\n1 1\n0 1\n"
      "triangles 2\n0 1 2\n0 2 3\n"
      "boundary 4\n0 1 G\n1 2 G\n2 3 G\n3 0 G0\n";
  CHECK_NOTHROW(parse_mesh(good));

  std::string neg = good;
  neg.replace(neg.find("0 0\n"), 4, "-1e-3 0\n");
  CHECK_THROWS_WITH_AS(parse_mesh(neg), doctest::Contains("vertex 0"), MeshError);

  const std::string off_axis =
      "axistokes-mesh v1\nvertices 4\n0.2 0\n1 0\n1 1\n0.2 1\n"
      "triangles 2\n0 1 2\n0 2 3\nboundary 4\n0 1 G\n1 2 G\n2 3 G\n3 0 G0\n";
  CHECK_THROWS_WITH_AS(parse_mesh(off_axis), doctest::Contains("Gamma0"), MeshError);

  std::string bad_tag = good;
  bad_tag.replace(bad_tag.find("3 0 G0"), 6, "3 0 X");
  CHECK_THROWS_WITH_AS(parse_mesh(bad_tag), doctest::Contains("line 15"), MeshError);

  std::string missing = good;
  missing.replace(missing.find("3 0 G0\n"), 7, "");
  missing.replace(missing.find("boundary 4"), 10, "boundary 3");
  CHECK_THROWS_AS(parse_mesh(missing), MeshError);

  std::string clockwise = good;
  clockwise.replace(clockwise.find("0 1 2\n"), 6, "0 2 1\n");
  CHECK_THROWS_WITH_AS(parse_mesh(clockwise), doctest::Contains("triangle 0"), MeshError);

  CHECK_THROWS_WITH_AS(parse_mesh("axistokes-mesh v2\n"), doctest::Contains("line 1"), MeshError);
}

TEST_CASE("near-axis vertices snap to r = 0") {
  const std::string text =
      "axistokes-mesh v1\nvertices 4\n1e-15 0\n1 0\n1 1\n-1e-15 1\n"
      "triangles 2\n0 1 2\n0 2 3\nboundary 4\n0 1 G\n1 2 G\n2 3 G\n3 0 G0\n";
  const auto m = parse_mesh(text);
  CHECK(m.vertices()[0].r == 0.0);
  CHECK(m.vertices()[3].r == 0.0);
}

TEST_CASE("edge tables") {
  const auto m = generate_structured(DomainSpec::rectangle(0, 1, 0, 1, 0.5));
  CHECK(m.edges().size() == 16);
  std::size_t boundary = 0;
  for (std::size_t e = 0; e < m.edges().size(); ++e) boundary += m.edge_on_boundary(e);
  CHECK(boundary == 8);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      const auto& e = m.edges()[m.triangle_edges(t)[i]];
      CHECK(std::find(e.begin(), e.end(), tri[i]) == e.end());
    }
  }
}
