#include "axistokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace axistokes {

namespace {

double signed_area(const RZ& a, const RZ& b, const RZ& c) {
  return 0.5 * ((b.r - a.r) * (c.z - a.z) - (c.r - a.r) * (b.z - a.z));
}

double cross(const RZ& o, const RZ& a, const RZ& b) {
  return (a.r - o.r) * (b.z - o.z) - (a.z - o.z) * (b.r - o.r);
}

std::array<std::size_t, 2> edge_key(std::size_t a, std::size_t b) {
  return a < b ? std::array<std::size_t, 2>{a, b} : std::array<std::size_t, 2>{b, a};
}

double bbox_diagonal(const std::vector<RZ>& pts) {
  if (pts.empty()) return 0.0;
  double rmin = pts[0].r, rmax = pts[0].r, zmin = pts[0].z, zmax = pts[0].z;
  for (const auto& p : pts) {
    rmin = std::min(rmin, p.r);
    rmax = std::max(rmax, p.r);
    zmin = std::min(zmin, p.z);
    zmax = std::max(zmax, p.z);
  }
  return std::hypot(rmax - rmin, zmax - zmin);
}

void snap_points(std::vector<RZ>& pts) {
  const double tol = 1e-12 * bbox_diagonal(pts);
  for (auto& p : pts)
    if (std::abs(p.r) < tol) p.r = 0.0;
}

BoundaryTag tag_for(const RZ& a, const RZ& b) {
  return (a.r == 0.0 && b.r == 0.0) ? BoundaryTag::Gamma0 : BoundaryTag::Gamma;
}

bool segments_intersect(const RZ& p1, const RZ& p2, const RZ& q1, const RZ& q2) {
  auto on_segment = [](const RZ& a, const RZ& b, const RZ& p) {
    return std::min(a.r, b.r) <= p.r && p.r <= std::max(a.r, b.r) && std::min(a.z, b.z) <= p.z &&
           p.z <= std::max(a.z, b.z);
  };
  const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

void check_polygon(const std::vector<RZ>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) throw MeshError("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i)
    if (poly[i].r < 0.0)
      throw MeshError("polygon vertex " + std::to_string(i) + " crosses r<0");
  for (std::size_t i = 0; i < n; ++i) {
    const RZ& a = poly[i];
    const RZ& b = poly[(i + 1) % n];
    if (a.r == b.r && a.z == b.z)
      throw MeshError("polygon has repeated vertex " + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const RZ& c = poly[j];
      const RZ& d = poly[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share one vertex; they must not fold back onto each other.
        const RZ& shared = (j == i + 1) ? b : a;
        const RZ& other_e = (j == i + 1) ? a : b;
        const RZ& other_f = (j == i + 1) ? d : c;
        if (cross(shared, other_e, other_f) == 0.0) {
          const double dot = (other_e.r - shared.r) * (other_f.r - shared.r) +
                             (other_e.z - shared.z) * (other_f.z - shared.z);
          if (dot > 0.0) throw MeshError("polygon folds back at vertex " + std::to_string(j));
        }
        continue;
      }
      if (segments_intersect(a, b, c, d))
        throw MeshError("polygon is self-intersecting (edges " + std::to_string(i) + " and " +
                        std::to_string(j) + ")");
    }
  }
}

bool point_in_triangle(const RZ& p, const RZ& a, const RZ& b, const RZ& c) {
  return cross(a, b, p) >= 0.0 && cross(b, c, p) >= 0.0 && cross(c, a, p) >= 0.0;
}

double triangle_quality(const RZ& a, const RZ& b, const RZ& c) {
  const double l2 = std::pow(b.r - a.r, 2) + std::pow(b.z - a.z, 2) + std::pow(c.r - b.r, 2) +
                    std::pow(c.z - b.z, 2) + std::pow(a.r - c.r, 2) + std::pow(a.z - c.z, 2);
  return 4.0 * std::sqrt(3.0) * signed_area(a, b, c) / l2;
}

std::string tag_name(BoundaryTag t) { return t == BoundaryTag::Gamma0 ? "G0" : "G"; }

}  // namespace

MeridianMesh::MeridianMesh(std::vector<RZ> vertices,
                           std::vector<std::array<std::size_t, 3>> triangles,
                           std::vector<BoundaryEdge> boundary)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), boundary_(std::move(boundary)) {
  snap_axis();
  build_topology();
  validate();
  std::set<std::size_t> on_gamma, on_gamma0;
  for (const auto& be : boundary_) {
    auto& s = be.tag == BoundaryTag::Gamma ? on_gamma : on_gamma0;
    s.insert(be.v[0]);
    s.insert(be.v[1]);
  }
  std::set_intersection(on_gamma.begin(), on_gamma.end(), on_gamma0.begin(), on_gamma0.end(),
                        std::inserter(corners_, corners_.begin()));
}

void MeridianMesh::snap_axis() { snap_points(vertices_); }

void MeridianMesh::build_topology() {
  const std::size_t nv = vertices_.size();
  std::map<std::array<std::size_t, 2>, std::size_t> index;
  tri_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (std::size_t i = 0; i < 3; ++i) {
      if (tri[i] >= nv)
        throw MeshError("triangle " + std::to_string(t) + " references missing vertex " +
                        std::to_string(tri[i]));
    }
    for (std::size_t i = 0; i < 3; ++i) {
      const auto key = edge_key(tri[(i + 1) % 3], tri[(i + 2) % 3]);
      auto [it, inserted] = index.emplace(key, edges_.size());
      if (inserted) edges_.push_back(key);
      tri_edges_[t][i] = it->second;
    }
  }
  edge_boundary_.assign(edges_.size(), -1);
  for (std::size_t b = 0; b < boundary_.size(); ++b) {
    const auto key = edge_key(boundary_[b].v[0], boundary_[b].v[1]);
    auto it = index.find(key);
    if (it == index.end())
      throw MeshError("boundary edge " + std::to_string(b) + " is not an edge of any triangle");
    if (edge_boundary_[it->second] >= 0)
      throw MeshError("boundary edge " + std::to_string(b) + " is listed twice");
    edge_boundary_[it->second] = static_cast<int>(b);
  }
}

void MeridianMesh::validate() const {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (!(vertices_[i].r >= 0.0))
      throw MeshError("vertex " + std::to_string(i) + " has r < 0");
  for (std::size_t t = 0; t < triangles_.size(); ++t)
    if (!(triangle_area(t) > 0.0))
      throw MeshError("triangle " + std::to_string(t) + " has non-positive signed area");

  std::vector<int> count(edges_.size(), 0);
  for (const auto& te : tri_edges_)
    for (auto e : te) ++count[e];
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (count[e] > 2)
      throw MeshError("edge " + std::to_string(e) + " is shared by more than two triangles");
    if (count[e] == 1 && edge_boundary_[e] < 0)
      throw MeshError("edge (" + std::to_string(edges_[e][0]) + "," + std::to_string(edges_[e][1]) +
                      ") lies on the boundary but carries no tag");
    if (count[e] == 2 && edge_boundary_[e] >= 0)
      throw MeshError("boundary edge " + std::to_string(edge_boundary_[e]) + " is interior");
  }

  std::vector<bool> on_axis_edge(vertices_.size(), false);
  for (std::size_t b = 0; b < boundary_.size(); ++b) {
    const auto& be = boundary_[b];
    const bool both_axis = vertices_[be.v[0]].r == 0.0 && vertices_[be.v[1]].r == 0.0;
    if (be.tag == BoundaryTag::Gamma0 && !both_axis)
      throw MeshError("boundary edge " + std::to_string(b) + " tagged Gamma0 lies off the axis");
    if (be.tag == BoundaryTag::Gamma && both_axis)
      throw MeshError("boundary edge " + std::to_string(b) + " on the axis is tagged Gamma");
    if (be.tag == BoundaryTag::Gamma0) on_axis_edge[be.v[0]] = on_axis_edge[be.v[1]] = true;
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i].r == 0.0 && !on_axis_edge[i])
      throw MeshError("vertex " + std::to_string(i) +
                      " touches the axis without an adjacent Gamma0 edge (point contact)");
}

BoundaryTag MeridianMesh::edge_tag(std::size_t e) const {
  if (edge_boundary_[e] < 0) throw MeshError("edge " + std::to_string(e) + " is interior");
  return boundary_[edge_boundary_[e]].tag;
}

double MeridianMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double MeridianMesh::total_area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) a += triangle_area(t);
  return a;
}

double MeridianMesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& e : edges_) {
    const RZ& a = vertices_[e[0]];
    const RZ& b = vertices_[e[1]];
    h = std::max(h, std::hypot(a.r - b.r, a.z - b.z));
  }
  return h;
}

/// Bounding-box diagonal.
double MeridianMesh::diameter() const { return bbox_diagonal(vertices_); }

std::string MeridianMesh::id() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& v : vertices_) {
    mix(&v.r, sizeof v.r);
    mix(&v.z, sizeof v.z);
  }
  for (const auto& t : triangles_)
    for (auto i : t) {
      const std::uint64_t x = i;
      mix(&x, sizeof x);
    }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

DomainSpec DomainSpec::rectangle(double r0, double r1, double z0, double z1, double h,
                                 unsigned refinement_level) {
  DomainSpec s;
  s.polygon = {{r0, z0}, {r1, z0}, {r1, z1}, {r0, z1}};
  s.target_h = h;
  s.refinement_level = refinement_level;
  return s;
}

MeridianMesh generate_structured(const DomainSpec& spec) {
  if (spec.polygon.size() != 4) throw MeshError("structured generator needs a 4-vertex rectangle");
  const RZ lo = spec.polygon[0];
  const RZ hi = spec.polygon[2];
  const auto& p = spec.polygon;
  if (p[1].r != hi.r || p[1].z != lo.z || p[3].r != lo.r || p[3].z != hi.z)
    throw MeshError("structured generator needs an axis-aligned rectangle");
  if (!(hi.r > lo.r) || !(hi.z > lo.z)) throw MeshError("rectangle has non-positive extent");
  if (lo.r < 0.0) throw MeshError("rectangle crosses r<0");
  if (!(spec.target_h > 0.0)) throw MeshError("target_h must be positive");

  const std::size_t scale = std::size_t{1} << spec.refinement_level;
  const auto nr = static_cast<std::size_t>(std::ceil((hi.r - lo.r) / spec.target_h - 1e-12)) * scale;
  const auto nz = static_cast<std::size_t>(std::ceil((hi.z - lo.z) / spec.target_h - 1e-12)) * scale;

  std::vector<RZ> verts;
  verts.reserve((nr + 1) * (nz + 1));
  for (std::size_t j = 0; j <= nz; ++j)
    for (std::size_t i = 0; i <= nr; ++i)
      verts.push_back({i == nr ? hi.r : lo.r + (hi.r - lo.r) * double(i) / double(nr),
                       j == nz ? hi.z : lo.z + (hi.z - lo.z) * double(j) / double(nz)});
  snap_points(verts);
  auto vid = [nr](std::size_t i, std::size_t j) { return j * (nr + 1) + i; };

  std::vector<std::array<std::size_t, 3>> tris;
  tris.reserve(2 * nr * nz);
  for (std::size_t j = 0; j < nz; ++j)
    for (std::size_t i = 0; i < nr; ++i) {
      const auto v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      tris.push_back({v00, v10, v11});
      tris.push_back({v00, v11, v01});
    }

  std::vector<BoundaryEdge> bnd;
  auto add = [&](std::size_t a, std::size_t b) { bnd.push_back({{a, b}, tag_for(verts[a], verts[b])}); };
  for (std::size_t i = 0; i < nr; ++i) add(vid(i, 0), vid(i + 1, 0));
  for (std::size_t j = 0; j < nz; ++j) add(vid(nr, j), vid(nr, j + 1));
  for (std::size_t i = nr; i > 0; --i) add(vid(i, nz), vid(i - 1, nz));
  for (std::size_t j = nz; j > 0; --j) add(vid(0, j), vid(0, j - 1));
  return MeridianMesh(std::move(verts), std::move(tris), std::move(bnd));
}

MeridianMesh triangulate_polygon(const DomainSpec& spec) {
  if (!(spec.target_h > 0.0)) throw MeshError("target_h must be positive");
  std::vector<RZ> poly = spec.polygon;
  check_polygon(poly);
  snap_points(poly);

  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) area += cross({0, 0}, poly[i], poly[(i + 1) % poly.size()]);
  if (area == 0.0) throw MeshError("polygon has zero area");
  if (area < 0.0) std::reverse(poly.begin(), poly.end());

  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (poly[i].r != 0.0) continue;
    const bool prev_axis = poly[(i + n - 1) % n].r == 0.0;
    const bool next_axis = poly[(i + 1) % n].r == 0.0;
    if (!prev_axis && !next_axis)
      throw MeshError("polygon meets the axis at the isolated point (0," + std::to_string(poly[i].z) +
                      "); only segment contact is supported");
  }

  std::vector<std::size_t> ring(n);
  for (std::size_t i = 0; i < n; ++i) ring[i] = i;
  std::vector<std::array<std::size_t, 3>> tris;
  while (ring.size() > 3) {
    const std::size_t m = ring.size();
    double best_q = -1.0;
    std::size_t best = m;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t a = ring[(i + m - 1) % m], b = ring[i], c = ring[(i + 1) % m];
      if (cross(poly[a], poly[b], poly[c]) <= 0.0) continue;
      bool blocked = false;
      for (std::size_t j = 0; j < m && !blocked; ++j) {
        const std::size_t v = ring[j];
        if (v == a || v == b || v == c) continue;
        blocked = point_in_triangle(poly[v], poly[a], poly[b], poly[c]);
      }
      if (blocked) continue;
      const double q = triangle_quality(poly[a], poly[b], poly[c]);
      if (q > best_q) {
        best_q = q;
        best = i;
      }
    }
    if (best == m) throw MeshError("ear clipping failed; polygon is degenerate");
    tris.push_back({ring[(best + m - 1) % m], ring[best], ring[(best + 1) % m]});
    ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(best));
  }
  if (cross(poly[ring[0]], poly[ring[1]], poly[ring[2]]) <= 0.0)
    throw MeshError("ear clipping failed; polygon is degenerate");
  tris.push_back({ring[0], ring[1], ring[2]});

  std::vector<BoundaryEdge> bnd;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    bnd.push_back({{i, j}, tag_for(poly[i], poly[j])});
  }
  MeridianMesh mesh(std::move(poly), std::move(tris), std::move(bnd));
  while (mesh.max_edge_length() > spec.target_h * (1.0 + 1e-12)) mesh = refine_uniform(mesh);
  for (unsigned l = 0; l < spec.refinement_level; ++l) mesh = refine_uniform(mesh);
  return mesh;
}

MeridianMesh refine_uniform(const MeridianMesh& mesh) {
  const std::size_t nv = mesh.num_vertices();
  std::vector<RZ> verts = mesh.vertices();
  for (const auto& e : mesh.edges()) {
    const RZ& a = mesh.vertices()[e[0]];
    const RZ& b = mesh.vertices()[e[1]];
    verts.push_back({0.5 * (a.r + b.r), 0.5 * (a.z + b.z)});
  }
  std::vector<std::array<std::size_t, 3>> tris;
  tris.reserve(4 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto [a, b, c] = mesh.triangles()[t];
    const auto& te = mesh.triangle_edges(t);
    const std::size_t m_bc = nv + te[0], m_ca = nv + te[1], m_ab = nv + te[2];
    tris.push_back({a, m_ab, m_ca});
    tris.push_back({m_ab, b, m_bc});
    tris.push_back({m_ca, m_bc, c});
    tris.push_back({m_ab, m_bc, m_ca});
  }
  std::map<std::array<std::size_t, 2>, std::size_t> index;
  for (std::size_t e = 0; e < mesh.edges().size(); ++e) index.emplace(mesh.edges()[e], e);
  std::vector<BoundaryEdge> bnd;
  bnd.reserve(2 * mesh.boundary_edges().size());
  for (const auto& be : mesh.boundary_edges()) {
    const std::size_t mid = nv + index.at(edge_key(be.v[0], be.v[1]));
    bnd.push_back({{be.v[0], mid}, be.tag});
    bnd.push_back({{mid, be.v[1]}, be.tag});
  }
  return MeridianMesh(std::move(verts), std::move(tris), std::move(bnd));
}

std::string format_mesh(const MeridianMesh& mesh) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "axistokes-mesh v1\n";
  os << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& v : mesh.vertices()) os << v.r << ' ' << v.z << '\n';
  os << "triangles " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "boundary " << mesh.boundary_edges().size() << '\n';
  for (const auto& b : mesh.boundary_edges())
    os << b.v[0] << ' ' << b.v[1] << ' ' << tag_name(b.tag) << '\n';
  return os.str();
}

MeridianMesh parse_mesh(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&line_no](const std::string& msg) -> MeshError {
    return MeshError("line " + std::to_string(line_no) + ": " + msg);
  };
  auto next_line = [&](std::istringstream& fields) -> bool {
    while (std::getline(in, raw)) {
      ++line_no;
      if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
      if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
      fields.clear();
      fields.str(raw);
      return true;
    }
    return false;
  };
  auto expect_end = [&](std::istringstream& fields) {
    std::string extra;
    if (fields >> extra) throw fail("unexpected token '" + extra + "'");
  };
  auto read_section = [&](const std::string& keyword) -> std::size_t {
    std::istringstream f;
    if (!next_line(f)) throw fail("unexpected end of file, expected '" + keyword + "'");
    std::string word;
    long long count = -1;
    if (!(f >> word) || word != keyword || !(f >> count) || count < 0)
      throw fail("expected '" + keyword + " <count>'");
    expect_end(f);
    return static_cast<std::size_t>(count);
  };
  auto read_index = [&](std::istringstream& f) -> std::size_t {
    long long v = -1;
    if (!(f >> v) || v < 0) throw fail("expected nonnegative index");
    return static_cast<std::size_t>(v);
  };

  std::istringstream f;
  if (!next_line(f)) throw MeshError("empty mesh file");
  std::string magic, version;
  f >> magic >> version;
  if (magic != "axistokes-mesh" || version != "v1") throw fail("expected header 'axistokes-mesh v1'");
  expect_end(f);

  std::vector<RZ> verts(read_section("vertices"));
  for (auto& v : verts) {
    if (!next_line(f)) throw fail("unexpected end of file in vertices");
    if (!(f >> v.r >> v.z)) throw fail("expected 'r z'");
    expect_end(f);
  }
  std::vector<std::array<std::size_t, 3>> tris(read_section("triangles"));
  for (auto& t : tris) {
    if (!next_line(f)) throw fail("unexpected end of file in triangles");
    for (auto& i : t) i = read_index(f);
    expect_end(f);
  }
  std::vector<BoundaryEdge> bnd(read_section("boundary"));
  for (auto& b : bnd) {
    if (!next_line(f)) throw fail("unexpected end of file in boundary");
    b.v[0] = read_index(f);
    b.v[1] = read_index(f);
    std::string tag;
    if (!(f >> tag)) throw fail("expected boundary tag");
    if (tag == "G")
      b.tag = BoundaryTag::Gamma;
    else if (tag == "G0")
      b.tag = BoundaryTag::Gamma0;
    else
      throw fail("unknown boundary tag '" + tag + "'");
    expect_end(f);
  }
  if (next_line(f)) throw fail("trailing content after boundary section");
  return MeridianMesh(std::move(verts), std::move(tris), std::move(bnd));
}

MeridianMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_mesh(ss.str());
}

void write_mesh(const MeridianMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path.string());
  out << format_mesh(mesh);
}

}  // namespace axistokes
