#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace axistokes {

/// Point in the meridian half-plane {(r, z) : r >= 0}.
struct RZ {
  double r = 0.0;
  double z = 0.0;
};

enum class BoundaryTag { Gamma, Gamma0 };

struct BoundaryEdge {
  std::array<std::size_t, 2> v;
  BoundaryTag tag = BoundaryTag::Gamma;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Triangulated polygonal half section. Gamma is the physical wall, Gamma0 the part of
/// the boundary lying on the symmetry axis r = 0.
///
/// Immutable once validated; construct through the generators or read_mesh.
class MeridianMesh {
 public:
  MeridianMesh() = default;

  /// Builds a mesh from raw arrays, snaps near-axis vertices to r = 0 and validates.
  /// Throws MeshError naming the offending entity when an invariant fails.
  MeridianMesh(std::vector<RZ> vertices, std::vector<std::array<std::size_t, 3>> triangles,
               std::vector<BoundaryEdge> boundary);

  const std::vector<RZ>& vertices() const { return vertices_; }
  const std::vector<std::array<std::size_t, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
  const std::set<std::size_t>& corner_nodes() const { return corners_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  /// Unique undirected edges (sorted vertex pairs), ordered by first appearance.
  const std::vector<std::array<std::size_t, 2>>& edges() const { return edges_; }
  /// For triangle t, the edge index opposite local vertex i (edge between vertices i+1, i+2).
  const std::array<std::size_t, 3>& triangle_edges(std::size_t t) const { return tri_edges_[t]; }
  /// Tag of edge e if it lies on the boundary.
  bool edge_on_boundary(std::size_t e) const { return edge_boundary_[e] >= 0; }
  BoundaryTag edge_tag(std::size_t e) const;

  double triangle_area(std::size_t t) const;
  double total_area() const;
  /// Largest edge length.
  double max_edge_length() const;
  double diameter() const;

  /// Stable identifier derived from the geometry, used to pair stacks with meshes.
  std::string id() const;

 private:
  void snap_axis();
  void build_topology();
  void validate() const;

  std::vector<RZ> vertices_;
  std::vector<std::array<std::size_t, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::set<std::size_t> corners_;
  std::vector<std::array<std::size_t, 2>> edges_;
  std::vector<std::array<std::size_t, 3>> tri_edges_;
  std::vector<int> edge_boundary_;  // index into boundary_ or -1
};

/// Polygonal domain description.
struct DomainSpec {
  std::vector<RZ> polygon;
  double target_h = 1.0;
  unsigned refinement_level = 0;

  static DomainSpec rectangle(double r0, double r1, double z0, double z1, double h,
                              unsigned refinement_level = 0);
};

/// Uniform right-triangle mesh of an axis-aligned rectangle. Cells have side <= target_h.
MeridianMesh generate_structured(const DomainSpec& spec);

/// Ear-clipping triangulation of a simple polygon, refined uniformly until every edge is
/// no longer than target_h, then refinement_level more times.
MeridianMesh triangulate_polygon(const DomainSpec& spec);

/// Red refinement: every triangle split into four, boundary tags inherited by child edges.
MeridianMesh refine_uniform(const MeridianMesh& mesh);

/// Native text format, `axistokes-mesh v1`.
MeridianMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const MeridianMesh& mesh, const std::filesystem::path& path);
MeridianMesh parse_mesh(const std::string& text);
std::string format_mesh(const MeridianMesh& mesh);

}  // namespace axistokes
