#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace igr {

struct Bounds {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();

  Eigen::Vector3d center() const { return 0.5 * (min + max); }
  /// Radius of the sphere around center() enclosing the box.
  double sphere_radius() const { return 0.5 * (max - min).norm(); }
};

struct ProxyMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Eigen::Vector3f> colors;  // empty or one per vertex

  bool has_colors() const { return !colors.empty(); }
  Eigen::Vector3d triangle_normal(std::size_t t) const;  // unit, zero for degenerate faces
  double triangle_area(std::size_t t) const;
  Eigen::Vector3d triangle_centroid(std::size_t t) const;
  Bounds bounds() const;

  /// Appends `other`, reindexing its triangles. Colors are kept only if both have them.
  void append(const ProxyMesh& other);
};

/// Throws DegenerateMesh on out-of-range indices or when every triangle has zero area.
void validate_mesh(const ProxyMesh& mesh);

/// Wavefront OBJ subset: `v x y z [r g b]` and `f a b c` (with optional /vt/vn suffixes).
/// Polygons are fan-triangulated.
ProxyMesh read_obj(const std::filesystem::path& path);
void write_obj(const ProxyMesh& mesh, const std::filesystem::path& path);

ProxyMesh make_uv_sphere(const Eigen::Vector3d& center, double radius, int slices, int stacks);
/// Axis-aligned cube; each face split into subdiv x subdiv quads.
ProxyMesh make_cube(const Eigen::Vector3d& center, double size, int subdiv);
/// Axis-aligned rectangle in the plane z = const, spanning [x0,x1] x [y0,y1].
ProxyMesh make_quad_z(double x0, double x1, double y0, double y1, double z);

}  // namespace igr
