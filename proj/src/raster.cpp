#include "igr/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "igr/error.hpp"

namespace igr {
namespace {

constexpr double kNearPlane = 1e-4;

struct ScreenVertex {
  double x, y, inv_z;
};

double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Triangles are oriented so that edge(v0, v1, v2) > 0 (clockwise on a y-down screen).
bool is_top_left(const ScreenVertex& a, const ScreenVertex& b) {
  return (a.y == b.y && b.x > a.x) || b.y < a.y;
}

// Sutherland-Hodgman against z >= near; returns up to 4 camera-space vertices.
int clip_near(const std::array<Eigen::Vector3d, 3>& in, std::array<Eigen::Vector3d, 4>& out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d& a = in[i];
    const Eigen::Vector3d& b = in[(i + 1) % 3];
    const bool a_in = a.z() >= kNearPlane, b_in = b.z() >= kNearPlane;
    if (a_in) out[n++] = a;
    if (a_in != b_in) {
      const double t = (kNearPlane - a.z()) / (b.z() - a.z());
      out[n++] = a + t * (b - a);
    }
  }
  return n;
}

Eigen::Vector3d barycentric_of(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                               const Eigen::Vector3d& c) {
  const Eigen::Vector3d v0 = b - a, v1 = c - a, v2 = p - a;
  const double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
  const double d20 = v2.dot(v0), d21 = v2.dot(v1);
  const double denom = d00 * d11 - d01 * d01;
  if (denom == 0.0) return {1.0, 0.0, 0.0};
  const double v = (d11 * d20 - d01 * d21) / denom;
  const double w = (d00 * d21 - d01 * d20) / denom;
  return {1.0 - v - w, v, w};
}

}  // namespace

RasterResult rasterize(const ProxyMesh& mesh, const Camera& camera) {
  validate_mesh(mesh);
  const int w = camera.width, h = camera.height;
  RasterResult out;
  out.depth = DepthMap(h, w);
  out.triangle.assign(static_cast<std::size_t>(h) * w, -1);
  out.barycentric.assign(static_cast<std::size_t>(h) * w, Eigen::Vector3d::Zero());

  std::vector<Eigen::Vector3d> cam_vertices(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) cam_vertices[i] = camera.to_camera(mesh.vertices[i]);

  // Depth is kept in double during the pass; one float write at the end.
  std::vector<double> zbuf(static_cast<std::size_t>(h) * w, 0.0);

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.triangle_area(t) <= 0.0) continue;
    const auto& tri = mesh.triangles[t];
    std::array<Eigen::Vector3d, 4> poly;
    const int n = clip_near({cam_vertices[tri[0]], cam_vertices[tri[1]], cam_vertices[tri[2]]}, poly);
    for (int k = 1; k + 1 < n; ++k) {
      std::array<ScreenVertex, 3> sv;
      const std::array<const Eigen::Vector3d*, 3> src{&poly[0], &poly[k], &poly[k + 1]};
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d s = camera.project_camera_point(*src[i]);
        sv[i] = {s.x(), s.y(), 1.0 / s.z()};
      }
      double area = edge(sv[0], sv[1], sv[2].x, sv[2].y);
      if (area == 0.0 || !std::isfinite(area)) continue;
      if (area < 0.0) {
        std::swap(sv[1], sv[2]);
        area = -area;
      }
      const double min_x = std::min({sv[0].x, sv[1].x, sv[2].x});
      const double max_x = std::max({sv[0].x, sv[1].x, sv[2].x});
      const double min_y = std::min({sv[0].y, sv[1].y, sv[2].y});
      const double max_y = std::max({sv[0].y, sv[1].y, sv[2].y});
      const int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(max_x - 0.5)));
      const int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
      const int y1 = std::min(h - 1, static_cast<int>(std::ceil(max_y - 0.5)));
      const bool tl0 = is_top_left(sv[1], sv[2]);
      const bool tl1 = is_top_left(sv[2], sv[0]);
      const bool tl2 = is_top_left(sv[0], sv[1]);
      for (int y = y0; y <= y1; ++y) {
        const double py = y + 0.5;
        for (int x = x0; x <= x1; ++x) {
          const double px = x + 0.5;
          const double e0 = edge(sv[1], sv[2], px, py);
          const double e1 = edge(sv[2], sv[0], px, py);
          const double e2 = edge(sv[0], sv[1], px, py);
          if (e0 < 0 || e1 < 0 || e2 < 0) continue;
          if ((e0 == 0 && !tl0) || (e1 == 0 && !tl1) || (e2 == 0 && !tl2)) continue;
          const double inv_z = (e0 * sv[0].inv_z + e1 * sv[1].inv_z + e2 * sv[2].inv_z) / area;
          if (!(inv_z > 0.0)) continue;
          const double z = 1.0 / inv_z;
          const std::size_t idx = static_cast<std::size_t>(y) * w + x;
          if (zbuf[idx] == 0.0 || z < zbuf[idx]) {
            zbuf[idx] = z;
            out.triangle[idx] = static_cast<std::int32_t>(t);
          }
        }
      }
    }
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (out.triangle[idx] < 0) continue;
      out.depth.data[idx] = static_cast<float>(zbuf[idx]);
      const auto& tri = mesh.triangles[static_cast<std::size_t>(out.triangle[idx])];
      const Eigen::Vector3d p = camera.unproject(x + 0.5, y + 0.5, zbuf[idx]);
      out.barycentric[idx] = barycentric_of(p, cam_vertices[tri[0]], cam_vertices[tri[1]], cam_vertices[tri[2]]);
    }
  }
  return out;
}

DepthMap rasterize_depth(const ProxyMesh& mesh, const Camera& camera) { return rasterize(mesh, camera).depth; }

}  // namespace igr
