#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "igr/camera.hpp"
#include "igr/dataset.hpp"
#include "igr/mesh.hpp"

namespace test_support {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto base = std::filesystem::temp_directory_path();
    path_ = base / ("igr_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline igr::Camera make_camera(int h, int w, double focal, const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
  igr::Camera c;
  c.fx = c.fy = focal;
  c.cx = 0.5 * w;
  c.cy = 0.5 * h;
  c.width = w;
  c.height = h;
  c.world_to_camera = igr::look_at(eye, target);
  return c;
}

/// Moller-Trumbore ray/triangle intersection in double precision; returns the ray parameter.
inline std::optional<double> ray_triangle(const Eigen::Vector3d& o, const Eigen::Vector3d& d, const Eigen::Vector3d& a,
                                          const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const Eigen::Vector3d e1 = b - a, e2 = c - a;
  const Eigen::Vector3d p = d.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-14) return std::nullopt;
  const double inv = 1.0 / det;
  const Eigen::Vector3d s = o - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Eigen::Vector3d q = s.cross(e1);
  const double v = d.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t <= 0.0) return std::nullopt;
  return t;
}

struct RayHit {
  double t = 0.0;
  int triangle = -1;
};

/// Nearest hit of a ray against every triangle of a mesh.
inline std::optional<RayHit> cast_ray(const igr::ProxyMesh& mesh, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
  std::optional<RayHit> best;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& tri = mesh.triangles[i];
    const auto t = ray_triangle(o, d, mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    if (t && (!best || *t < best->t)) best = RayHit{*t, static_cast<int>(i)};
  }
  return best;
}

/// Camera-space z of the nearest surface seen through pixel center (x, y), 0 for none.
inline double oracle_depth(const igr::ProxyMesh& mesh, const igr::Camera& cam, int x, int y, int* triangle = nullptr) {
  const Eigen::Matrix3d r = cam.rotation();
  const Eigen::Vector3d dir_cam((x + 0.5 - cam.cx) / cam.fx, (y + 0.5 - cam.cy) / cam.fy, 1.0);
  const Eigen::Vector3d dir_world = r.transpose() * dir_cam;  // unnormalized: t equals camera z
  const auto hit = cast_ray(mesh, cam.center(), dir_world);
  if (triangle) *triangle = hit ? hit->triangle : -1;
  return hit ? hit->t : 0.0;
}

/// Scene with a far quad at z = 0 reaching past the test frusta and a small near quad at z = 1.
inline igr::ProxyMesh two_plane_mesh() {
  igr::ProxyMesh far = igr::make_quad_z(-6.0, 6.0, -6.0, 6.0, 0.0);
  far.append(igr::make_quad_z(-0.5, 0.5, -0.5, 0.5, 1.0));
  return far;
}

// Parameter count of a U-Net walked layer by layer from the channel lists alone.
inline std::int64_t walk_unet_parameters(int input, const std::vector<int>& enc, int output, int k) {
  std::int64_t n = 0;
  int c = input;
  for (int o : enc) {
    n += static_cast<std::int64_t>(c) * o * k * k + o;  // conv
    n += 2 * o;                                        // batchnorm scale and shift
    c = o;
  }
  const int depth = static_cast<int>(enc.size());
  for (int j = 0; j < depth; ++j) {
    const int mirrored = depth - 1 - j;
    const int o = mirrored > 0 ? enc[mirrored - 1] : enc[0];
    const int in = c + (j == 0 ? 0 : enc[mirrored]);
    n += static_cast<std::int64_t>(in) * o * k * k + o + 2 * o;
    c = o;
  }
  return n + static_cast<std::int64_t>(c) * output * k * k + output;
}

}  // namespace test_support
