#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "igr/camera.hpp"
#include "igr/image.hpp"
#include "igr/mesh.hpp"

namespace igr {

/// Per-pixel visible surface of a mesh. Barycentrics refer to the original (unclipped) triangle.
struct RasterResult {
  DepthMap depth;
  std::vector<std::int32_t> triangle;  // -1 where no surface
  std::vector<Eigen::Vector3d> barycentric;

  std::int32_t triangle_at(int y, int x) const { return triangle[static_cast<std::size_t>(y) * depth.width + x]; }
  const Eigen::Vector3d& bary_at(int y, int x) const {
    return barycentric[static_cast<std::size_t>(y) * depth.width + x];
  }
};

/// Z-buffer rasterization with near-plane clipping, perspective-correct depth and a top-left fill rule.
RasterResult rasterize(const ProxyMesh& mesh, const Camera& camera);

/// Depth of the nearest surface per pixel center; 0 where nothing is hit.
DepthMap rasterize_depth(const ProxyMesh& mesh, const Camera& camera);

}  // namespace igr
