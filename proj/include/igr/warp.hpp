#pragma once

#include <array>

#include "igr/camera.hpp"
#include "igr/frame.hpp"
#include "igr/image.hpp"

namespace igr {

/// Screen-space point of view q: continuous pixel coordinates plus z-depth.
struct ScreenPoint {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  bool in_front = false;  // depth > 0 in the destination view
};

/// Back-project (u, v, d) from cam_p and re-project into cam_q.
ScreenPoint cross_project_point(double u, double v, double d, const Camera& cam_p, const Camera& cam_q);

/// Four clamped taps of a bilinear lookup at continuous coordinate (u, v), pixel centers at i + 0.5.
struct BilinearTaps {
  std::array<int, 4> index{};  // flat pixel indices y * width + x
  std::array<float, 4> weight{};
};

BilinearTaps bilinear_taps(double u, double v, int width, int height);
float sample_bilinear(const DepthMap& map, double u, double v);
/// Writes `channels` interpolated values of `img` at (u, v) into `out`.
void sample_bilinear(const Image& img, double u, double v, float* out);

/// Geometric part of a warp from a source view into a target view.
struct WarpGeometry {
  Image field;  // 2 channels: source (u', v') per target pixel, zero where masked
  Mask mask;
};

/// Occlusion-aware visibility of a world point from a view. On success writes the source coordinate.
bool visible_from(const Camera& camera, const DepthMap& depth, const Eigen::Vector3d& world, double occlusion_eps,
                  ScreenPoint* hit = nullptr);

/// Visibility test of target pixel (x, y) against the source view.
bool pixel_visible(const Camera& target_camera, const DepthMap& target_depth, int x, int y,
                   const Camera& source_camera, const DepthMap& source_depth, double occlusion_eps,
                   ScreenPoint* hit = nullptr);

WarpGeometry compute_warp(const Camera& source_camera, const DepthMap& source_depth, const Camera& target_camera,
                          const DepthMap& target_depth, double occlusion_eps);

/// Bilinear resample of `source` along the warp; 0 where the mask is 0.
Image apply_warp(const Image& source, const WarpGeometry& warp);

struct WarpResult {
  Image color;
  Image warp_field;  // source pixel coordinates
  Mask mask;
  int source_width = 0;  // size of the image the field points into
  int source_height = 0;
};

/// Warps a source frame (which must carry depth) into the target view.
WarpResult warp_image(const Frame& source, const Camera& target_camera, const DepthMap& target_depth,
                      double occlusion_eps);

}  // namespace igr
