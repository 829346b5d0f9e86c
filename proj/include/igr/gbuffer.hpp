#pragma once

#include "igr/camera.hpp"
#include "igr/image.hpp"
#include "igr/mesh.hpp"

namespace igr {

/// World-space geometric maps of one view. Entries with valid = 0 are zero.
struct GBuffer {
  Image position;  // 3 channels, world units
  Image normal;    // 3 channels, unit, facing the camera
  Image reflect;   // 3 channels, unit reflected view direction
  Mask valid;

  int height() const { return valid.height; }
  int width() const { return valid.width; }
};

struct PositionMap {
  Image position;
  Mask valid;
};

/// World point of every pixel center with depth > 0; invalid pixels map to the origin.
PositionMap backproject(const Camera& camera, const DepthMap& depth);

/// Central-difference normals and reflect = 2(n.v)n - v, v the unit surface-to-camera direction.
/// A pixel is valid only if it and its four neighbours have depth.
GBuffer gbuffer_from_depth(const Camera& camera, const DepthMap& depth);

/// Network input layout: position (mapped to [0,1] per axis by `bounds`) | normal | reflect, as 9 channels.
/// Invalid pixels are zero in all channels.
Image stack_gbuffer(const GBuffer& gbuffer, const Bounds& bounds);

}  // namespace igr
