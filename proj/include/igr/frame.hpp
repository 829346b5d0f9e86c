#pragma once

#include "igr/camera.hpp"
#include "igr/image.hpp"

namespace igr {

/// One calibrated view. `depth` may be empty until rasterized from the proxy mesh.
struct Frame {
  int id = 0;
  Image image;
  Camera camera;
  DepthMap depth;

  bool has_depth() const { return !depth.empty(); }
};

}  // namespace igr
