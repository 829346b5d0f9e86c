#include "igr/gbuffer.hpp"

#include "igr/error.hpp"

namespace igr {

PositionMap backproject(const Camera& camera, const DepthMap& depth) {
  require(depth.height == camera.height && depth.width == camera.width, ErrorKind::ShapeMismatch,
          "backproject: depth size differs from camera");
  PositionMap out{Image(depth.height, depth.width, 3), Mask(depth.height, depth.width)};
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      const float d = depth.at(y, x);
      if (!(d > 0.0f)) continue;
      const Eigen::Vector3d p = camera.to_world(camera.unproject(x + 0.5, y + 0.5, d));
      for (int c = 0; c < 3; ++c) out.position.at(y, x, c) = static_cast<float>(p[c]);
      out.valid.at(y, x) = 1;
    }
  }
  return out;
}

GBuffer gbuffer_from_depth(const Camera& camera, const DepthMap& depth) {
  const int h = depth.height, w = depth.width;
  const PositionMap pos = backproject(camera, depth);
  GBuffer g{Image(h, w, 3), Image(h, w, 3), Image(h, w, 3), Mask(h, w)};
  const Eigen::Vector3d eye = camera.center();
  auto point = [&](int y, int x) {
    return Eigen::Vector3d(pos.position.at(y, x, 0), pos.position.at(y, x, 1), pos.position.at(y, x, 2));
  };
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      if (!pos.valid.at(y, x) || !pos.valid.at(y, x - 1) || !pos.valid.at(y, x + 1) || !pos.valid.at(y - 1, x) ||
          !pos.valid.at(y + 1, x))
        continue;
      const Eigen::Vector3d du = 0.5 * (point(y, x + 1) - point(y, x - 1));
      const Eigen::Vector3d dv = 0.5 * (point(y + 1, x) - point(y - 1, x));
      Eigen::Vector3d n = du.cross(dv);
      const double len = n.norm();
      if (!(len > 0.0)) continue;
      n /= len;
      const Eigen::Vector3d p = point(y, x);
      const Eigen::Vector3d v = (eye - p).normalized();
      if (n.dot(v) < 0.0) n = -n;
      const Eigen::Vector3d r = (2.0 * n.dot(v) * n - v).normalized();
      for (int c = 0; c < 3; ++c) {
        g.position.at(y, x, c) = static_cast<float>(p[c]);
        g.normal.at(y, x, c) = static_cast<float>(n[c]);
        g.reflect.at(y, x, c) = static_cast<float>(r[c]);
      }
      g.valid.at(y, x) = 1;
    }
  }
  return g;
}

Image stack_gbuffer(const GBuffer& g, const Bounds& bounds) {
  const int h = g.height(), w = g.width();
  Image out(h, w, 9);
  const Eigen::Vector3d extent = (bounds.max - bounds.min).cwiseMax(Eigen::Vector3d::Constant(1e-12));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!g.valid.at(y, x)) continue;
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = static_cast<float>((g.position.at(y, x, c) - bounds.min[c]) / extent[c]);
        out.at(y, x, 3 + c) = g.normal.at(y, x, c);
        out.at(y, x, 6 + c) = g.reflect.at(y, x, c);
      }
    }
  }
  return out;
}

}  // namespace igr
