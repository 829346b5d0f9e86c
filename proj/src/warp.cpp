#include "igr/warp.hpp"

#include <cmath>

#include "igr/error.hpp"

namespace igr {

ScreenPoint cross_project_point(double u, double v, double d, const Camera& cam_p, const Camera& cam_q) {
  const Eigen::Vector3d world = cam_p.to_world(cam_p.unproject(u, v, d));
  const Eigen::Vector3d cam = cam_q.to_camera(world);
  ScreenPoint out;
  out.depth = cam.z();
  out.in_front = cam.z() > 0.0;
  if (out.in_front) {
    const Eigen::Vector3d s = cam_q.project_camera_point(cam);
    out.u = s.x();
    out.v = s.y();
  }
  return out;
}

BilinearTaps bilinear_taps(double u, double v, int width, int height) {
  const double fx = u - 0.5, fy = v - 0.5;
  const double x0f = std::floor(fx), y0f = std::floor(fy);
  const float ax = static_cast<float>(fx - x0f), ay = static_cast<float>(fy - y0f);
  auto clampi = [](int i, int hi) { return i < 0 ? 0 : (i > hi ? hi : i); };
  const int x0 = clampi(static_cast<int>(x0f), width - 1), x1 = clampi(static_cast<int>(x0f) + 1, width - 1);
  const int y0 = clampi(static_cast<int>(y0f), height - 1), y1 = clampi(static_cast<int>(y0f) + 1, height - 1);
  BilinearTaps t;
  t.index = {y0 * width + x0, y0 * width + x1, y1 * width + x0, y1 * width + x1};
  t.weight = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
  return t;
}

float sample_bilinear(const DepthMap& map, double u, double v) {
  const BilinearTaps t = bilinear_taps(u, v, map.width, map.height);
  float acc = 0.0f;
  for (int k = 0; k < 4; ++k) acc += t.weight[k] * map.data[static_cast<std::size_t>(t.index[k])];
  return acc;
}

void sample_bilinear(const Image& img, double u, double v, float* out) {
  const BilinearTaps t = bilinear_taps(u, v, img.width, img.height);
  for (int c = 0; c < img.channels; ++c) out[c] = 0.0f;
  for (int k = 0; k < 4; ++k) {
    const float* px = &img.data[static_cast<std::size_t>(t.index[k]) * img.channels];
    for (int c = 0; c < img.channels; ++c) out[c] += t.weight[k] * px[c];
  }
}

bool visible_from(const Camera& camera, const DepthMap& depth, const Eigen::Vector3d& world, double occlusion_eps,
                  ScreenPoint* hit) {
  const Eigen::Vector3d cam = camera.to_camera(world);
  if (!(cam.z() > 0.0)) return false;
  const Eigen::Vector3d s = camera.project_camera_point(cam);
  if (!(s.x() >= 0.0 && s.x() < camera.width && s.y() >= 0.0 && s.y() < camera.height)) return false;
  const float source_depth = sample_bilinear(depth, s.x(), s.y());
  if (!(std::abs(cam.z() - source_depth) <= occlusion_eps)) return false;
  if (hit) *hit = {s.x(), s.y(), cam.z(), true};
  return true;
}

bool pixel_visible(const Camera& target_camera, const DepthMap& target_depth, int x, int y,
                   const Camera& source_camera, const DepthMap& source_depth, double occlusion_eps,
                   ScreenPoint* hit) {
  const float d = target_depth.at(y, x);
  if (!(d > 0.0f)) return false;
  const Eigen::Vector3d world = target_camera.to_world(target_camera.unproject(x + 0.5, y + 0.5, d));
  return visible_from(source_camera, source_depth, world, occlusion_eps, hit);
}

WarpGeometry compute_warp(const Camera& source_camera, const DepthMap& source_depth, const Camera& target_camera,
                          const DepthMap& target_depth, double occlusion_eps) {
  require(source_depth.height == source_camera.height && source_depth.width == source_camera.width,
          ErrorKind::ShapeMismatch, "warp: source depth size differs from its camera");
  require(target_depth.height == target_camera.height && target_depth.width == target_camera.width,
          ErrorKind::ShapeMismatch, "warp: target depth size differs from its camera");
  const int h = target_camera.height, w = target_camera.width;
  WarpGeometry out{Image(h, w, 2), Mask(h, w)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      ScreenPoint s;
      if (!pixel_visible(target_camera, target_depth, x, y, source_camera, source_depth, occlusion_eps, &s)) continue;
      out.mask.at(y, x) = 1;
      out.field.at(y, x, 0) = static_cast<float>(s.u);
      out.field.at(y, x, 1) = static_cast<float>(s.v);
    }
  }
  return out;
}

Image apply_warp(const Image& source, const WarpGeometry& warp) {
  const int h = warp.mask.height, w = warp.mask.width;
  Image out(h, w, source.channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (warp.mask.at(y, x))
        sample_bilinear(source, warp.field.at(y, x, 0), warp.field.at(y, x, 1), &out.at(y, x, 0));
  return out;
}

WarpResult warp_image(const Frame& source, const Camera& target_camera, const DepthMap& target_depth,
                      double occlusion_eps) {
  require(source.has_depth(), ErrorKind::InvalidArgument, "warp_image: source frame has no depth");
  WarpGeometry g = compute_warp(source.camera, source.depth, target_camera, target_depth, occlusion_eps);
  Image color = apply_warp(source.image, g);
  return {std::move(color), std::move(g.field), std::move(g.mask), source.image.width, source.image.height};
}

}  // namespace igr
