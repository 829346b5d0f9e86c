#include "igr/camera.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "igr/error.hpp"

namespace igr {

Eigen::Matrix3d Camera::intrinsics() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Eigen::Vector3d Camera::center() const { return -rotation().transpose() * translation(); }

Eigen::Vector3d Camera::ray_direction_world(double u, double v) const {
  return (rotation().transpose() * unproject(u, v, 1.0)).normalized();
}

Camera Camera::resized(int new_height, int new_width) const {
  Camera out = *this;
  const double sx = static_cast<double>(new_width) / width;
  const double sy = static_cast<double>(new_height) / height;
  out.fx *= sx;
  out.cx *= sx;
  out.fy *= sy;
  out.cy *= sy;
  out.width = new_width;
  out.height = new_height;
  return out;
}

void validate_camera(const Camera& cam) {
  require(cam.fx > 0 && cam.fy > 0, ErrorKind::MalformedCameras, "focal lengths must be positive");
  require(cam.width > 0 && cam.height > 0, ErrorKind::MalformedCameras, "image size must be positive");
  require(cam.cx >= 0 && cam.cx < cam.width && cam.cy >= 0 && cam.cy < cam.height,
          ErrorKind::MalformedCameras, "principal point outside the image");
  require(cam.world_to_camera.allFinite(), ErrorKind::MalformedCameras, "non-finite pose");
  const Eigen::Matrix3d r = cam.rotation();
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  require(ortho <= 1e-6, ErrorKind::MalformedCameras, "rotation block is not orthonormal");
  require(std::abs(r.determinant() - 1.0) <= 1e-6, ErrorKind::MalformedCameras,
          "rotation block determinant is not +1");
  const Eigen::RowVector4d last = cam.world_to_camera.row(3);
  require((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() <= 1e-9,
          ErrorKind::MalformedCameras, "last pose row must be (0,0,0,1)");
}

Eigen::Matrix4d look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                        const Eigen::Vector3d& up) {
  const Eigen::Vector3d z = (target - eye).normalized();
  Eigen::Vector3d x = z.cross(up);
  if (x.norm() < 1e-12) x = z.cross(Eigen::Vector3d::UnitZ());
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = -r * eye;
  return m;
}

Eigen::Vector3d orbit_eye(const OrbitPose& pose) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double el = std::clamp(pose.elevation_deg, -89.9, 89.9) * deg;
  const double az = pose.azimuth_deg * deg;
  return pose.center +
         pose.radius * Eigen::Vector3d(std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az));
}

Camera orbit_camera(const OrbitPose& pose, const Camera& intrinsics_source) {
  require(pose.radius > 0, ErrorKind::InvalidArgument, "orbit radius must be positive");
  Camera cam = intrinsics_source;
  cam.world_to_camera = look_at(orbit_eye(pose), pose.center);
  return cam;
}

std::array<double, 16> row_major(const Eigen::Matrix4d& m) {
  std::array<double, 16> out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r * 4 + c] = m(r, c);
  return out;
}

Eigen::Matrix4d from_row_major(const std::array<double, 16>& values) {
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = values[r * 4 + c];
  return m;
}

}  // namespace igr
