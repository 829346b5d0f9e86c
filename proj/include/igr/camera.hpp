#pragma once

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace igr {

/// Pinhole camera. Pixel (i, j) has its center at continuous coordinate (i + 0.5, j + 0.5).
/// world_to_camera maps world points to a camera frame with +z forward and +y down.
struct Camera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
  Eigen::Matrix4d world_to_camera = Eigen::Matrix4d::Identity();

  Eigen::Matrix3d rotation() const { return world_to_camera.topLeftCorner<3, 3>(); }
  Eigen::Vector3d translation() const { return world_to_camera.topRightCorner<3, 1>(); }
  Eigen::Matrix3d intrinsics() const;
  Eigen::Vector3d center() const;

  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
    return rotation() * world + translation();
  }
  Eigen::Vector3d to_world(const Eigen::Vector3d& cam) const {
    return rotation().transpose() * (cam - translation());
  }

  /// Continuous pixel coordinate and z-depth of a camera-space point.
  Eigen::Vector3d project_camera_point(const Eigen::Vector3d& cam) const {
    return {fx * cam.x() / cam.z() + cx, fy * cam.y() / cam.z() + cy, cam.z()};
  }
  /// Camera-space point at z-depth d along the ray through continuous pixel (u, v).
  Eigen::Vector3d unproject(double u, double v, double d) const {
    return {(u - cx) / fx * d, (v - cy) / fy * d, d};
  }
  /// Unit ray direction in world space through continuous pixel (u, v).
  Eigen::Vector3d ray_direction_world(double u, double v) const;

  /// Same pose with intrinsics rescaled to a new resolution.
  Camera resized(int new_height, int new_width) const;

  bool operator==(const Camera&) const = default;
};

/// Throws MalformedCameras when intrinsics or the rotation block violate the camera contract.
void validate_camera(const Camera& cam);

/// Pose looking from `eye` at `target`, world up +y, camera +y down.
Eigen::Matrix4d look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                        const Eigen::Vector3d& up = Eigen::Vector3d::UnitY());

struct OrbitPose {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double radius = 1.0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
};

/// Eye position of an orbit pose: center + r (cos el sin az, sin el, cos el cos az).
/// Elevation is clamped to (-89.9, 89.9) degrees.
Eigen::Vector3d orbit_eye(const OrbitPose& pose);

/// Orbit pose to camera. Intrinsics are copied from `intrinsics_source`.
Camera orbit_camera(const OrbitPose& pose, const Camera& intrinsics_source);

std::array<double, 16> row_major(const Eigen::Matrix4d& m);
Eigen::Matrix4d from_row_major(const std::array<double, 16>& values);

}  // namespace igr
