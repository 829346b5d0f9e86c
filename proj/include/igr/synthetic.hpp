#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "igr/camera.hpp"
#include "igr/dataset.hpp"
#include "igr/mesh.hpp"

namespace igr {

struct PhongMaterial {
  Eigen::Vector3d kd = Eigen::Vector3d::Constant(0.8);
  Eigen::Vector3d ks = Eigen::Vector3d::Zero();
  double shininess = 16.0;
};

struct Light {
  enum class Kind { Directional, Point };
  Kind kind = Kind::Directional;
  Eigen::Vector3d vector = Eigen::Vector3d(0, 1, 0);  // direction towards the light, or its position
  Eigen::Vector3d intensity = Eigen::Vector3d::Ones();
};

/// One object of the scene: geometry with per-vertex albedo modulation and shading normals.
struct SceneObject {
  ProxyMesh mesh;  // colors are always present (white by default)
  std::vector<Eigen::Vector3d> normals;  // one per vertex
  PhongMaterial material;
};

/// Helical camera path around `center`, always looking at it.
struct SpiralPath {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius_min = 3.0, radius_max = 3.0;
  double height_min = 0.0, height_max = 0.0;
  double turns = 1.0;
  int frame_count = 0;
  double focal_factor = 1.4;  // fx = fy = focal_factor * width
};

struct SyntheticScene {
  std::string name = "synthetic";
  std::vector<SceneObject> objects;
  Eigen::Vector3d ambient = Eigen::Vector3d::Constant(0.1);
  std::vector<Light> lights;
  SpiralPath camera_path;

  /// All objects merged into one proxy mesh (with per-vertex colors).
  ProxyMesh proxy_mesh() const;
};

/// Object helpers; `normals` are analytic for spheres and per-face for cubes.
SceneObject sphere_object(const Eigen::Vector3d& center, double radius, int slices, int stacks,
                          const PhongMaterial& material);
SceneObject cube_object(const Eigen::Vector3d& center, double size, int subdiv, const PhongMaterial& material);

/// Per-vertex colors c0 + (c1 - c0) * (0.5 + 0.5 sin(f x) sin(f y) sin(f z)).
void apply_sine_pattern(SceneObject& object, const Eigen::Vector3f& c0, const Eigen::Vector3f& c1, double frequency);

/// Per-vertex normals by area-weighted face averaging.
std::vector<Eigen::Vector3d> smooth_normals(const ProxyMesh& mesh);

std::vector<Camera> spiral_cameras(const SpiralPath& path, int height, int width);

/// Shaded color of one view, unquantized: ambient * albedo + sum over lights of
/// albedo max(n.l, 0) I + ks max(r.l, 0)^shininess I, clamped to [0,1]. albedo = kd * vertex color.
Image shade_view(const SyntheticScene& scene, const Camera& camera);

/// Renders the whole spiral. Images are quantized to 8 bits so the result survives a store/load round trip.
Dataset render_synthetic(const SyntheticScene& scene, int height, int width);

/// Scene description file used by `prepare --synthetic`.
struct SceneFile {
  SyntheticScene scene;
  int height = 128;
  int width = 128;
  double test_fraction = 1.0 / 6.0;
  std::uint64_t split_seed = 7;
  int reference_count = 20;
};

SceneFile read_scene_file(const std::filesystem::path& path);

/// Built-in scene: a textured sphere next to a textured cube under one directional light.
/// `specular` = false gives the Lambertian variant (ks = 0).
SyntheticScene desk_scene(bool specular, int frame_count);

}  // namespace igr
