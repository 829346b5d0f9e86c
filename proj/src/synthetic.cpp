#include "igr/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"

#include "igr/error.hpp"
#include "igr/image_io.hpp"
#include "igr/raster.hpp"

namespace igr {
using nlohmann::json;

namespace {

Eigen::Vector3d vec3(const json& j) {
  require(j.is_array() && j.size() == 3, ErrorKind::InvalidArgument, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void check_material(const PhongMaterial& m) {
  require((m.kd.array() >= 0).all() && (m.kd.array() <= 1).all() && (m.ks.array() >= 0).all() &&
              (m.ks.array() <= 1).all(),
          ErrorKind::InvalidArgument, "kd and ks must lie in [0,1]");
  require(m.shininess > 0, ErrorKind::InvalidArgument, "shininess must be positive");
}

}  // namespace

ProxyMesh SyntheticScene::proxy_mesh() const {
  ProxyMesh out;
  for (const auto& o : objects) out.append(o.mesh);
  return out;
}

std::vector<Eigen::Vector3d> smooth_normals(const ProxyMesh& mesh) {
  std::vector<Eigen::Vector3d> n(mesh.vertices.size(), Eigen::Vector3d::Zero());
  for (const auto& t : mesh.triangles) {
    const Eigen::Vector3d f =
        (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    for (int i : t) n[i] += f;
  }
  for (auto& v : n)
    if (v.norm() > 0) v.normalize();
  return n;
}

SceneObject sphere_object(const Eigen::Vector3d& center, double radius, int slices, int stacks,
                          const PhongMaterial& material) {
  SceneObject o;
  o.mesh = make_uv_sphere(center, radius, slices, stacks);
  o.mesh.colors.assign(o.mesh.vertices.size(), Eigen::Vector3f::Ones());
  for (const auto& v : o.mesh.vertices) o.normals.push_back((v - center).normalized());
  o.material = material;
  return o;
}

SceneObject cube_object(const Eigen::Vector3d& center, double size, int subdiv, const PhongMaterial& material) {
  SceneObject o;
  o.mesh = make_cube(center, size, subdiv);
  o.mesh.colors.assign(o.mesh.vertices.size(), Eigen::Vector3f::Ones());
  o.normals = smooth_normals(o.mesh);  // faces do not share vertices, so these are face normals
  o.material = material;
  return o;
}

void apply_sine_pattern(SceneObject& object, const Eigen::Vector3f& c0, const Eigen::Vector3f& c1, double frequency) {
  for (std::size_t i = 0; i < object.mesh.vertices.size(); ++i) {
    const auto& p = object.mesh.vertices[i];
    const double s = std::sin(frequency * p.x()) * std::sin(frequency * p.y()) * std::sin(frequency * p.z());
    const float t = static_cast<float>(0.5 + 0.5 * s);
    object.mesh.colors[i] = c0 + t * (c1 - c0);
  }
}

std::vector<Camera> spiral_cameras(const SpiralPath& path, int height, int width) {
  require(path.frame_count > 0, ErrorKind::EmptyPath, "camera path has no frames");
  std::vector<Camera> cams;
  const int n = path.frame_count;
  for (int k = 0; k < n; ++k) {
    const double s = n > 1 ? static_cast<double>(k) / (n - 1) : 0.0;
    const double az = 2.0 * std::numbers::pi * path.turns * k / n;
    const double r = path.radius_min + s * (path.radius_max - path.radius_min);
    const double h = path.height_min + s * (path.height_max - path.height_min);
    const Eigen::Vector3d eye = path.center + Eigen::Vector3d(r * std::sin(az), h, r * std::cos(az));
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.fx = cam.fy = path.focal_factor * width;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    cam.world_to_camera = look_at(eye, path.center);
    cams.push_back(cam);
  }
  return cams;
}

Image shade_view(const SyntheticScene& scene, const Camera& camera) {
  require(!scene.lights.empty(), ErrorKind::InvalidArgument, "scene needs at least one light");
  const ProxyMesh mesh = scene.proxy_mesh();
  std::vector<std::size_t> owner;  // triangle -> object
  std::vector<int> vertex_offset;
  int offset = 0;
  for (std::size_t o = 0; o < scene.objects.size(); ++o) {
    check_material(scene.objects[o].material);
    owner.insert(owner.end(), scene.objects[o].mesh.triangles.size(), o);
    vertex_offset.push_back(offset);
    offset += static_cast<int>(scene.objects[o].mesh.vertices.size());
  }
  const RasterResult raster = rasterize(mesh, camera);
  const Eigen::Vector3d eye = camera.center();
  Image img(camera.height, camera.width, 3);
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      const int t = raster.triangle_at(y, x);
      if (t < 0) continue;
      const SceneObject& obj = scene.objects[owner[static_cast<std::size_t>(t)]];
      const int base = vertex_offset[owner[static_cast<std::size_t>(t)]];
      const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
      const Eigen::Vector3d& b = raster.bary_at(y, x);
      Eigen::Vector3d p = Eigen::Vector3d::Zero(), n = Eigen::Vector3d::Zero(), color = Eigen::Vector3d::Zero();
      for (int i = 0; i < 3; ++i) {
        p += b[i] * mesh.vertices[tri[i]];
        n += b[i] * obj.normals[static_cast<std::size_t>(tri[i] - base)];
        color += b[i] * mesh.colors[tri[i]].cast<double>();
      }
      n.normalize();
      const Eigen::Vector3d v = (eye - p).normalized();
      if (n.dot(v) < 0) n = -n;
      const Eigen::Vector3d r = 2.0 * n.dot(v) * n - v;
      const Eigen::Vector3d albedo = obj.material.kd.cwiseProduct(color);
      Eigen::Vector3d rgb = scene.ambient.cwiseProduct(albedo);
      for (const auto& light : scene.lights) {
        const Eigen::Vector3d l =
            light.kind == Light::Kind::Directional ? light.vector.normalized() : (light.vector - p).normalized();
        const double diffuse = std::max(n.dot(l), 0.0);
        const double spec = std::pow(std::max(r.dot(l), 0.0), obj.material.shininess);
        rgb += diffuse * albedo.cwiseProduct(light.intensity) + spec * obj.material.ks.cwiseProduct(light.intensity);
      }
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = static_cast<float>(std::clamp(rgb[c], 0.0, 1.0));
    }
  }
  return img;
}

Dataset render_synthetic(const SyntheticScene& scene, int height, int width) {
  require(height > 0 && width > 0 && height % 64 == 0 && width % 64 == 0, ErrorKind::NonDivisibleResolution,
          "synthetic resolution must be divisible by 64");
  require(scene.camera_path.frame_count > 0, ErrorKind::EmptyPath, "camera path has no frames");
  require(!scene.lights.empty(), ErrorKind::InvalidArgument, "scene needs at least one light");
  Dataset ds;
  ds.name = scene.name;
  ds.source = DatasetSource::Synthetic;
  ds.mesh = scene.proxy_mesh();
  validate_mesh(ds.mesh);
  const auto cams = spiral_cameras(scene.camera_path, height, width);
  ds.frames.resize(cams.size());
  for (std::size_t k = 0; k < cams.size(); ++k) {
    Frame& f = ds.frames[k];
    f.id = static_cast<int>(k);
    f.camera = cams[k];
    f.image = quantize8(shade_view(scene, cams[k]));
    f.depth = rasterize_depth(ds.mesh, cams[k]);
  }
  return ds;
}

SceneFile read_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::MissingFile, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, path.string() + ": " + e.what());
  }
  SceneFile file;
  if (j.value("builtin", std::string()) == "desk") {
    file.scene = desk_scene(j.value("specular", true), j.value("frame_count", 360));
  } else {
    SyntheticScene& s = file.scene;
    s.name = j.value("name", std::string("synthetic"));
    if (j.contains("ambient")) s.ambient = vec3(j["ambient"]);
    for (const auto& jo : j.at("objects")) {
      PhongMaterial m;
      if (jo.contains("kd")) m.kd = vec3(jo["kd"]);
      if (jo.contains("ks")) m.ks = vec3(jo["ks"]);
      m.shininess = jo.value("shininess", m.shininess);
      const std::string type = jo.at("type").get<std::string>();
      SceneObject o;
      if (type == "sphere") {
        o = sphere_object(vec3(jo.at("center")), jo.at("radius").get<double>(), jo.value("slices", 64),
                          jo.value("stacks", 32), m);
      } else if (type == "cube") {
        o = cube_object(vec3(jo.at("center")), jo.at("size").get<double>(), jo.value("subdiv", 8), m);
      } else if (type == "obj") {
        o.mesh = read_obj(path.parent_path() / jo.at("path").get<std::string>());
        if (!o.mesh.has_colors()) o.mesh.colors.assign(o.mesh.vertices.size(), Eigen::Vector3f::Ones());
        o.normals = smooth_normals(o.mesh);
        o.material = m;
      } else {
        throw Error(ErrorKind::InvalidArgument, "unknown object type " + type);
      }
      if (jo.contains("pattern")) {
        const auto& p = jo["pattern"];
        apply_sine_pattern(o, vec3(p.at("c0")).cast<float>(), vec3(p.at("c1")).cast<float>(),
                           p.value("frequency", 4.0));
      }
      s.objects.push_back(std::move(o));
    }
    for (const auto& jl : j.at("lights")) {
      Light l;
      l.kind = jl.value("type", std::string("directional")) == "point" ? Light::Kind::Point : Light::Kind::Directional;
      l.vector = vec3(l.kind == Light::Kind::Point ? jl.at("position") : jl.at("direction"));
      if (jl.contains("intensity")) l.intensity = vec3(jl["intensity"]);
      s.lights.push_back(l);
    }
    const auto& jp = j.at("camera_path");
    SpiralPath& p = s.camera_path;
    if (jp.contains("center")) p.center = vec3(jp["center"]);
    const auto radius = jp.value("radius", std::vector<double>{3.0, 3.0});
    const auto height = jp.value("height", std::vector<double>{0.0, 0.0});
    require(radius.size() == 2 && height.size() == 2, ErrorKind::InvalidArgument, "radius/height need two bounds");
    p.radius_min = radius[0];
    p.radius_max = radius[1];
    p.height_min = height[0];
    p.height_max = height[1];
    p.turns = jp.value("turns", 1.0);
    p.frame_count = jp.at("frame_count").get<int>();
    p.focal_factor = jp.value("focal_factor", p.focal_factor);
  }
  if (j.contains("resolution")) {
    file.height = j["resolution"].at(0).get<int>();
    file.width = j["resolution"].at(1).get<int>();
  }
  file.test_fraction = j.value("test_fraction", file.test_fraction);
  file.split_seed = j.value("split_seed", file.split_seed);
  file.reference_count = j.value("reference_count", file.reference_count);
  return file;
}

SyntheticScene desk_scene(bool specular, int frame_count) {
  SyntheticScene s;
  s.name = specular ? "desk_specular" : "desk_lambertian";
  s.ambient = Eigen::Vector3d::Constant(0.12);
  PhongMaterial sphere_mat{Eigen::Vector3d::Constant(0.62), Eigen::Vector3d::Constant(specular ? 0.4 : 0.0), 24.0};
  PhongMaterial cube_mat{Eigen::Vector3d::Constant(0.62), Eigen::Vector3d::Constant(specular ? 0.3 : 0.0), 16.0};
  SceneObject sphere = sphere_object({-0.42, 0.0, 0.0}, 0.5, 64, 32, sphere_mat);
  apply_sine_pattern(sphere, {0.95f, 0.35f, 0.25f}, {0.25f, 0.55f, 0.95f}, 5.0);
  SceneObject cube = cube_object({0.5, -0.1, 0.1}, 0.6, 10, cube_mat);
  apply_sine_pattern(cube, {0.95f, 0.85f, 0.3f}, {0.2f, 0.75f, 0.35f}, 4.0);
  s.objects.push_back(std::move(sphere));
  s.objects.push_back(std::move(cube));
  s.lights.push_back({Light::Kind::Directional, Eigen::Vector3d(0.4, 0.8, 0.55).normalized(),
                      Eigen::Vector3d::Constant(0.85)});
  s.camera_path.center = Eigen::Vector3d(0.0, 0.0, 0.0);
  s.camera_path.radius_min = 3.0;
  s.camera_path.radius_max = 3.0;
  s.camera_path.height_min = -0.4;
  s.camera_path.height_max = 1.6;
  s.camera_path.turns = 3.0;
  s.camera_path.frame_count = frame_count;
  s.camera_path.focal_factor = 1.3;
  return s;
}

}  // namespace igr
