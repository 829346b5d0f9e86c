#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "igr/error.hpp"
#include "igr/image_io.hpp"
#include "igr/raster.hpp"
#include "igr/synthetic.hpp"
#include "igr/warp.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace igr;
using test_support::make_camera;
using test_support::TempDir;
namespace fs = std::filesystem;

namespace {

template <class F>
ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an igr::Error");
  return ErrorKind::Io;
}

Dataset small_dataset(int frames, int res = 64) {
  Dataset ds;
  ds.name = "small";
  ds.mesh = make_cube(Eigen::Vector3d::Zero(), 1.0, 2);
  std::mt19937_64 rng(frames);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int i = 0; i < frames; ++i) {
    Frame f;
    f.id = i;
    const double az = 2.0 * std::numbers::pi * i / frames;
    f.camera = make_camera(res, res, 1.3 * res, Eigen::Vector3d(3 * std::sin(az), 0.7, 3 * std::cos(az)),
                           Eigen::Vector3d::Zero());
    f.image = Image(res, res, 3);
    for (auto& v : f.image.data) v = std::round(u(rng) * 255.0f) / 255.0f;
    ds.frames.push_back(std::move(f));
  }
  return ds;
}

SyntheticScene single_sphere_scene(const Eigen::Vector3d& ks, double shininess) {
  SyntheticScene s;
  s.ambient = Eigen::Vector3d::Constant(0.1);
  s.objects.push_back(sphere_object(Eigen::Vector3d::Zero(), 1.0, 48, 24,
                                    PhongMaterial{Eigen::Vector3d::Constant(0.8), ks, shininess}));
  s.lights.push_back({Light::Kind::Directional, Eigen::Vector3d(0.3, 0.9, 0.4).normalized(), Eigen::Vector3d::Ones()});
  s.camera_path.radius_min = s.camera_path.radius_max = 3.5;
  s.camera_path.frame_count = 2;
  return s;
}

// Independent shading: ray cast, barycentric interpolation on the hit triangle, Phong formula.
std::optional<Eigen::Vector3d> oracle_shade(const SyntheticScene& scene, const Camera& cam, int x, int y) {
  const SceneObject& obj = scene.objects.front();
  const ProxyMesh& m = obj.mesh;
  const Eigen::Vector3d o = cam.center();
  const Eigen::Vector3d dir = cam.ray_direction_world(x + 0.5, y + 0.5);
  const auto hit = test_support::cast_ray(m, o, dir);
  if (!hit) return std::nullopt;
  const Eigen::Vector3d p = o + hit->t * dir;
  const auto& tri = m.triangles[hit->triangle];
  const Eigen::Vector3d a = m.vertices[tri[0]], b = m.vertices[tri[1]], c = m.vertices[tri[2]];
  const double area = (b - a).cross(c - a).norm();
  const double wa = (b - p).cross(c - p).norm() / area;
  const double wb = (c - p).cross(a - p).norm() / area;
  const double wc = 1.0 - wa - wb;
  Eigen::Vector3d n = (wa * obj.normals[tri[0]] + wb * obj.normals[tri[1]] + wc * obj.normals[tri[2]]).normalized();
  const Eigen::Vector3d col = wa * m.colors[tri[0]].cast<double>() + wb * m.colors[tri[1]].cast<double>() +
                              wc * m.colors[tri[2]].cast<double>();
  const Eigen::Vector3d v = (o - p).normalized();
  if (n.dot(v) < 0) n = -n;
  const Eigen::Vector3d r = 2 * n.dot(v) * n - v;
  const Eigen::Vector3d albedo = obj.material.kd.cwiseProduct(col);
  Eigen::Vector3d rgb = scene.ambient.cwiseProduct(albedo);
  for (const Light& l : scene.lights) {
    const Eigen::Vector3d ld = l.vector.normalized();
    rgb += std::max(n.dot(ld), 0.0) * albedo.cwiseProduct(l.intensity) +
           std::pow(std::max(r.dot(ld), 0.0), obj.material.shininess) * obj.material.ks.cwiseProduct(l.intensity);
  }
  return rgb.cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace

TEST_SUITE("dataset_io") {

TEST_CASE("an empty directory is a missing-file error") {
  TempDir dir("empty");
  fs::create_directories(dir.path() / "images");
  CHECK(error_kind([&] { load_dataset(dir.path()); }) == ErrorKind::MissingFile);
  CHECK(error_kind([&] { load_dataset(dir.path() / "nope"); }) == ErrorKind::MissingFile);
}

TEST_CASE("three images without depth load as three frames with depth absent") {
  TempDir dir("three");
  Dataset ds = small_dataset(3);
  store_dataset(ds, dir.path());
  const Dataset back = load_dataset(dir.path());
  CHECK(back.frames.size() == 3);
  for (const Frame& f : back.frames) CHECK_FALSE(f.has_depth());
  CHECK_FALSE(back.all_depth_present());
  Dataset filled = back;
  rasterize_missing_depth(filled);
  CHECK(filled.all_depth_present());
}

TEST_CASE("a reflection in the rotation block is rejected") {
  TempDir dir("reflect");
  store_dataset(small_dataset(3), dir.path());
  nlohmann::json cams;
  std::ifstream(dir.path() / "cameras.json") >> cams;
  auto& m = cams["frames"][1]["world_to_camera"];
  // Negating the first row flips the determinant to -1 and keeps R^T R = I.
  for (int c = 0; c < 3; ++c) m[c] = -m[c].get<double>();
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m[i * 4 + j].get<double>();
  REQUIRE(r.determinant() == doctest::Approx(-1.0).epsilon(1e-9));
  std::ofstream(dir.path() / "cameras.json") << cams.dump();
  CHECK(error_kind([&] { load_dataset(dir.path()); }) == ErrorKind::MalformedCameras);
}

TEST_CASE("load_dataset reports count and resolution problems") {
  SUBCASE("more images than cameras") {
    TempDir dir("count");
    store_dataset(small_dataset(3), dir.path());
    fs::copy_file(dir.path() / "images" / "000000.png", dir.path() / "images" / "000009.png");
    CHECK(error_kind([&] { load_dataset(dir.path()); }) == ErrorKind::MissingFile);
  }
  SUBCASE("mixed image sizes") {
    TempDir dir("mixed");
    store_dataset(small_dataset(3), dir.path());
    write_png(Image(128, 128, 3, 0.5f), dir.path() / "images" / "000002.png");
    CHECK(error_kind([&] { load_dataset(dir.path()); }) == ErrorKind::ResolutionMismatch);
  }
  SUBCASE("resolution not divisible by 64") {
    Dataset ds = small_dataset(2);
    for (Frame& f : ds.frames) {
      f.image = Image(64, 96, 3, 0.1f);
      f.camera = make_camera(64, 96, 80, Eigen::Vector3d(0, 0, 3), Eigen::Vector3d::Zero());
    }
    CHECK(error_kind([&] { validate_dataset(ds); }) == ErrorKind::NonDivisibleResolution);
    ds.frames[0].image = Image(72, 64, 3);
    ds.frames[1].image = Image(72, 64, 3);
    CHECK(error_kind([&] { validate_dataset(ds); }) == ErrorKind::NonDivisibleResolution);
  }
  SUBCASE("degenerate mesh") {
    TempDir dir("degenerate");
    Dataset ds = small_dataset(2);
    store_dataset(ds, dir.path());
    std::ofstream(dir.path() / "mesh.obj") << "v 0 0 0\nv 1 1 1\nv 2 2 2\nf 1 2 3\n";
    CHECK(error_kind([&] { load_dataset(dir.path()); }) == ErrorKind::DegenerateMesh);
  }
}

TEST_CASE("store then load is bit-identical") {
  TempDir a("rt_a"), b("rt_b");
  Dataset ds = small_dataset(5);
  rasterize_missing_depth(ds);
  store_dataset(ds, a.path());
  const Dataset first = load_dataset(a.path());
  store_dataset(first, b.path());
  const Dataset second = load_dataset(b.path());
  REQUIRE(first.frames.size() == ds.frames.size());
  REQUIRE(second.frames.size() == ds.frames.size());
  for (std::size_t i = 0; i < ds.frames.size(); ++i) {
    CHECK(first.frames[i].camera == ds.frames[i].camera);
    CHECK(first.frames[i].image == ds.frames[i].image);
    CHECK(first.frames[i].depth == ds.frames[i].depth);
    CHECK(second.frames[i].camera == first.frames[i].camera);
    CHECK(second.frames[i].image == first.frames[i].image);
    CHECK(second.frames[i].depth == first.frames[i].depth);
  }
  CHECK(second.mesh.vertices == first.mesh.vertices);
  CHECK(second.mesh.triangles == first.mesh.triangles);
}

TEST_CASE("PNG and PFM round trips") {
  TempDir dir("codec");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Image img(64, 128, 3);
  for (auto& v : img.data) v = u(rng);
  const Image q = quantize8(img);
  for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(std::abs(q.data[i] - img.data[i]) <= 0.5f / 255.0f + 1e-7f);
  CHECK(decode_png(encode_png(img)) == q);
  write_png(img, dir.path() / "a.png");
  CHECK(read_png(dir.path() / "a.png") == q);

  DepthMap d(48, 80);
  for (auto& v : d.data) v = u(rng) < 0.2f ? 0.0f : 10.0f * u(rng);
  d.at(0, 0) = 1.25f;
  d.at(47, 0) = 7.5f;
  write_pfm(d, dir.path() / "d.pfm");
  CHECK(read_pfm(dir.path() / "d.pfm") == d);

  // Rows are stored bottom to top: the first float on disk is the bottom-left pixel.
  std::ifstream in(dir.path() / "d.pfm", std::ios::binary);
  std::string magic, dims, scale;
  std::getline(in, magic);
  std::getline(in, dims);
  std::getline(in, scale);
  CHECK(magic == "Pf");
  CHECK(std::stod(scale) < 0);
  float first = 0;
  in.read(reinterpret_cast<char*>(&first), 4);
  CHECK(first == 7.5f);
}

TEST_CASE("920 frames with 177 test frames split 743/177") {
  Dataset ds;
  ds.mesh = make_cube(Eigen::Vector3d::Zero(), 1.0, 1);
  for (int i = 0; i < 920; ++i) ds.frames.push_back(Frame{i, {}, {}, {}});
  const auto [train, test] = split_train_test(ds, 177.0 / 920.0, 3);
  CHECK(train.frames.size() == 743);
  CHECK(test.frames.size() == 177);
}

TEST_CASE("split is disjoint, complete, ordered and deterministic") {
  Dataset ds;
  ds.mesh = make_cube(Eigen::Vector3d::Zero(), 1.0, 1);
  for (int i = 0; i < 10; ++i) ds.frames.push_back(Frame{i * 3 + 1, {}, {}, {}});
  const auto [train, test] = split_train_test(ds, 0.2, 42);
  REQUIRE(train.frames.size() == 8);
  REQUIRE(test.frames.size() == 2);
  std::set<int> a, b, all;
  for (const Frame& f : train.frames) a.insert(f.id);
  for (const Frame& f : test.frames) b.insert(f.id);
  for (const Frame& f : ds.frames) all.insert(f.id);
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  CHECK(common.empty());
  std::set<int> uni = a;
  uni.insert(b.begin(), b.end());
  CHECK(uni == all);
  const std::vector<int> train_ids = train.ids(), test_ids = test.ids();
  CHECK(std::is_sorted(train_ids.begin(), train_ids.end()));
  CHECK(std::is_sorted(test_ids.begin(), test_ids.end()));

  const auto again = split_train_test(ds, 0.2, 42);
  CHECK(again.first.ids() == train.ids());
  CHECK(again.second.ids() == test.ids());
  bool differs = false;
  for (std::uint64_t s = 0; s < 20 && !differs; ++s) differs = split_train_test(ds, 0.2, s).second.ids() != test.ids();
  CHECK(differs);
  CHECK(error_kind([&] { split_train_test(ds, 0.0, 1); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { split_train_test(ds, 1.0, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("rendered shading matches a per-pixel Phong evaluation") {
  const SyntheticScene scene = single_sphere_scene(Eigen::Vector3d::Constant(0.5), 20.0);
  const Camera cam = make_camera(64, 64, 80, Eigen::Vector3d(0.5, 0.8, 3.4), Eigen::Vector3d::Zero());
  const Image img = shade_view(scene, cam);
  const DepthMap depth = rasterize_depth(scene.proxy_mesh(), cam);
  double worst = 0;
  int compared = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const auto o = oracle_shade(scene, cam, x, y);
      if (!o || depth.at(y, x) <= 0) continue;
      ++compared;
      for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs((*o)[c] - img.at(y, x, c)));
    }
  }
  CHECK(compared > 1000);
  CHECK(worst < 1e-5);
}

TEST_CASE("the specular highlight moves with the camera") {
  const SyntheticScene spec = single_sphere_scene(Eigen::Vector3d::Constant(0.6), 40.0);
  const SyntheticScene diff = single_sphere_scene(Eigen::Vector3d::Zero(), 40.0);
  auto peak = [&](const Camera& cam) {
    const Image a = shade_view(spec, cam), b = shade_view(diff, cam);
    int best = 0;
    float best_v = -1;
    for (int i = 0; i < static_cast<int>(a.pixel_count()); ++i) {
      const float s = a.data[i * 3] - b.data[i * 3];
      if (s > best_v) best_v = s, best = i;
    }
    // Highlight location as the world point under the peak pixel.
    const DepthMap d = rasterize_depth(spec.proxy_mesh(), cam);
    const int x = best % cam.width, y = best / cam.width;
    return std::pair{best_v, cam.to_world(cam.unproject(x + 0.5, y + 0.5, d.at(y, x)))};
  };
  const auto [v1, p1] = peak(make_camera(64, 64, 80, Eigen::Vector3d(0.0, 0.5, 3.5), Eigen::Vector3d::Zero()));
  const auto [v2, p2] = peak(make_camera(64, 64, 80, Eigen::Vector3d(2.5, 1.5, 2.0), Eigen::Vector3d::Zero()));
  CHECK(v1 > 0.1f);
  CHECK(v2 > 0.1f);
  CHECK((p1 - p2).norm() > 0.2);
}

TEST_CASE("Lambertian shading is equal at a point seen from two cameras at equal light angle") {
  SyntheticScene scene = single_sphere_scene(Eigen::Vector3d::Zero(), 10.0);
  scene.objects.front().mesh.colors.assign(scene.objects.front().mesh.vertices.size(), Eigen::Vector3f::Ones());
  scene.lights.front().vector = Eigen::Vector3d(0, 1, 0);
  // Mirror-image cameras about the plane x = 0 make the same angle with the light. The surface point on the
  // mirror plane at 45 degrees elevation is seen by both, so each camera's principal point is shifted to put it
  // on a pixel center.
  const Eigen::Vector3d p(0.0, std::sqrt(0.5), std::sqrt(0.5));
  auto centered = [&](const Eigen::Vector3d& eye) {
    Camera c = make_camera(64, 64, 80, eye, Eigen::Vector3d::Zero());
    const Eigen::Vector3d s = c.project_camera_point(c.to_camera(p));
    c.cx += std::floor(s.x()) + 0.5 - s.x();
    c.cy += std::floor(s.y()) + 0.5 - s.y();
    return std::pair{c, Eigen::Vector2i(static_cast<int>(std::floor(s.x())), static_cast<int>(std::floor(s.y())))};
  };
  const auto [a, pa] = centered(Eigen::Vector3d(2.0, 1.0, 2.5));
  const auto [b, pb] = centered(Eigen::Vector3d(-2.0, 1.0, 2.5));
  const ProxyMesh mesh = scene.proxy_mesh();
  // The tessellated sphere sits slightly inside the analytic one; both views still hit the same facet point.
  const DepthMap da = rasterize_depth(mesh, a), db = rasterize_depth(mesh, b);
  REQUIRE(da.at(pa.y(), pa.x()) > 0);
  REQUIRE(db.at(pb.y(), pb.x()) > 0);
  const Eigen::Vector3d wa = a.to_world(a.unproject(pa.x() + 0.5, pa.y() + 0.5, da.at(pa.y(), pa.x())));
  const Eigen::Vector3d wb = b.to_world(b.unproject(pb.x() + 0.5, pb.y() + 0.5, db.at(pb.y(), pb.x())));
  CHECK((wa - wb).norm() < 0.02);
  const Image ia = shade_view(scene, a), ib = shade_view(scene, b);
  for (int c = 0; c < 3; ++c) CHECK(std::abs(ia.at(pa.y(), pa.x(), c) - ib.at(pb.y(), pb.x(), c)) < 1e-3);

}

TEST_CASE("diffuse-only scenes are view consistent across frames") {
  // For sampled surface pixels of one frame, the second frame's principal point is shifted by the sub-pixel
  // offset of the cross-projection so the same surface point is shaded at an exact pixel center.
  const SyntheticScene scene = desk_scene(false, 120);
  const ProxyMesh mesh = scene.proxy_mesh();
  const auto path = spiral_cameras(scene.camera_path, 128, 128);
  std::mt19937_64 rng(17);
  double worst = 0;
  int compared = 0;
  for (std::size_t k = 0; k + 7 < path.size(); k += 9) {
    const Camera& a = path[k];
    const Camera& b0 = path[k + 7];
    const RasterResult ra = rasterize(mesh, a);
    const Image ia = shade_view(scene, a);
    std::vector<std::pair<int, int>> inner;
    for (int y = 1; y < 127; ++y)
      for (int x = 1; x < 127; ++x) {
        bool interior = true;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) interior = interior && ra.depth.at(y + dy, x + dx) > 0;
        if (interior) inner.emplace_back(x, y);
      }
    for (int sample = 0; sample < 12; ++sample) {
      const auto [x, y] = inner[rng() % inner.size()];
      const ScreenPoint s = cross_project_point(x + 0.5, y + 0.5, ra.depth.at(y, x), a, b0);
      const int bx = static_cast<int>(std::floor(s.u)), by = static_cast<int>(std::floor(s.v));
      if (bx < 1 || by < 1 || bx > 126 || by > 126) continue;
      Camera b = b0;
      b.cx += bx + 0.5 - s.u;
      b.cy += by + 0.5 - s.v;
      const RasterResult rb = rasterize(mesh, b);
      if (std::abs(rb.depth.at(by, bx) - s.depth) > 1e-3 * s.depth) continue;  // occluded in b
      bool b_interior = true;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) b_interior = b_interior && rb.depth.at(by + dy, bx + dx) > 0;
      if (!b_interior) continue;
      const Image ib = shade_view(scene, b);
      ++compared;
      for (int c = 0; c < 3; ++c) worst = std::max(worst, double(std::abs(ia.at(y, x, c) - ib.at(by, bx, c))));
    }
  }
  MESSAGE("worst diffuse disagreement " << worst * 255.0 << "/255 over " << compared << " points");
  CHECK(compared > 60);
  CHECK(worst <= 1.0 / 255.0);
}

TEST_CASE("synthetic depth is exact") {
  Dataset ds = render_synthetic(desk_scene(true, 4), 64, 64);
  REQUIRE(ds.frames.size() == 4);
  for (const Frame& f : ds.frames) {
    REQUIRE(f.has_depth());
    int covered = 0;
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const float d = f.depth.at(y, x);
        const double oracle = test_support::oracle_depth(ds.mesh, f.camera, x, y);
        if (d <= 0) continue;
        ++covered;
        const Eigen::Vector3d p = f.camera.to_world(f.camera.unproject(x + 0.5, y + 0.5, d));
        const Eigen::Vector3d s = f.camera.project_camera_point(f.camera.to_camera(p));
        CHECK(std::abs(s.x() - (x + 0.5)) < 1e-4);
        CHECK(std::abs(s.y() - (y + 0.5)) < 1e-4);
        if (oracle > 0) CHECK(std::abs(d - oracle) < 1e-4 * oracle);
      }
    }
    CHECK(covered > 400);
  }
}

TEST_CASE("render_synthetic produces the full camera path") {
  const Dataset ds = render_synthetic(desk_scene(true, 920), 64, 64);
  CHECK(ds.frames.size() == 920);
  CHECK(ds.source == DatasetSource::Synthetic);
  CHECK(ds.all_depth_present());
  for (int i = 0; i < 920; ++i) CHECK(ds.frames[i].id == i);
  const Dataset again = render_synthetic(desk_scene(true, 920), 64, 64);
  bool same = true;
  for (int i = 0; i < 920; ++i) same = same && again.frames[i].image == ds.frames[i].image;
  CHECK(same);
}

TEST_CASE("render_synthetic rejects bad inputs") {
  CHECK(error_kind([] { render_synthetic(desk_scene(true, 0), 64, 64); }) == ErrorKind::EmptyPath);
  CHECK(error_kind([] { render_synthetic(desk_scene(true, 2), 64, 100); }) == ErrorKind::NonDivisibleResolution);
  SyntheticScene flat = desk_scene(true, 2);
  for (auto& o : flat.objects)
    for (auto& v : o.mesh.vertices) v.z() = 0.0, v.y() = v.x();
  CHECK(error_kind([&] { render_synthetic(flat, 64, 64); }) == ErrorKind::DegenerateMesh);
}

TEST_CASE("spiral cameras look at the center and sweep height") {
  SpiralPath path;
  path.frame_count = 9;
  path.turns = 2.0;
  path.radius_min = 2.0;
  path.radius_max = 4.0;
  path.height_min = -1.0;
  path.height_max = 1.0;
  path.center = Eigen::Vector3d(0.5, 0.0, -0.5);
  const auto cams = spiral_cameras(path, 64, 64);
  REQUIRE(cams.size() == 9);
  for (std::size_t k = 0; k < cams.size(); ++k) {
    const Eigen::Vector3d c = cams[k].to_camera(path.center);
    CHECK(std::abs(c.x()) < 1e-9);
    CHECK(std::abs(c.y()) < 1e-9);
    CHECK(c.z() > 0);
    const Eigen::Vector3d eye = cams[k].center();
    CHECK(eye.y() == doctest::Approx(-1.0 + 2.0 * k / 8.0));
    const double r = std::hypot(eye.x() - path.center.x(), eye.z() - path.center.z());
    CHECK(r == doctest::Approx(2.0 + 2.0 * k / 8.0));
  }
}

TEST_CASE("scene files parse builtin and explicit scenes") {
  TempDir dir("scene");
  std::ofstream(dir.path() / "desk.json") << R"({"builtin":"desk","specular":false,"frame_count":7,"resolution":[64,128]})";
  const SceneFile desk = read_scene_file(dir.path() / "desk.json");
  CHECK(desk.scene.camera_path.frame_count == 7);
  CHECK(desk.height == 64);
  CHECK(desk.width == 128);
  for (const auto& o : desk.scene.objects) CHECK(o.material.ks.isZero());

  std::ofstream(dir.path() / "s.json") << R"({
    "name": "ball", "ambient": [0.2, 0.2, 0.2],
    "objects": [{"type": "sphere", "center": [0, 0, 0], "radius": 1.0, "ks": [0.5, 0.5, 0.5], "shininess": 30}],
    "lights": [{"type": "point", "position": [0, 4, 0], "intensity": [1, 1, 1]}],
    "camera_path": {"radius": [3, 4], "height": [0, 1], "turns": 1.5, "frame_count": 5},
    "test_fraction": 0.4, "reference_count": 3})";
  const SceneFile s = read_scene_file(dir.path() / "s.json");
  CHECK(s.scene.name == "ball");
  CHECK(s.scene.lights.front().kind == Light::Kind::Point);
  CHECK(s.scene.camera_path.radius_max == 4.0);
  CHECK(s.test_fraction == 0.4);
  CHECK(s.reference_count == 3);
  CHECK(s.scene.objects.front().material.shininess == 30.0);
  CHECK(error_kind([&] { read_scene_file(dir.path() / "missing.json"); }) == ErrorKind::MissingFile);
}

TEST_CASE("split and id files round trip") {
  TempDir dir("ids");
  const Split split{{1, 4, 9}, {2, 3}};
  write_split(split, dir.path() / "split.json");
  const Split back = read_split(dir.path() / "split.json");
  CHECK(back.train == split.train);
  CHECK(back.test == split.test);
  write_ids({5, 3, 8}, dir.path() / "r.json");
  CHECK(read_ids(dir.path() / "r.json") == std::vector<int>{5, 3, 8});
}

}  // TEST_SUITE
