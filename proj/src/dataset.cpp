#include "igr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "json.hpp"

#include "igr/error.hpp"
#include "igr/image_io.hpp"
#include "igr/raster.hpp"

namespace igr {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_name(int id, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d.%s", id, ext);
  return buf;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::MissingFile, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, path.string() + ": " + e.what());
  }
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(1) << '\n';
}

}  // namespace

Camera camera_from_json(const json& j) {
  Camera cam;
  try {
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    const auto values = j.at("world_to_camera").get<std::vector<double>>();
    require(values.size() == 16, ErrorKind::MalformedCameras, "world_to_camera needs 16 values");
    std::array<double, 16> a{};
    std::copy(values.begin(), values.end(), a.begin());
    cam.world_to_camera = from_row_major(a);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedCameras, e.what());
  }
  validate_camera(cam);
  return cam;
}

json camera_to_json(const Camera& cam, int id) {
  const auto m = row_major(cam.world_to_camera);
  return {{"id", id},          {"fx", cam.fx},
          {"fy", cam.fy},      {"cx", cam.cx},
          {"cy", cam.cy},      {"width", cam.width},
          {"height", cam.height}, {"world_to_camera", std::vector<double>(m.begin(), m.end())}};
}

bool Dataset::all_depth_present() const {
  return std::all_of(frames.begin(), frames.end(), [](const Frame& f) { return f.has_depth(); });
}

const Frame& Dataset::frame_by_id(int id) const {
  auto it = std::lower_bound(frames.begin(), frames.end(), id, [](const Frame& f, int v) { return f.id < v; });
  require(it != frames.end() && it->id == id, ErrorKind::InvalidArgument, "unknown frame id " + std::to_string(id));
  return *it;
}

std::vector<int> Dataset::ids() const {
  std::vector<int> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.id);
  return out;
}

void validate_dataset(const Dataset& ds) {
  require(!ds.frames.empty(), ErrorKind::MissingFile, "dataset has no frames");
  const int h = ds.height(), w = ds.width();
  require(h % 64 == 0 && w % 64 == 0 && h > 0 && w > 0, ErrorKind::NonDivisibleResolution,
          "resolution must be divisible by 64, got " + std::to_string(h) + "x" + std::to_string(w));
  for (const auto& f : ds.frames) {
    require(f.image.height == h && f.image.width == w && f.image.channels == 3, ErrorKind::ResolutionMismatch,
            "frame " + std::to_string(f.id) + " has a different resolution");
    require(f.camera.height == h && f.camera.width == w, ErrorKind::ResolutionMismatch,
            "camera of frame " + std::to_string(f.id) + " disagrees with its image size");
    require(f.depth.empty() || (f.depth.height == h && f.depth.width == w), ErrorKind::ResolutionMismatch,
            "depth of frame " + std::to_string(f.id) + " has a different resolution");
  }
}

Dataset load_dataset(const fs::path& root) {
  const fs::path images_dir = root / "images";
  std::size_t image_count = 0;
  if (fs::is_directory(images_dir))
    for (const auto& e : fs::directory_iterator(images_dir)) image_count += e.path().extension() == ".png";
  require(image_count > 0, ErrorKind::MissingFile, "no images under " + images_dir.string());
  require(fs::exists(root / "cameras.json"), ErrorKind::MissingFile, "missing cameras.json");
  require(fs::exists(root / "mesh.obj"), ErrorKind::MissingFile, "missing mesh.obj");

  const json cams = read_json(root / "cameras.json");
  require(cams.contains("frames") && cams["frames"].is_array(), ErrorKind::MalformedCameras,
          "cameras.json needs a frames array");
  std::map<int, Camera> by_id;
  for (const auto& jf : cams["frames"]) {
    const int id = jf.at("id").get<int>();
    require(!by_id.count(id), ErrorKind::MalformedCameras, "duplicate frame id " + std::to_string(id));
    by_id.emplace(id, camera_from_json(jf));
  }
  require(by_id.size() == image_count, ErrorKind::MissingFile,
          "image count " + std::to_string(image_count) + " differs from camera count " + std::to_string(by_id.size()));

  Dataset ds;
  ds.name = root.filename().string();
  ds.source = DatasetSource::Ingested;
  if (fs::exists(root / "meta.json")) {
    const json meta = read_json(root / "meta.json");
    ds.name = meta.value("name", ds.name);
    ds.source = meta.value("source", std::string("ingested")) == "synthetic" ? DatasetSource::Synthetic
                                                                            : DatasetSource::Ingested;
  }
  ds.mesh = read_obj(root / "mesh.obj");
  validate_mesh(ds.mesh);
  for (const auto& [id, cam] : by_id) {
    Frame f;
    f.id = id;
    f.camera = cam;
    const fs::path img_path = images_dir / frame_name(id, "png");
    require(fs::exists(img_path), ErrorKind::MissingFile, "missing " + img_path.string());
    f.image = read_png(img_path);
    const fs::path depth_path = root / "depth" / frame_name(id, "pfm");
    if (fs::exists(depth_path)) f.depth = read_pfm(depth_path);
    ds.frames.push_back(std::move(f));
  }
  validate_dataset(ds);
  return ds;
}

void store_dataset(const Dataset& ds, const fs::path& root) {
  validate_dataset(ds);
  fs::create_directories(root / "images");
  json frames = json::array();
  bool any_depth = false;
  for (const auto& f : ds.frames) {
    frames.push_back(camera_to_json(f.camera, f.id));
    write_png(f.image, root / "images" / frame_name(f.id, "png"));
    any_depth = any_depth || f.has_depth();
  }
  if (any_depth) {
    fs::create_directories(root / "depth");
    for (const auto& f : ds.frames)
      if (f.has_depth()) write_pfm(f.depth, root / "depth" / frame_name(f.id, "pfm"));
  }
  write_json({{"frames", frames}}, root / "cameras.json");
  write_json({{"name", ds.name}, {"source", ds.source == DatasetSource::Synthetic ? "synthetic" : "ingested"}},
             root / "meta.json");
  write_obj(ds.mesh, root / "mesh.obj");
}

void rasterize_missing_depth(Dataset& ds) {
  for (auto& f : ds.frames)
    if (!f.has_depth()) f.depth = rasterize_depth(ds.mesh, f.camera);
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  require(test_fraction > 0.0 && test_fraction < 1.0, ErrorKind::InvalidArgument, "test_fraction must be in (0,1)");
  const std::size_t n = ds.frames.size();
  require(n >= 2, ErrorKind::InvalidArgument, "need at least two frames to split");
  std::size_t n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

  Dataset train, test;
  for (Dataset* d : {&train, &test}) {
    d->name = ds.name;
    d->source = ds.source;
    d->mesh = ds.mesh;
  }
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? test : train).frames.push_back(ds.frames[i]);
  return {std::move(train), std::move(test)};
}

Dataset subset(const Dataset& ds, const std::vector<int>& ids) {
  std::set<int> wanted(ids.begin(), ids.end());
  Dataset out;
  out.name = ds.name;
  out.source = ds.source;
  out.mesh = ds.mesh;
  for (const auto& f : ds.frames)
    if (wanted.count(f.id)) out.frames.push_back(f);
  require(out.frames.size() == wanted.size(), ErrorKind::InvalidArgument, "subset: unknown frame id");
  return out;
}

double default_occlusion_eps(const ProxyMesh& mesh) { return 0.01 * mesh.bounds().sphere_radius(); }

void write_split(const Split& split, const fs::path& path) {
  write_json({{"train", split.train}, {"test", split.test}}, path);
}

Split read_split(const fs::path& path) {
  const json j = read_json(path);
  return {j.at("train").get<std::vector<int>>(), j.at("test").get<std::vector<int>>()};
}

void write_ids(const std::vector<int>& ids, const fs::path& path) { write_json({{"ids", ids}}, path); }

std::vector<int> read_ids(const fs::path& path) { return read_json(path).at("ids").get<std::vector<int>>(); }

}  // namespace igr
