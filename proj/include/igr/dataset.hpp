#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "igr/frame.hpp"
#include "igr/mesh.hpp"

namespace igr {

enum class DatasetSource { Synthetic, Ingested };

struct Dataset {
  std::string name;
  DatasetSource source = DatasetSource::Ingested;
  std::vector<Frame> frames;  // ordered by id
  ProxyMesh mesh;

  int height() const { return frames.empty() ? 0 : frames.front().image.height; }
  int width() const { return frames.empty() ? 0 : frames.front().image.width; }
  bool all_depth_present() const;
  const Frame& frame_by_id(int id) const;
  std::vector<int> ids() const;
};

/// Reads root/cameras.json, root/mesh.obj, root/images/%06d.png and optional root/depth/%06d.pfm.
/// Frames without a depth file keep an empty depth map (see rasterize_missing_depth).
Dataset load_dataset(const std::filesystem::path& root);

/// Writes the same layout. Depth maps are written for frames that have one.
void store_dataset(const Dataset& dataset, const std::filesystem::path& root);

/// Fills absent depth maps by rasterizing the proxy mesh.
void rasterize_missing_depth(Dataset& dataset);

/// Checks uniform resolution, divisibility by 64 and camera/image agreement.
void validate_dataset(const Dataset& dataset);

/// One cameras.json entry. Parsing validates the camera and throws MalformedCameras.
Camera camera_from_json(const nlohmann::json& j);
nlohmann::json camera_to_json(const Camera& camera, int id);

/// Uniform random split; the test set has round(test_fraction * N) frames (at least 1, at most N - 1).
/// Both halves keep the input frame order.
std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset, double test_fraction, std::uint64_t seed);

/// Frames with the given ids, in id order of the input.
Dataset subset(const Dataset& dataset, const std::vector<int>& ids);

/// Occlusion tolerance used across the pipeline: 1% of the mesh bounding-sphere radius.
double default_occlusion_eps(const ProxyMesh& mesh);

struct Split {
  std::vector<int> train;
  std::vector<int> test;
};

void write_split(const Split& split, const std::filesystem::path& path);
Split read_split(const std::filesystem::path& path);
void write_ids(const std::vector<int>& ids, const std::filesystem::path& path);
std::vector<int> read_ids(const std::filesystem::path& path);

}  // namespace igr
