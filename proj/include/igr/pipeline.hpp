#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "igr/composition.hpp"
#include "igr/dataset.hpp"
#include "igr/effects.hpp"
#include "igr/view_selection.hpp"

namespace igr {

struct PipelineConfig {
  int views = 4;               // K nearest views per target
  int reference_count = 20;    // n reference views
  double occlusion_eps = 0.0;  // 0 selects default_occlusion_eps(mesh)
  int grid = 64;
};

/// Reference views with their diffuse images (image - effects; the originals when no effects model).
struct ReferenceSet {
  std::vector<Frame> original;
  std::vector<Frame> diffuse;

  std::vector<int> ids() const;
};

ReferenceSet prepare_references(const Dataset& training, const std::vector<int>& ids, const EffectsModel* effects);

/// Everything computed for one target view, kept for debug output.
struct TargetPreparation {
  DepthMap depth;
  GBuffer gbuffer;
  SelectionResult selection;
  std::vector<WarpResult> diffuse_warps;  // warped diffuse references
  std::vector<WarpResult> warps;          // with target effects re-added on masked pixels
  Image effects;                          // empty without an effects model
  torch::Tensor input;
};

/// Target G-buffer, K nearest references, warps of their diffuse images, target effects added to each
/// warp where its mask is set, and the assembled network input.
TargetPreparation prepare_target(const Camera& camera, const DepthMap& depth, const ReferenceSet& references,
                                 const EffectsModel* effects, const Bounds& bounds, const PipelineConfig& config);

/// Precomputed composition samples for every frame of `targets`.
std::vector<CompositionSample> composition_samples(const Dataset& targets, const ReferenceSet& references,
                                                   const EffectsModel* effects, const Bounds& bounds,
                                                   const PipelineConfig& config);

struct PipelineTrainOptions {
  CompositionTrainOptions composition;
  PipelineConfig pipeline;
  std::optional<std::vector<int>> reference_ids;  // selected on the training set when absent
};

/// Reference selection on the training set (unless given), sample preparation, and composition training. The returned
/// model records the reference ids and whether effects were used.
CompositionTrainResult train_composition(const Dataset& training, const EffectsModel* effects,
                                         const TrainConfig& config, const PipelineTrainOptions& options = {});

/// Immutable state behind the renderer and the service.
struct SessionState {
  std::string name;
  int height = 0;
  int width = 0;
  ProxyMesh mesh;
  Bounds bounds;
  Camera intrinsics;  // intrinsics template for orbit requests
  std::optional<EffectsModel> effects;
  CompositionModel composition;
  ReferenceSet references;
  PipelineConfig config;
};

/// Loads the dataset, rasterizes missing depth, checks that both checkpoints agree (bounds, views,
/// effects usage) and precomputes the reference diffuse images. `effects_ckpt` may be empty when the
/// composition model was trained without effects.
SessionState load_session(const std::filesystem::path& data_root, const std::filesystem::path& effects_ckpt,
                          const std::filesystem::path& composition_ckpt);

/// Builds a session from in-memory parts.
SessionState make_session(const Dataset& dataset, std::optional<EffectsModel> effects, CompositionModel composition,
                          PipelineConfig config = {});

struct RenderRequest {
  std::optional<Camera> camera;
  std::optional<OrbitPose> orbit;
  int height = 0;  // 0 = dataset resolution
  int width = 0;
  bool debug = false;
};

/// Accepts {"orbit":{...}} or {"camera":{fx,fy,cx,cy,width,height,world_to_camera}}, "resolution":[h,w],
/// "debug":bool. Throws InvalidArgument on malformed input.
RenderRequest parse_render_request(const nlohmann::json& j);

/// The camera a request resolves to under the session's pose convention.
Camera request_camera(const SessionState& session, const RenderRequest& request);

struct RenderOutput {
  Image image;
  bool out_of_bounds = false;  // no proxy geometry in the target view
  std::optional<TargetPreparation> debug;
};

/// The full novel-view chain. Never mutates the session; identical requests give identical images.
RenderOutput render_novel_view(const SessionState& session, const RenderRequest& request);

/// Same chain for an explicit camera with a given depth map (used by evaluation).
Image render_view(const SessionState& session, const Camera& camera, const DepthMap& depth,
                  TargetPreparation* debug = nullptr);

}  // namespace igr
