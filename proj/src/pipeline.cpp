#include "igr/pipeline.hpp"

#include <algorithm>

#include "igr/error.hpp"
#include "igr/raster.hpp"
#include "igr/tensor_util.hpp"

namespace igr {
using nlohmann::json;

namespace {

double resolve_eps(const PipelineConfig& config, const Bounds& bounds) {
  return config.occlusion_eps > 0.0 ? config.occlusion_eps : 0.01 * bounds.sphere_radius();
}

bool any_depth(const DepthMap& depth) {
  return std::any_of(depth.data.begin(), depth.data.end(), [](float d) { return d > 0.0f; });
}

bool same_bounds(const Bounds& a, const Bounds& b) {
  return (a.min - b.min).cwiseAbs().maxCoeff() < 1e-9 && (a.max - b.max).cwiseAbs().maxCoeff() < 1e-9;
}

}  // namespace

std::vector<int> ReferenceSet::ids() const {
  std::vector<int> out;
  for (const auto& f : original) out.push_back(f.id);
  return out;
}

ReferenceSet prepare_references(const Dataset& training, const std::vector<int>& ids, const EffectsModel* effects) {
  ReferenceSet refs;
  for (int id : ids) {
    const Frame& f = training.frame_by_id(id);
    require(f.has_depth(), ErrorKind::InvalidArgument, "reference frame " + std::to_string(id) + " has no depth");
    refs.original.push_back(f);
    Frame d = f;
    if (effects) d.image = remove_effects(f.image, effects_forward(*effects, gbuffer_from_depth(f.camera, f.depth)));
    refs.diffuse.push_back(std::move(d));
  }
  return refs;
}

TargetPreparation prepare_target(const Camera& camera, const DepthMap& depth, const ReferenceSet& references,
                                 const EffectsModel* effects, const Bounds& bounds, const PipelineConfig& config) {
  const double eps = resolve_eps(config, bounds);
  TargetPreparation t;
  t.depth = depth;
  t.gbuffer = gbuffer_from_depth(camera, depth);
  const ViewTarget target{camera, depth};
  t.selection = select_nearest(target, references.diffuse, config.views, eps, config.grid);
  if (effects) t.effects = effects_forward(*effects, t.gbuffer);
  for (int id : t.selection.ids) {
    const auto it = std::find_if(references.diffuse.begin(), references.diffuse.end(),
                                 [id](const Frame& f) { return f.id == id; });
    WarpResult w = warp_image(*it, camera, depth, eps);
    WarpResult with_effects = w;
    if (effects) {
      for (int y = 0; y < w.color.height; ++y)
        for (int x = 0; x < w.color.width; ++x)
          if (w.mask.at(y, x))
            for (int c = 0; c < 3; ++c) with_effects.color.at(y, x, c) += t.effects.at(y, x, c);
    }
    t.diffuse_warps.push_back(std::move(w));
    t.warps.push_back(std::move(with_effects));
  }
  t.input = assemble_input(t.warps, t.gbuffer, bounds, config.views);
  return t;
}

std::vector<CompositionSample> composition_samples(const Dataset& targets, const ReferenceSet& references,
                                                   const EffectsModel* effects, const Bounds& bounds,
                                                   const PipelineConfig& config) {
  std::vector<CompositionSample> samples;
  samples.reserve(targets.frames.size());
  for (const auto& f : targets.frames) {
    require(f.has_depth(), ErrorKind::InvalidArgument, "training frame " + std::to_string(f.id) + " has no depth");
    TargetPreparation t = prepare_target(f.camera, f.depth, references, effects, bounds, config);
    samples.push_back({f.id, std::move(t.input), to_tensor(f.image)});
  }
  return samples;
}

CompositionTrainResult train_composition(const Dataset& training, const EffectsModel* effects,
                                         const TrainConfig& config, const PipelineTrainOptions& options) {
  require(training.all_depth_present(), ErrorKind::InvalidArgument, "composition training needs depth maps");
  const Bounds bounds = training.mesh.bounds();
  if (effects)
    require(same_bounds(effects->bounds, bounds), ErrorKind::ModelMismatch,
            "effects model was trained on a different mesh");
  const PipelineConfig& pc = options.pipeline;
  const double eps = resolve_eps(pc, bounds);
  const int n = std::min<int>(pc.reference_count, static_cast<int>(training.frames.size()));
  const std::vector<int> ids =
      options.reference_ids ? *options.reference_ids : select_reference_views(training, n, eps, pc.grid);
  const ReferenceSet refs = prepare_references(training, ids, effects);
  const std::vector<CompositionSample> samples = composition_samples(training, refs, effects, bounds, pc);
  CompositionModel model = CompositionModel::create(pc.views, bounds, config.seed, options.composition.generator_spec);
  model.uses_effects = effects != nullptr;
  model.reference_ids = ids;
  return train_composition(samples, std::move(model), config, options.composition);
}

SessionState make_session(const Dataset& dataset, std::optional<EffectsModel> effects, CompositionModel composition,
                          PipelineConfig config) {
  require(!dataset.frames.empty(), ErrorKind::InvalidArgument, "session needs a non-empty dataset");
  require(composition.uses_effects == effects.has_value(), ErrorKind::ModelMismatch,
          composition.uses_effects ? "composition model expects an effects checkpoint"
                                   : "composition model was trained without effects");
  if (effects)
    require(same_bounds(effects->bounds, composition.bounds), ErrorKind::ModelMismatch,
            "effects and composition checkpoints disagree on the scene bounds");
  require(static_cast<int>(composition.reference_ids.size()) >= composition.views, ErrorKind::ModelMismatch,
          "composition checkpoint lists fewer reference views than it composites");
  config.views = composition.views;
  config.reference_count = static_cast<int>(composition.reference_ids.size());
  SessionState s;
  s.name = dataset.name;
  s.height = dataset.height();
  s.width = dataset.width();
  s.mesh = dataset.mesh;
  s.bounds = composition.bounds;
  s.intrinsics = dataset.frames.front().camera;
  if (effects) effects->net->eval();
  composition.generator->eval();
  composition.discriminator->eval();
  s.references = prepare_references(dataset, composition.reference_ids, effects ? &*effects : nullptr);
  s.effects = std::move(effects);
  s.composition = std::move(composition);
  s.config = config;
  return s;
}

SessionState load_session(const std::filesystem::path& data_root, const std::filesystem::path& effects_ckpt,
                          const std::filesystem::path& composition_ckpt) {
  Dataset dataset = load_dataset(data_root);
  rasterize_missing_depth(dataset);
  validate_dataset(dataset);
  CompositionModel composition = CompositionModel::load(composition_ckpt);
  std::optional<EffectsModel> effects;
  if (composition.uses_effects) {
    require(!effects_ckpt.empty(), ErrorKind::ModelMismatch, "composition model expects an effects checkpoint");
    effects = EffectsModel::load(effects_ckpt);
  }
  return make_session(dataset, std::move(effects), std::move(composition));
}

RenderRequest parse_render_request(const json& j) {
  RenderRequest r;
  try {
    require(j.is_object(), ErrorKind::InvalidArgument, "render request must be a JSON object");
    if (j.contains("orbit")) {
      const json& o = j.at("orbit");
      OrbitPose pose;
      pose.azimuth_deg = o.at("azimuth_deg").get<double>();
      pose.elevation_deg = o.at("elevation_deg").get<double>();
      pose.radius = o.at("radius").get<double>();
      if (o.contains("center")) {
        const auto c = o.at("center").get<std::vector<double>>();
        require(c.size() == 3, ErrorKind::InvalidArgument, "orbit center needs 3 values");
        pose.center = Eigen::Vector3d(c[0], c[1], c[2]);
      }
      require(pose.radius > 0.0, ErrorKind::InvalidArgument, "orbit radius must be positive");
      r.orbit = pose;
    } else if (j.contains("camera")) {
      r.camera = camera_from_json(j.at("camera"));
    } else {
      throw Error(ErrorKind::InvalidArgument, "render request needs an orbit or a camera");
    }
    if (j.contains("resolution")) {
      const auto res = j.at("resolution").get<std::vector<int>>();
      require(res.size() == 2, ErrorKind::InvalidArgument, "resolution must be [height, width]");
      r.height = res[0];
      r.width = res[1];
    }
    r.debug = j.value("debug", false);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed render request: ") + e.what());
  }
  return r;
}

Camera request_camera(const SessionState& session, const RenderRequest& request) {
  int h = request.height, w = request.width;
  if (h == 0 || w == 0) {
    h = request.camera ? request.camera->height : session.height;
    w = request.camera ? request.camera->width : session.width;
  }
  require(h > 0 && w > 0 && h % 64 == 0 && w % 64 == 0, ErrorKind::NonDivisibleResolution,
          "render resolution " + std::to_string(h) + "x" + std::to_string(w) + " is not divisible by 64");
  if (request.camera) {
    const Camera& c = *request.camera;
    return (c.height == h && c.width == w) ? c : c.resized(h, w);
  }
  require(request.orbit.has_value(), ErrorKind::InvalidArgument, "render request needs an orbit or a camera");
  require(request.orbit->radius > 0.0, ErrorKind::InvalidArgument, "orbit radius must be positive");
  const Camera base = (session.intrinsics.height == h && session.intrinsics.width == w)
                          ? session.intrinsics
                          : session.intrinsics.resized(h, w);
  return orbit_camera(*request.orbit, base);
}

Image render_view(const SessionState& session, const Camera& camera, const DepthMap& depth,
                  TargetPreparation* debug) {
  const EffectsModel* effects = session.effects ? &*session.effects : nullptr;
  TargetPreparation t = prepare_target(camera, depth, session.references, effects, session.bounds, session.config);
  Image out = clamp01(composite_forward(session.composition, t.input));
  if (debug) *debug = std::move(t);
  return out;
}

RenderOutput render_novel_view(const SessionState& session, const RenderRequest& request) {
  const Camera camera = request_camera(session, request);
  const DepthMap depth = rasterize_depth(session.mesh, camera);
  RenderOutput out;
  if (!any_depth(depth)) {
    out.out_of_bounds = true;
    out.image = Image(camera.height, camera.width, 3, 0.0f);
    return out;
  }
  if (request.debug) {
    TargetPreparation t;
    out.image = render_view(session, camera, depth, &t);
    out.debug = std::move(t);
  } else {
    out.image = render_view(session, camera, depth);
  }
  return out;
}

}  // namespace igr
