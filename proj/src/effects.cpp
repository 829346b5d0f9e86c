#include "igr/effects.hpp"

#include <iostream>
#include <random>

#include "igr/checkpoint.hpp"
#include "igr/error.hpp"
#include "igr/tensor_util.hpp"
#include "igr/warp.hpp"

namespace igr {
using nlohmann::json;

namespace {

json bounds_json(const Bounds& b) {
  return {{"min", {b.min.x(), b.min.y(), b.min.z()}}, {"max", {b.max.x(), b.max.y(), b.max.z()}}};
}

Bounds bounds_from(const json& j) {
  const auto mn = j.at("min").get<std::vector<double>>();
  const auto mx = j.at("max").get<std::vector<double>>();
  return {Eigen::Vector3d(mn[0], mn[1], mn[2]), Eigen::Vector3d(mx[0], mx[1], mx[2])};
}

torch::Tensor stacked_input(const Camera& camera, const DepthMap& depth, const Bounds& bounds) {
  return to_tensor(stack_gbuffer(gbuffer_from_depth(camera, depth), bounds));
}

}  // namespace

EffectsModel EffectsModel::create(const UNetSpec& spec, const Bounds& bounds, std::uint64_t seed) {
  EffectsModel m{UNet(spec), bounds};
  initialize_weights(*m.net, seed);
  // Start from (almost) no effects. The data term cannot see a constant offset, so a channel that drifts
  // into saturation near 1 is held there only by the vanishing regularizer gradient.
  torch::NoGradGuard no_grad;
  m.net->named_parameters()["head.1.bias"].fill_(std::log(kInitialEffect / (1.0 - kInitialEffect)));
  return m;
}

void EffectsModel::save(Checkpoint& ckpt) const {
  ckpt.meta["kind"] = "effects";
  ckpt.meta["architecture"] = net->spec().to_json();
  ckpt.meta["bounds"] = bounds_json(bounds);
  add_module_state(ckpt, "effects.", *net.ptr());
}

EffectsModel EffectsModel::load(const Checkpoint& ckpt) {
  require(ckpt.meta.value("kind", std::string()) == "effects", ErrorKind::ModelMismatch,
          "checkpoint does not hold an effects network");
  EffectsModel m{UNet(UNetSpec::from_json(ckpt.meta.at("architecture"))), bounds_from(ckpt.meta.at("bounds"))};
  load_module_state(ckpt, "effects.", *m.net);
  return m;
}

void EffectsModel::save(const std::filesystem::path& path) const {
  Checkpoint ckpt;
  save(ckpt);
  save_checkpoint(ckpt, path);
}

EffectsModel EffectsModel::load(const std::filesystem::path& path) { return load(load_checkpoint(path)); }

Image effects_forward(const EffectsModel& model, const GBuffer& gbuffer) {
  auto net = model.net.ptr();
  const int m = net->spec().size_multiple();
  require(gbuffer.height() % m == 0 && gbuffer.width() % m == 0, ErrorKind::ShapeMismatch,
          "effects_forward: G-buffer size must be divisible by " + std::to_string(m));
  if (net->is_training()) net->eval();
  torch::NoGradGuard no_grad;
  const auto x = to_tensor(stack_gbuffer(gbuffer, model.bounds)).unsqueeze(0);
  return to_image(net->forward(x));
}

Image remove_effects(const Image& image, const Image& effects) { return subtract(image, effects); }

SiamesePair make_siamese_pair(const Frame& p, const Frame& q, torch::Tensor input_p, torch::Tensor input_q,
                              double occlusion_eps) {
  require(p.has_depth() && q.has_depth(), ErrorKind::InvalidArgument, "Siamese pair needs depth for both views");
  require(p.image.height == q.image.height && p.image.width == q.image.width, ErrorKind::ShapeMismatch,
          "Siamese pair views differ in size");
  const WarpGeometry warp = compute_warp(q.camera, q.depth, p.camera, p.depth, occlusion_eps);
  const int h = p.image.height, w = p.image.width;
  const std::int64_t n = static_cast<std::int64_t>(h) * w;
  SiamesePair s;
  s.input_p = std::move(input_p);
  s.input_q = std::move(input_q);
  s.image_p = to_tensor(p.image);
  s.image_q = to_tensor(q.image);
  s.tap_index = torch::zeros({4, n}, torch::kInt64);
  s.tap_weight = torch::zeros({4, n}, torch::kFloat32);
  s.mask = torch::zeros({n}, torch::kFloat32);
  auto idx = s.tap_index.accessor<std::int64_t, 2>();
  auto wt = s.tap_weight.accessor<float, 2>();
  auto mk = s.mask.accessor<float, 1>();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!warp.mask.at(y, x)) continue;
      const std::int64_t i = static_cast<std::int64_t>(y) * w + x;
      const BilinearTaps taps = bilinear_taps(warp.field.at(y, x, 0), warp.field.at(y, x, 1), w, h);
      for (int k = 0; k < 4; ++k) {
        idx[k][i] = taps.index[k];
        wt[k][i] = taps.weight[k];
      }
      mk[i] = 1.0f;
    }
  }
  return s;
}

SiamesePair make_siamese_pair(const Frame& p, const Frame& q, const GBuffer& gbuffer_p, const GBuffer& gbuffer_q,
                              const Bounds& bounds, double occlusion_eps) {
  return make_siamese_pair(p, q, to_tensor(stack_gbuffer(gbuffer_p, bounds)),
                           to_tensor(stack_gbuffer(gbuffer_q, bounds)), occlusion_eps);
}

torch::Tensor siamese_data_term(const SiamesePair& pair, const torch::Tensor& phi_p, const torch::Tensor& phi_q) {
  const auto dtype = phi_p.scalar_type();
  const auto c = phi_p.size(0);
  const auto diffuse_p = (pair.image_p.to(dtype) - phi_p).reshape({c, -1});
  const auto diffuse_q = (pair.image_q.to(dtype) - phi_q).reshape({c, -1});
  const auto weight = pair.tap_weight.to(dtype);
  auto warped = torch::zeros_like(diffuse_p);
  for (int k = 0; k < 4; ++k) warped = warped + weight[k] * diffuse_q.index_select(1, pair.tap_index[k]);
  const auto mask = pair.mask.to(dtype);
  const auto diff = (diffuse_p - warped) * mask;
  const auto count = mask.sum() * static_cast<double>(c);
  const auto ss = diff.pow(2).sum();
  if (count.item<double>() == 0.0 || ss.item<double>() == 0.0) return ss * 0.0;
  return torch::sqrt(ss / count);
}

SiameseLoss siamese_loss(UNet& net, std::span<const SiamesePair> batch, double reg_weight) {
  require(!batch.empty(), ErrorKind::InvalidArgument, "siamese_loss: empty batch");
  const auto dtype = net->parameters().front().scalar_type();
  std::vector<torch::Tensor> inputs;
  for (const auto& s : batch) inputs.push_back(s.input_p);
  for (const auto& s : batch) inputs.push_back(s.input_q);
  const auto out = net->forward(torch::stack(inputs).to(dtype));
  const auto b = static_cast<std::int64_t>(batch.size());
  torch::Tensor data = torch::zeros({}, out.options());
  torch::Tensor reg = torch::zeros({}, out.options());
  for (std::int64_t i = 0; i < b; ++i) {
    const auto phi_p = out[i];
    const auto phi_q = out[b + i];
    data = data + siamese_data_term(batch[static_cast<std::size_t>(i)], phi_p, phi_q);
    reg = reg + phi_p.abs().mean() + phi_q.abs().mean();
  }
  data = data / static_cast<double>(b);
  reg = reg / static_cast<double>(b);
  return {data + reg_weight * reg, data, reg};
}

EffectsTrainResult train_effects(const Dataset& training, const TrainConfig& config,
                                 const EffectsTrainOptions& options) {
  config.validate();
  require(training.frames.size() >= 2 && training.all_depth_present(), ErrorKind::InvalidArgument,
          "effects training needs at least two frames with depth");
  const double eps = default_occlusion_eps(training.mesh);
  const Bounds bounds = training.mesh.bounds();
  EffectsModel model = EffectsModel::create(options.spec.value_or(UNetSpec::effects_net()), bounds, config.seed);
  Adam adam(model.net->parameters(), config);
  int start_epoch = 0;
  LossHistory history;
  if (options.resume) {
    const Checkpoint ckpt = load_checkpoint(*options.resume);
    model = EffectsModel::load(ckpt);
    adam = Adam(model.net->parameters(), config);
    adam.load(ckpt, "effects.");
    start_epoch = ckpt.meta.at("epochs_done").get<int>();
    history = LossHistory::from_json(ckpt.meta.at("history"));
  }

  std::vector<torch::Tensor> inputs;
  inputs.reserve(training.frames.size());
  for (const auto& f : training.frames) inputs.push_back(stacked_input(f.camera, f.depth, bounds));

  const std::size_t n = training.frames.size();
  const EpochPlanner planner = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t steps = config.steps_per_epoch > 0
                                  ? static_cast<std::size_t>(config.steps_per_epoch)
                                  : (n + static_cast<std::size_t>(config.batch_size) - 1) / config.batch_size;
    std::size_t remaining = config.steps_per_epoch > 0 ? steps * config.batch_size : n;
    BatchPlan plan;
    for (std::size_t s = 0; s < steps; ++s) {
      std::vector<std::size_t> batch;
      for (int k = 0; k < config.batch_size && remaining > 0; ++k, --remaining) {
        const std::size_t p = rng() % n;
        std::size_t q = rng() % (n - 1);
        if (q >= p) ++q;
        batch.push_back(p);
        batch.push_back(q);
      }
      plan.push_back(std::move(batch));
    }
    return plan;
  };

  model.net->train();
  const StepFunction step = [&](const std::vector<std::size_t>& batch) {
    std::vector<SiamesePair> pairs;
    for (std::size_t k = 0; k + 1 < batch.size(); k += 2) {
      const Frame& p = training.frames[batch[k]];
      const Frame& q = training.frames[batch[k + 1]];
      pairs.push_back(make_siamese_pair(p, q, inputs[batch[k]], inputs[batch[k + 1]], eps));
    }
    adam.zero_grad();
    const SiameseLoss loss = siamese_loss(model.net, pairs, config.effects_reg_weight);
    loss.total.backward();
    adam.step();
    return std::vector<std::pair<std::string, double>>{{"total", loss.total.item<double>()},
                                                        {"data", loss.data.item<double>()},
                                                        {"regularizer", loss.regularizer.item<double>()}};
  };

  const EpochCallback on_epoch = [&](int epochs_done, const LossHistory& h) {
    if (options.verbose)
      std::cerr << "effects epoch " << epochs_done << "/" << config.epochs
                << " total=" << h.epoch_mean(epochs_done - 1, "total") << '\n';
    if (!options.checkpoint) return;
    Checkpoint ckpt;
    model.save(ckpt);
    adam.save(ckpt, "effects.");
    ckpt.meta["epochs_done"] = epochs_done;
    ckpt.meta["config"] = config.to_json();
    ckpt.meta["history"] = h.to_json();
    save_checkpoint(ckpt, *options.checkpoint);
  };

  history = run_epochs(planner, step, config, start_epoch, std::move(history), on_epoch);
  model.net->eval();
  return {std::move(model), std::move(history)};
}

double cross_view_residual(EffectsModel* model, const Dataset& frames,
                           std::span<const std::pair<std::size_t, std::size_t>> pairs, double occlusion_eps) {
  torch::NoGradGuard no_grad;
  const Bounds bounds = model ? model->bounds : frames.mesh.bounds();
  double acc = 0.0;
  int used = 0;
  for (const auto& [pi, qi] : pairs) {
    const Frame& p = frames.frames[pi];
    const Frame& q = frames.frames[qi];
    const SiamesePair pair = make_siamese_pair(p, q, stacked_input(p.camera, p.depth, bounds),
                                               stacked_input(q.camera, q.depth, bounds), occlusion_eps);
    if (pair.mask.sum().item<double>() == 0.0) continue;
    torch::Tensor phi_p = torch::zeros_like(pair.image_p), phi_q = torch::zeros_like(pair.image_q);
    if (model) {
      if (model->net->is_training()) model->net->eval();
      phi_p = model->net->forward(pair.input_p.unsqueeze(0))[0];
      phi_q = model->net->forward(pair.input_q.unsqueeze(0))[0];
    }
    acc += siamese_data_term(pair, phi_p, phi_q).item<double>();
    ++used;
  }
  return used ? acc / used : 0.0;
}

double mean_effect_magnitude(const EffectsModel& model, const Dataset& frames) {
  double acc = 0.0;
  for (const auto& f : frames.frames) {
    const Image e = effects_forward(model, gbuffer_from_depth(f.camera, f.depth));
    double s = 0.0;
    for (float v : e.data) s += std::abs(v);
    acc += s / static_cast<double>(e.data.size());
  }
  return frames.frames.empty() ? 0.0 : acc / static_cast<double>(frames.frames.size());
}

}  // namespace igr
