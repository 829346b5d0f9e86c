#include "igr/composition.hpp"

#include <iostream>

#include "igr/checkpoint.hpp"
#include "igr/error.hpp"
#include "igr/tensor_util.hpp"

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

torch::Tensor least_squares(const torch::Tensor& score, double label) { return (score - label).pow(2).mean(); }

}  // namespace

torch::Tensor assemble_input(std::span<const WarpResult> warps, const GBuffer& target_gbuffer, const Bounds& bounds,
                             int views) {
  require(static_cast<int>(warps.size()) == views, ErrorKind::CountMismatch,
          "assemble_input: expected " + std::to_string(views) + " warps, got " + std::to_string(warps.size()));
  const int h = target_gbuffer.height(), w = target_gbuffer.width();
  for (const auto& wr : warps) {
    require(wr.color.height == h && wr.color.width == w && wr.color.channels == 3 && wr.warp_field.height == h &&
                wr.warp_field.width == w && wr.warp_field.channels == 2 && wr.mask.height == h && wr.mask.width == w,
            ErrorKind::ShapeMismatch, "assemble_input: warp does not match the target size");
  }
  const Image stacked = stack_gbuffer(target_gbuffer, bounds);
  torch::Tensor out = torch::zeros({composition_channels(views), h, w}, torch::kFloat32);
  auto a = out.accessor<float, 3>();
  for (int k = 0; k < views; ++k) {
    const WarpResult& wr = warps[static_cast<std::size_t>(k)];
    const double sw = wr.source_width > 0 ? wr.source_width : wr.warp_field.width;
    const double sh = wr.source_height > 0 ? wr.source_height : wr.warp_field.height;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!wr.mask.at(y, x)) continue;
        for (int c = 0; c < 3; ++c) a[3 * k + c][y][x] = wr.color.at(y, x, c);
        a[3 * views + 2 * k][y][x] = static_cast<float>(2.0 * wr.warp_field.at(y, x, 0) / sw - 1.0);
        a[3 * views + 2 * k + 1][y][x] = static_cast<float>(2.0 * wr.warp_field.at(y, x, 1) / sh - 1.0);
      }
    }
  }
  const int base = 5 * views;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) a[base + c][y][x] = stacked.at(y, x, c);
  return out;
}

CompositionModel CompositionModel::create(int views, const Bounds& bounds, std::uint64_t seed,
                                          std::optional<UNetSpec> generator_spec) {
  require(views >= 1, ErrorKind::InvalidArgument, "composition needs at least one view");
  const UNetSpec spec = generator_spec.value_or(UNetSpec::composition_net(views));
  require(spec.input_channels == composition_channels(views), ErrorKind::ModelMismatch,
          "generator input channels do not match the view count");
  DiscriminatorSpec dspec;
  dspec.input_channels = spec.input_channels + 3;
  CompositionModel m;
  m.generator = UNet(spec);
  m.discriminator = PatchDiscriminator(dspec);
  m.bounds = bounds;
  m.views = views;
  initialize_weights(*m.generator, seed);
  initialize_weights(*m.discriminator, seed + 1);
  return m;
}

void CompositionModel::save(Checkpoint& ckpt) const {
  ckpt.meta["kind"] = "composition";
  ckpt.meta["architecture"] = generator->spec().to_json();
  ckpt.meta["discriminator"] = discriminator->spec().to_json();
  ckpt.meta["bounds"] = bounds_json(bounds);
  ckpt.meta["views"] = views;
  ckpt.meta["uses_effects"] = uses_effects;
  ckpt.meta["reference_ids"] = reference_ids;
  add_module_state(ckpt, "generator.", *generator.ptr());
  add_module_state(ckpt, "discriminator.", *discriminator.ptr());
}

CompositionModel CompositionModel::load(const Checkpoint& ckpt) {
  require(ckpt.meta.value("kind", std::string()) == "composition", ErrorKind::ModelMismatch,
          "checkpoint does not hold a composition network");
  CompositionModel m;
  m.views = ckpt.meta.at("views").get<int>();
  const UNetSpec spec = UNetSpec::from_json(ckpt.meta.at("architecture"));
  require(spec.input_channels == composition_channels(m.views), ErrorKind::ModelMismatch,
          "composition checkpoint: generator input channels do not match the view count");
  m.generator = UNet(spec);
  m.discriminator = PatchDiscriminator(DiscriminatorSpec::from_json(ckpt.meta.at("discriminator")));
  m.bounds = bounds_from(ckpt.meta.at("bounds"));
  m.uses_effects = ckpt.meta.at("uses_effects").get<bool>();
  m.reference_ids = ckpt.meta.at("reference_ids").get<std::vector<int>>();
  load_module_state(ckpt, "generator.", *m.generator);
  load_module_state(ckpt, "discriminator.", *m.discriminator);
  m.generator->eval();
  m.discriminator->eval();
  return m;
}

void CompositionModel::save(const std::filesystem::path& path) const {
  Checkpoint ckpt;
  save(ckpt);
  save_checkpoint(ckpt, path);
}

CompositionModel CompositionModel::load(const std::filesystem::path& path) { return load(load_checkpoint(path)); }

Image composite_forward(const CompositionModel& model, const torch::Tensor& input) {
  auto net = model.generator.ptr();
  const auto& spec = net->spec();
  require(input.dim() == 3 && input.size(0) == spec.input_channels, ErrorKind::ShapeMismatch,
          "composite_forward: input has " + std::to_string(input.dim() == 3 ? input.size(0) : -1) +
              " channels, network expects " + std::to_string(spec.input_channels));
  if (net->is_training()) net->eval();
  torch::NoGradGuard no_grad;
  return to_image(net->forward(input.unsqueeze(0)));
}

CompositionLoss composition_loss(PatchDiscriminator& discriminator, const torch::Tensor& input,
                                 const torch::Tensor& output, const torch::Tensor& ground_truth,
                                 const TrainConfig& config) {
  require(output.sizes() == ground_truth.sizes() && input.size(0) == output.size(0) &&
              input.size(2) == output.size(2) && input.size(3) == output.size(3),
          ErrorKind::ShapeMismatch, "composition_loss: inconsistent shapes");
  CompositionLoss loss;
  loss.l1 = (output - ground_truth).abs().mean();
  loss.adversarial = least_squares(discriminator->forward(input, output), 1.0);
  loss.generator = config.l1_weight * loss.l1 + config.adversarial_weight * loss.adversarial;
  const auto real = least_squares(discriminator->forward(input, ground_truth), 1.0);
  const auto fake = least_squares(discriminator->forward(input, output.detach()), 0.0);
  loss.discriminator = 0.5 * (real + fake);
  return loss;
}

GeneratorStepResult generator_step(CompositionModel& model, Adam& optimizer, const torch::Tensor& input,
                                   const torch::Tensor& ground_truth, const TrainConfig& config) {
  optimizer.zero_grad();
  const auto fake = model.generator->forward(input);
  const auto l1 = (fake - ground_truth).abs().mean();
  torch::Tensor adversarial = torch::zeros({}, fake.options());
  // The backward pass reads the batchnorm buffers, so they are restored only after it.
  std::optional<BufferFreeze> freeze;
  if (config.adversarial_weight > 0.0) {
    freeze.emplace(*model.discriminator);
    adversarial = least_squares(model.discriminator->forward(input, fake), 1.0);
  }
  const auto total = config.l1_weight * l1 + config.adversarial_weight * adversarial;
  total.backward();
  freeze.reset();
  for (auto& p : model.discriminator->parameters()) p.mutable_grad() = torch::Tensor();
  optimizer.step();
  return {l1.item<double>(), adversarial.item<double>(), total.item<double>(), fake.detach()};
}

double discriminator_step(CompositionModel& model, Adam& optimizer, const torch::Tensor& input,
                          const torch::Tensor& ground_truth, const torch::Tensor& fake) {
  optimizer.zero_grad();
  const auto real = least_squares(model.discriminator->forward(input, ground_truth), 1.0);
  const auto generated = least_squares(model.discriminator->forward(input, fake.detach()), 0.0);
  const auto loss = 0.5 * (real + generated);
  loss.backward();
  optimizer.step();
  return loss.item<double>();
}

CompositionTrainResult train_composition(std::span<const CompositionSample> samples, CompositionModel model,
                                         const TrainConfig& config, const CompositionTrainOptions& options) {
  config.validate();
  require(!samples.empty(), ErrorKind::InvalidArgument, "composition training needs at least one sample");
  int start_epoch = 0;
  LossHistory history;
  std::optional<Checkpoint> resumed;
  if (options.resume) {
    resumed = load_checkpoint(*options.resume);
    model = CompositionModel::load(*resumed);
    start_epoch = resumed->meta.at("epochs_done").get<int>();
    history = LossHistory::from_json(resumed->meta.at("history"));
  }
  Adam adam_g(model.generator->parameters(), config);
  Adam adam_d(model.discriminator->parameters(), config);
  if (resumed) {
    adam_g.load(*resumed, "generator.");
    adam_d.load(*resumed, "discriminator.");
  }
  const bool adversarial = config.adversarial_weight > 0.0;

  const std::size_t n = samples.size();
  const EpochPlanner planner = [&](std::uint64_t seed) {
    if (config.steps_per_epoch <= 0) return shuffled_batches(n, config.batch_size, seed);
    BatchPlan plan;
    std::uint64_t s = seed;
    while (plan.size() < static_cast<std::size_t>(config.steps_per_epoch)) {
      for (auto& b : shuffled_batches(n, config.batch_size, s)) {
        if (plan.size() == static_cast<std::size_t>(config.steps_per_epoch)) break;
        plan.push_back(std::move(b));
      }
      s = epoch_seed(s, 1);
    }
    return plan;
  };

  model.generator->train();
  model.discriminator->train();
  const StepFunction step = [&](const std::vector<std::size_t>& batch) {
    std::vector<torch::Tensor> xs, ys;
    for (auto i : batch) {
      xs.push_back(samples[i].input);
      ys.push_back(samples[i].target);
    }
    const auto x = torch::stack(xs);
    const auto y = torch::stack(ys);
    const GeneratorStepResult g = generator_step(model, adam_g, x, y, config);
    std::vector<std::pair<std::string, double>> terms{
        {"generator", g.generator}, {"l1", g.l1}, {"adversarial", g.adversarial}};
    if (adversarial) terms.emplace_back("discriminator", discriminator_step(model, adam_d, x, y, g.fake));
    return terms;
  };

  const EpochCallback on_epoch = [&](int epochs_done, const LossHistory& h) {
    if (options.verbose)
      std::cerr << "composition epoch " << epochs_done << "/" << config.epochs
                << " l1=" << h.epoch_mean(epochs_done - 1, "l1") << '\n';
    if (!options.checkpoint) return;
    Checkpoint ckpt;
    model.save(ckpt);
    adam_g.save(ckpt, "generator.");
    adam_d.save(ckpt, "discriminator.");
    ckpt.meta["epochs_done"] = epochs_done;
    ckpt.meta["config"] = config.to_json();
    ckpt.meta["history"] = h.to_json();
    save_checkpoint(ckpt, *options.checkpoint);
    model.generator->train();
    model.discriminator->train();
  };

  history = run_epochs(planner, step, config, start_epoch, std::move(history), on_epoch);
  model.generator->eval();
  model.discriminator->eval();
  return {std::move(model), std::move(history)};
}

}  // namespace igr
