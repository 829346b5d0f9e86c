#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <torch/torch.h>

#include "igr/gbuffer.hpp"
#include "igr/mesh.hpp"
#include "igr/training.hpp"
#include "igr/unet.hpp"
#include "igr/warp.hpp"

namespace igr {

struct Checkpoint;

/// Channel layout of the compositing network input: K colors, K warp fields, the target position map.
constexpr int composition_channels(int views) { return 3 * views + 2 * views + 3; }

/// Stacks warped colors (selection order), their warp fields mapped to [-1, 1] by the source image size,
/// and the target position map normalized to `bounds`. Masked-out color and field entries are 0, as are
/// positions of invalid target pixels. Result: composition_channels(K) x H x W.
torch::Tensor assemble_input(std::span<const WarpResult> warps, const GBuffer& target_gbuffer, const Bounds& bounds,
                             int views);

/// Generator (U-Net) and conditional patch discriminator of the compositing stage.
struct CompositionModel {
  UNet generator{nullptr};
  PatchDiscriminator discriminator{nullptr};
  Bounds bounds;
  int views = 4;
  bool uses_effects = true;
  std::vector<int> reference_ids;

  static CompositionModel create(int views, const Bounds& bounds, std::uint64_t seed,
                                 std::optional<UNetSpec> generator_spec = std::nullopt);

  void save(Checkpoint& ckpt) const;
  static CompositionModel load(const Checkpoint& ckpt);
  void save(const std::filesystem::path& path) const;
  static CompositionModel load(const std::filesystem::path& path);
};

/// Composited image (H x W x 3 in (0,1)) from one assembled input; the generator must be in eval mode
/// (it is switched if not).
Image composite_forward(const CompositionModel& model, const torch::Tensor& input);

struct CompositionLoss {
  torch::Tensor generator;      // l1_weight * L1 + adversarial_weight * adversarial
  torch::Tensor discriminator;  // 0.5 * (real term + fake term)
  torch::Tensor l1;
  torch::Tensor adversarial;
};

/// Least-squares conditional patch objective on a batch (B x C x H x W input, B x 3 x H x W images):
///   generator     = l1_w * mean|G(x) - y| + adv_w * mean((D(x, G(x)) - 1)^2)
///   discriminator = 0.5 * (mean((D(x, y) - 1)^2) + mean(D(x, G(x))^2))
/// `output` is G(x); the discriminator term sees it detached, so each loss reaches only its own network.
CompositionLoss composition_loss(PatchDiscriminator& discriminator, const torch::Tensor& input,
                                 const torch::Tensor& output, const torch::Tensor& ground_truth,
                                 const TrainConfig& config);

/// One generator update. Discriminator parameters and batchnorm statistics are left untouched.
/// Returns the loss terms (l1, adversarial, generator) and the generated batch (detached).
struct GeneratorStepResult {
  double l1 = 0.0;
  double adversarial = 0.0;
  double generator = 0.0;
  torch::Tensor fake;
};
GeneratorStepResult generator_step(CompositionModel& model, Adam& optimizer, const torch::Tensor& input,
                                   const torch::Tensor& ground_truth, const TrainConfig& config);

/// One discriminator update on (input, ground truth) vs (input, fake). Generator state is untouched.
double discriminator_step(CompositionModel& model, Adam& optimizer, const torch::Tensor& input,
                          const torch::Tensor& ground_truth, const torch::Tensor& fake);

/// A precomputed training sample: assembled input and ground-truth image (C x H x W tensors).
struct CompositionSample {
  int frame_id = 0;
  torch::Tensor input;
  torch::Tensor target;
};

struct CompositionTrainOptions {
  std::optional<std::filesystem::path> checkpoint;  // rewritten after every epoch
  std::optional<std::filesystem::path> resume;
  std::optional<UNetSpec> generator_spec;          // defaults to UNetSpec::composition_net(views)
  bool verbose = false;
};

struct CompositionTrainResult {
  CompositionModel model;
  LossHistory history;
};

/// Alternating generator / discriminator training; an epoch is one shuffled pass over the samples
/// unless config.steps_per_epoch is set. `model` supplies bounds, views and bookkeeping fields.
CompositionTrainResult train_composition(std::span<const CompositionSample> samples, CompositionModel model,
                                         const TrainConfig& config, const CompositionTrainOptions& options = {});

}  // namespace igr
