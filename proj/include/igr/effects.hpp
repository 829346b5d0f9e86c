#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "igr/dataset.hpp"
#include "igr/gbuffer.hpp"
#include "igr/mesh.hpp"
#include "igr/training.hpp"
#include "igr/unet.hpp"

namespace igr {

struct Checkpoint;

/// View-dependent effects predictor: a U-Net over the stacked G-buffer of one view.
/// Effect value every pixel starts from: the head bias is initialized to its logit.
inline constexpr double kInitialEffect = 0.01;

struct EffectsModel {
  UNet net{nullptr};
  Bounds bounds;  // position normalization box

  static EffectsModel create(const UNetSpec& spec, const Bounds& bounds, std::uint64_t seed);

  void save(Checkpoint& ckpt) const;
  static EffectsModel load(const Checkpoint& ckpt);
  void save(const std::filesystem::path& path) const;
  static EffectsModel load(const std::filesystem::path& path);
};

/// Effects image (H x W x 3, values in (0,1)) of one view. Switches the network to eval mode.
Image effects_forward(const EffectsModel& model, const GBuffer& gbuffer);

/// image - effects, unclamped.
Image remove_effects(const Image& image, const Image& effects);

/// One Siamese training sample: view q warped into view p.
struct SiamesePair {
  torch::Tensor input_p, input_q;  // 9 x H x W
  torch::Tensor image_p, image_q;  // 3 x H x W
  torch::Tensor tap_index;         // 4 x (H*W) int64, flat pixel index into view q
  torch::Tensor tap_weight;        // 4 x (H*W), zero where the mask is 0
  torch::Tensor mask;              // H*W, mutual visibility in p's frame
};

SiamesePair make_siamese_pair(const Frame& p, const Frame& q, const GBuffer& gbuffer_p, const GBuffer& gbuffer_q,
                              const Bounds& bounds, double occlusion_eps);

/// Assembles the pair from precomputed network inputs and images (C x H x W tensors).
SiamesePair make_siamese_pair(const Frame& p, const Frame& q, torch::Tensor input_p, torch::Tensor input_q,
                              double occlusion_eps);

struct SiameseLoss {
  torch::Tensor total;
  torch::Tensor data;            // batch mean of the masked root-mean-square term
  torch::Tensor regularizer;     // batch mean of mean|phi_p| + mean|phi_q|
};

/// Per pair: sqrt(mean over masked elements of ((I_p - phi_p) - W(I_q - phi_q))^2)
///           + reg_weight * (mean|phi_p| + mean|phi_q|); averaged over the batch.
/// The data term is 0 when the mask is empty. Both towers share `net` and run as one batch.
SiameseLoss siamese_loss(UNet& net, std::span<const SiamesePair> batch, double reg_weight);

/// Same loss with the effects replaced by explicit tensors (3 x H x W each), for residual baselines.
torch::Tensor siamese_data_term(const SiamesePair& pair, const torch::Tensor& phi_p, const torch::Tensor& phi_q);

struct EffectsTrainOptions {
  std::optional<std::filesystem::path> checkpoint;  // rewritten after every epoch
  std::optional<std::filesystem::path> resume;
  std::optional<UNetSpec> spec;                    // defaults to UNetSpec::effects_net()
  bool verbose = false;
};

struct EffectsTrainResult {
  EffectsModel model;
  LossHistory history;
};

/// Self-supervised training on uniformly random frame pairs (p != q). An epoch is N pairs for N frames
/// unless config.steps_per_epoch overrides it.
EffectsTrainResult train_effects(const Dataset& training, const TrainConfig& config,
                                 const EffectsTrainOptions& options = {});

/// Mean masked cross-view residual (the data term) over explicit pairs of frame indices, with the
/// model's effects removed, or with zero effects when `model` is null. Pairs without overlap are skipped.
double cross_view_residual(EffectsModel* model, const Dataset& frames,
                           std::span<const std::pair<std::size_t, std::size_t>> pairs, double occlusion_eps);

/// Mean of the predicted effects over all pixels and channels of the given frames.
double mean_effect_magnitude(const EffectsModel& model, const Dataset& frames);

}  // namespace igr
