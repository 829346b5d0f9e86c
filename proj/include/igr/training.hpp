#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "json.hpp"

namespace igr {

struct Checkpoint;

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 64;
  int batch_size = 4;
  std::uint64_t seed = 1;
  double adversarial_weight = 0.01;
  double l1_weight = 1.0;
  double effects_reg_weight = 0.01;
  /// Optimizer steps per epoch; 0 means one pass over the epoch's items.
  int steps_per_epoch = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct AdamState {
  std::vector<torch::Tensor> first_moment;
  std::vector<torch::Tensor> second_moment;
  std::int64_t step = 0;
};

/// Bias-corrected Adam update applied in place. Throws NonFiniteGradient (before touching anything)
/// if any gradient has a NaN or infinity. Undefined gradients count as zero.
void adam_step(std::vector<torch::Tensor>& params, const std::vector<torch::Tensor>& grads, AdamState& state,
               const TrainConfig& config);

/// Adam over a fixed parameter list, reading gradients from `.grad()`.
class Adam {
 public:
  Adam(std::vector<torch::Tensor> params, const TrainConfig& config);

  void zero_grad();
  void step();
  const AdamState& state() const { return state_; }

  void save(Checkpoint& ckpt, const std::string& prefix) const;
  void load(const Checkpoint& ckpt, const std::string& prefix);

 private:
  std::vector<torch::Tensor> params_;
  AdamState state_;
  TrainConfig config_;
};

struct LossRecord {
  int epoch = 0;
  int step = 0;
  std::vector<std::pair<std::string, double>> terms;
};

struct LossHistory {
  std::vector<LossRecord> records;

  /// CSV with columns epoch, step, then one column per loss term.
  void write_csv(const std::filesystem::path& path) const;
  double epoch_mean(int epoch, const std::string& term) const;
  nlohmann::json to_json() const;
  static LossHistory from_json(const nlohmann::json& j);
};

/// Batches of item indices making up one epoch.
using BatchPlan = std::vector<std::vector<std::size_t>>;
using EpochPlanner = std::function<BatchPlan(std::uint64_t epoch_seed)>;
using StepFunction = std::function<std::vector<std::pair<std::string, double>>(const std::vector<std::size_t>&)>;
using EpochCallback = std::function<void(int epochs_done, const LossHistory&)>;

/// Deterministic per-epoch seed derived from the run seed (splitmix64).
std::uint64_t epoch_seed(std::uint64_t seed, int epoch);

/// Shuffled pass over `count` items in batches of `batch_size` (last batch may be short).
BatchPlan shuffled_batches(std::size_t count, int batch_size, std::uint64_t seed);

/// Runs epochs [start_epoch, config.epochs). Each epoch's plan depends only on (seed, epoch), so a run
/// resumed from an epoch checkpoint replays the uninterrupted one exactly. `on_epoch_end` is the
/// checkpoint hook.
LossHistory run_epochs(const EpochPlanner& planner, const StepFunction& step, const TrainConfig& config,
                       int start_epoch = 0, LossHistory history = {}, const EpochCallback& on_epoch_end = {});

}  // namespace igr
