#include "igr/training.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>

#include "igr/checkpoint.hpp"
#include "igr/error.hpp"

namespace igr {
using nlohmann::json;

void TrainConfig::validate() const {
  require(learning_rate > 0 && beta1 > 0 && beta1 < 1 && beta2 > 0 && beta2 < 1 && epsilon > 0,
          ErrorKind::InvalidArgument, "optimizer rates must be positive (betas in (0,1))");
  require(epochs >= 0, ErrorKind::InvalidArgument, "epochs must be non-negative");
  require(batch_size >= 1, ErrorKind::InvalidArgument, "batch size must be at least 1");
  require(adversarial_weight >= 0 && l1_weight >= 0 && effects_reg_weight >= 0, ErrorKind::InvalidArgument,
          "loss weights must be non-negative");
  require(steps_per_epoch >= 0, ErrorKind::InvalidArgument, "steps_per_epoch must be non-negative");
}

json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate}, {"beta1", beta1},
          {"beta2", beta2},                 {"epsilon", epsilon},
          {"epochs", epochs},               {"batch_size", batch_size},
          {"seed", seed},                   {"adversarial_weight", adversarial_weight},
          {"l1_weight", l1_weight},         {"effects_reg_weight", effects_reg_weight},
          {"steps_per_epoch", steps_per_epoch}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.adversarial_weight = j.value("adversarial_weight", c.adversarial_weight);
  c.l1_weight = j.value("l1_weight", c.l1_weight);
  c.effects_reg_weight = j.value("effects_reg_weight", c.effects_reg_weight);
  c.steps_per_epoch = j.value("steps_per_epoch", c.steps_per_epoch);
  return c;
}

void adam_step(std::vector<torch::Tensor>& params, const std::vector<torch::Tensor>& grads, AdamState& state,
               const TrainConfig& config) {
  require(params.size() == grads.size(), ErrorKind::ShapeMismatch, "adam_step: one gradient per parameter");
  torch::NoGradGuard no_grad;
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.push_back(torch::zeros_like(p));
      state.second_moment.push_back(torch::zeros_like(p));
    }
  }
  require(state.first_moment.size() == params.size(), ErrorKind::ShapeMismatch, "adam_step: state size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!grads[i].defined()) continue;
    require(grads[i].sizes() == params[i].sizes(), ErrorKind::ShapeMismatch, "adam_step: gradient shape mismatch");
    require(torch::isfinite(grads[i]).all().item<bool>(), ErrorKind::NonFiniteGradient,
            "non-finite gradient in parameter " + std::to_string(i) + " at step " + std::to_string(state.step + 1));
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!grads[i].defined()) continue;
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    m.mul_(config.beta1).add_(grads[i], 1.0 - config.beta1);
    v.mul_(config.beta2).addcmul_(grads[i], grads[i], 1.0 - config.beta2);
    const auto denom = (v / bc2).sqrt_().add_(config.epsilon);
    params[i].addcdiv_(m, denom, -config.learning_rate / bc1);
  }
}

Adam::Adam(std::vector<torch::Tensor> params, const TrainConfig& config)
    : params_(std::move(params)), config_(config) {
  config_.validate();
}

void Adam::zero_grad() {
  for (auto& p : params_)
    if (p.grad().defined()) p.mutable_grad() = torch::Tensor();
}

void Adam::step() {
  std::vector<torch::Tensor> grads;
  grads.reserve(params_.size());
  for (const auto& p : params_) grads.push_back(p.grad());
  adam_step(params_, grads, state_, config_);
}

void Adam::save(Checkpoint& ckpt, const std::string& prefix) const {
  ckpt.meta[prefix + "adam_step"] = state_.step;
  for (std::size_t i = 0; i < state_.first_moment.size(); ++i) {
    ckpt.add(prefix + "adam.m." + std::to_string(i), state_.first_moment[i]);
    ckpt.add(prefix + "adam.v." + std::to_string(i), state_.second_moment[i]);
  }
}

void Adam::load(const Checkpoint& ckpt, const std::string& prefix) {
  state_ = AdamState{};
  state_.step = ckpt.meta.value(prefix + "adam_step", std::int64_t{0});
  if (state_.step == 0) return;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& m = ckpt.get(prefix + "adam.m." + std::to_string(i));
    const auto& v = ckpt.get(prefix + "adam.v." + std::to_string(i));
    require(m.sizes() == params_[i].sizes(), ErrorKind::ModelMismatch, "optimizer state shape mismatch");
    state_.first_moment.push_back(m.clone());
    state_.second_moment.push_back(v.clone());
  }
}

void LossHistory::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out << "epoch,step";
  if (!records.empty())
    for (const auto& [name, value] : records.front().terms) out << ',' << name;
  out << '\n' << std::setprecision(9);
  for (const auto& r : records) {
    out << r.epoch << ',' << r.step;
    for (const auto& [name, value] : r.terms) out << ',' << value;
    out << '\n';
  }
}

double LossHistory::epoch_mean(int epoch, const std::string& term) const {
  double acc = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (r.epoch != epoch) continue;
    for (const auto& [name, value] : r.terms)
      if (name == term) {
        acc += value;
        ++n;
      }
  }
  return n ? acc / n : std::nan("");
}

json LossHistory::to_json() const {
  json arr = json::array();
  for (const auto& r : records) {
    json terms = json::array();
    for (const auto& [name, value] : r.terms) terms.push_back({name, value});
    arr.push_back({{"epoch", r.epoch}, {"step", r.step}, {"terms", terms}});
  }
  return arr;
}

LossHistory LossHistory::from_json(const json& j) {
  LossHistory h;
  for (const auto& e : j) {
    LossRecord r;
    r.epoch = e.at("epoch").get<int>();
    r.step = e.at("step").get<int>();
    for (const auto& t : e.at("terms")) r.terms.emplace_back(t.at(0).get<std::string>(), t.at(1).get<double>());
    h.records.push_back(std::move(r));
  }
  return h;
}

std::uint64_t epoch_seed(std::uint64_t seed, int epoch) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(epoch + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

BatchPlan shuffled_batches(std::size_t count, int batch_size, std::uint64_t seed) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  BatchPlan plan;
  for (std::size_t i = 0; i < count; i += static_cast<std::size_t>(batch_size))
    plan.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                      order.begin() + static_cast<std::ptrdiff_t>(std::min(count, i + batch_size)));
  return plan;
}

LossHistory run_epochs(const EpochPlanner& planner, const StepFunction& step, const TrainConfig& config,
                       int start_epoch, LossHistory history, const EpochCallback& on_epoch_end) {
  config.validate();
  for (int epoch = start_epoch; epoch < config.epochs; ++epoch) {
    const BatchPlan plan = planner(epoch_seed(config.seed, epoch));
    int s = 0;
    for (const auto& batch : plan) history.records.push_back({epoch, s++, step(batch)});
    if (on_epoch_end) on_epoch_end(epoch + 1, history);
  }
  return history;
}

}  // namespace igr
