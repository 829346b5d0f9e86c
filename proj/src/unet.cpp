#include "igr/unet.hpp"

#include <cmath>

#include "igr/error.hpp"

namespace igr {
namespace nn = torch::nn;
using nlohmann::json;

namespace {

void push_activation(nn::Sequential& seq, Activation act, double slope) {
  if (act == Activation::LeakyReLU) {
    seq->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(slope)));
  } else {
    seq->push_back(nn::ReLU());
  }
}

const char* activation_name(Activation a) { return a == Activation::LeakyReLU ? "leaky_relu" : "relu"; }

Activation activation_from(const std::string& s) {
  if (s == "leaky_relu") return Activation::LeakyReLU;
  require(s == "relu", ErrorKind::ModelMismatch, "unknown activation " + s);
  return Activation::ReLU;
}

}  // namespace

std::vector<int> UNetSpec::decoder_channels() const {
  std::vector<int> out;
  for (int i = depth() - 1; i >= 0; --i) out.push_back(encoder_channels[i > 0 ? i - 1 : 0]);
  return out;
}

int UNetSpec::size_multiple() const {
  int m = 1;
  for (int i = 0; i < depth(); ++i) m *= stride;
  return m;
}

UNetSpec UNetSpec::effects_net(int input_channels) {
  UNetSpec s;
  s.input_channels = input_channels;
  s.encoder_channels = {32, 32, 64, 128, 256, 512};
  s.encoder_activation = Activation::ReLU;
  s.decoder_activation = Activation::ReLU;
  return s;
}

UNetSpec UNetSpec::composition_net(int views) {
  UNetSpec s;
  s.input_channels = 5 * views + 3;
  s.encoder_channels = {64, 64, 128, 128, 256, 256};
  s.encoder_activation = Activation::LeakyReLU;
  s.decoder_activation = Activation::ReLU;
  return s;
}

json UNetSpec::to_json() const {
  return {{"type", "unet"},
          {"input_channels", input_channels},
          {"output_channels", output_channels},
          {"encoder_channels", encoder_channels},
          {"decoder_channels", decoder_channels()},
          {"kernel", kernel},
          {"stride", stride},
          {"encoder_activation", activation_name(encoder_activation)},
          {"decoder_activation", activation_name(decoder_activation)},
          {"leaky_slope", leaky_slope},
          {"normalization", batch_norm ? "batch_norm" : "none"},
          {"final_activation", "sigmoid"}};
}

UNetSpec UNetSpec::from_json(const json& j) {
  require(j.value("type", std::string()) == "unet", ErrorKind::ModelMismatch, "architecture is not a U-Net");
  UNetSpec s;
  s.input_channels = j.at("input_channels").get<int>();
  s.output_channels = j.at("output_channels").get<int>();
  s.encoder_channels = j.at("encoder_channels").get<std::vector<int>>();
  s.kernel = j.at("kernel").get<int>();
  s.stride = j.at("stride").get<int>();
  s.encoder_activation = activation_from(j.at("encoder_activation").get<std::string>());
  s.decoder_activation = activation_from(j.at("decoder_activation").get<std::string>());
  s.leaky_slope = j.at("leaky_slope").get<double>();
  s.batch_norm = j.at("normalization").get<std::string>() == "batch_norm";
  return s;
}

UNetImpl::UNetImpl(UNetSpec spec) : spec_(std::move(spec)) {
  require(spec_.depth() >= 1, ErrorKind::InvalidArgument, "U-Net needs at least one encoder stage");
  const int pad = (spec_.kernel - spec_.stride) / 2;
  int in = spec_.input_channels;
  for (int i = 0; i < spec_.depth(); ++i) {
    const int out = spec_.encoder_channels[i];
    nn::Sequential stage(nn::Conv2d(nn::Conv2dOptions(in, out, spec_.kernel).stride(spec_.stride).padding(pad)));
    if (spec_.batch_norm) stage->push_back(nn::BatchNorm2d(out));
    push_activation(stage, spec_.encoder_activation, spec_.leaky_slope);
    encoder_.push_back(register_module("enc" + std::to_string(i), stage));
    in = out;
  }
  const auto dec = spec_.decoder_channels();
  for (int k = 0; k < spec_.depth(); ++k) {
    const int mirrored = spec_.depth() - 1 - k;
    const int skip = k == 0 ? 0 : spec_.encoder_channels[mirrored];
    const int cin = in + skip;
    const int out = dec[k];
    nn::Sequential stage(nn::ConvTranspose2d(
        nn::ConvTranspose2dOptions(cin, out, spec_.kernel).stride(spec_.stride).padding(pad)));
    if (spec_.batch_norm) stage->push_back(nn::BatchNorm2d(out));
    push_activation(stage, spec_.decoder_activation, spec_.leaky_slope);
    decoder_.push_back(register_module("dec" + std::to_string(k), stage));
    in = out;
  }
  // Same padding for an even kernel at stride 1: (k-1)/2 before, k/2 after.
  const int before = (spec_.kernel - 1) / 2, after = spec_.kernel / 2;
  head_ = register_module(
      "head", nn::Sequential(nn::ZeroPad2d(nn::ZeroPad2dOptions({before, after, before, after})),
                             nn::Conv2d(nn::Conv2dOptions(in, spec_.output_channels, spec_.kernel)), nn::Sigmoid()));
}

torch::Tensor UNetImpl::forward(torch::Tensor x) {
  require(x.dim() == 4 && x.size(1) == spec_.input_channels, ErrorKind::ShapeMismatch,
          "U-Net input must be N x " + std::to_string(spec_.input_channels) + " x H x W");
  require(x.size(2) % spec_.size_multiple() == 0 && x.size(3) % spec_.size_multiple() == 0, ErrorKind::ShapeMismatch,
          "U-Net input size must be divisible by " + std::to_string(spec_.size_multiple()));
  std::vector<torch::Tensor> skips;
  skips.reserve(encoder_.size());
  for (auto& stage : encoder_) {
    x = stage->forward(x);
    skips.push_back(x);
  }
  const int n = spec_.depth();
  for (int k = 0; k < n; ++k) {
    if (k > 0) x = torch::cat({x, skips[static_cast<std::size_t>(n - 1 - k)]}, 1);
    x = decoder_[static_cast<std::size_t>(k)]->forward(x);
  }
  return head_->forward(x);
}

std::pair<int, int> DiscriminatorSpec::score_map_size(int height, int width) const {
  const int pad = (kernel - 2) / 2;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    height = (height + 2 * pad - kernel) / 2 + 1;
    width = (width + 2 * pad - kernel) / 2 + 1;
  }
  return {height + 2 - kernel + 1, width + 2 - kernel + 1};
}

int DiscriminatorSpec::receptive_field() const {
  int rf = 1, jump = 1;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    rf += (kernel - 1) * jump;
    jump *= 2;
  }
  return rf + (kernel - 1) * jump;
}

json DiscriminatorSpec::to_json() const {
  return {{"type", "patch_discriminator"}, {"input_channels", input_channels}, {"channels", channels},
          {"kernel", kernel}, {"leaky_slope", leaky_slope}};
}

DiscriminatorSpec DiscriminatorSpec::from_json(const json& j) {
  require(j.value("type", std::string()) == "patch_discriminator", ErrorKind::ModelMismatch,
          "architecture is not a patch discriminator");
  DiscriminatorSpec s;
  s.input_channels = j.at("input_channels").get<int>();
  s.channels = j.at("channels").get<std::vector<int>>();
  s.kernel = j.at("kernel").get<int>();
  s.leaky_slope = j.at("leaky_slope").get<double>();
  return s;
}

PatchDiscriminatorImpl::PatchDiscriminatorImpl(DiscriminatorSpec spec) : spec_(std::move(spec)) {
  const int pad = (spec_.kernel - 2) / 2;
  nn::Sequential body;
  int in = spec_.input_channels;
  for (std::size_t i = 0; i < spec_.channels.size(); ++i) {
    const int out = spec_.channels[i];
    body->push_back(nn::Conv2d(nn::Conv2dOptions(in, out, spec_.kernel).stride(2).padding(pad)));
    if (i > 0) body->push_back(nn::BatchNorm2d(out));
    body->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(spec_.leaky_slope)));
    in = out;
  }
  body->push_back(nn::Conv2d(nn::Conv2dOptions(in, 1, spec_.kernel).stride(1).padding(1)));
  body_ = register_module("body", body);
}

torch::Tensor PatchDiscriminatorImpl::forward(torch::Tensor condition, torch::Tensor image) {
  auto x = torch::cat({condition, image}, 1);
  require(x.size(1) == spec_.input_channels, ErrorKind::ShapeMismatch, "discriminator channel count mismatch");
  return body_->forward(x);
}

void initialize_weights(torch::nn::Module& module, std::uint64_t seed) {
  torch::NoGradGuard no_grad;
  auto gen = at::detail::createCPUGenerator(seed);
  for (auto& child : module.modules(/*include_self=*/true)) {
    if (auto* conv = child->as<nn::Conv2d>()) {
      const auto& w = conv->weight;
      const double fan_in = static_cast<double>(w.size(1) * w.size(2) * w.size(3));
      const double bound = std::sqrt(1.0 / fan_in);
      conv->weight.uniform_(-bound, bound, gen);
      if (conv->bias.defined()) conv->bias.uniform_(-bound, bound, gen);
    } else if (auto* deconv = child->as<nn::ConvTranspose2d>()) {
      const auto& w = deconv->weight;  // in x out x k x k
      const double stride = static_cast<double>(deconv->options.stride()->at(0));
      const double fan_in = static_cast<double>(w.size(0)) * w.size(2) * w.size(3) / (stride * stride);
      const double bound = std::sqrt(1.0 / fan_in);
      deconv->weight.uniform_(-bound, bound, gen);
      if (deconv->bias.defined()) deconv->bias.uniform_(-bound, bound, gen);
    } else if (auto* bn = child->as<nn::BatchNorm2d>()) {
      bn->weight.fill_(1.0);
      bn->bias.zero_();
      bn->running_mean.zero_();
      bn->running_var.fill_(1.0);
      bn->num_batches_tracked.zero_();
    }
  }
}

void zero_weights(torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  for (auto& p : module.parameters()) p.zero_();
}

std::int64_t parameter_count(torch::nn::Module& module) {
  std::int64_t n = 0;
  for (const auto& p : module.parameters()) n += p.numel();
  return n;
}

std::vector<torch::Tensor> parameter_list(torch::nn::Module& module) { return module.parameters(); }

}  // namespace igr
