#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "json.hpp"

namespace igr {

enum class Activation { ReLU, LeakyReLU };

/// Encoder-decoder with skip connections. Encoder stage i: conv(k, stride) -> [batchnorm] -> act.
/// Decoder stage mirroring encoder stage i: transposed conv(k, stride) producing the channel count of
/// encoder stage i - 1 (stage 0 for the outermost one), then [batchnorm] -> act; its input is the
/// previous decoder output concatenated with encoder stage i's output (except at the bottleneck).
/// The head is a k x k stride-1 convolution (same padding) followed by a sigmoid.
struct UNetSpec {
  int input_channels = 9;
  int output_channels = 3;
  std::vector<int> encoder_channels;
  int kernel = 4;
  int stride = 2;
  Activation encoder_activation = Activation::ReLU;
  Activation decoder_activation = Activation::ReLU;
  double leaky_slope = 0.2;
  bool batch_norm = true;

  int depth() const { return static_cast<int>(encoder_channels.size()); }
  /// Output channels of decoder stages, bottleneck first.
  std::vector<int> decoder_channels() const;
  /// Spatial size must be divisible by stride^depth.
  int size_multiple() const;

  static UNetSpec effects_net(int input_channels = 9);
  static UNetSpec composition_net(int views = 4);

  nlohmann::json to_json() const;
  static UNetSpec from_json(const nlohmann::json& j);
  bool operator==(const UNetSpec&) const = default;
};

class UNetImpl : public torch::nn::Module {
 public:
  explicit UNetImpl(UNetSpec spec);
  torch::Tensor forward(torch::Tensor x);
  const UNetSpec& spec() const { return spec_; }

 private:
  UNetSpec spec_;
  std::vector<torch::nn::Sequential> encoder_;
  std::vector<torch::nn::Sequential> decoder_;
  torch::nn::Sequential head_{nullptr};
};
TORCH_MODULE(UNet);

/// Conditional patch discriminator: stride-2 conv layers (batchnorm on all but the first,
/// leaky ReLU 0.2) and a final 1-channel k x k stride-1 convolution with padding 1.
struct DiscriminatorSpec {
  int input_channels = 26;  // condition channels + 3 image channels
  std::vector<int> channels{64, 128, 256, 512};
  int kernel = 4;
  double leaky_slope = 0.2;

  /// Score-map size for an input of the given spatial size.
  std::pair<int, int> score_map_size(int height, int width) const;
  int receptive_field() const;

  nlohmann::json to_json() const;
  static DiscriminatorSpec from_json(const nlohmann::json& j);
  bool operator==(const DiscriminatorSpec&) const = default;
};

class PatchDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit PatchDiscriminatorImpl(DiscriminatorSpec spec);
  torch::Tensor forward(torch::Tensor condition, torch::Tensor image);
  const DiscriminatorSpec& spec() const { return spec_; }

 private:
  DiscriminatorSpec spec_;
  torch::nn::Sequential body_{nullptr};
};
TORCH_MODULE(PatchDiscriminator);

/// Weights and biases uniform in +-sqrt(1 / fan_in), fan_in = number of input values feeding one
/// output (in * k^2 for convolutions, in * (k / stride)^2 for transposed ones); batchnorm scale 1, shift 0.
void initialize_weights(torch::nn::Module& module, std::uint64_t seed);

/// Sets every parameter to zero (batchnorm scale included).
void zero_weights(torch::nn::Module& module);

std::int64_t parameter_count(torch::nn::Module& module);

/// Parameters in registration order.
std::vector<torch::Tensor> parameter_list(torch::nn::Module& module);

}  // namespace igr
