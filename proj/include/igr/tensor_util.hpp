#pragma once

#include <torch/torch.h>

#include "igr/image.hpp"

namespace igr {

/// H x W x C image to a C x H x W float tensor.
torch::Tensor to_tensor(const Image& img);
/// C x H x W (or 1 x C x H x W) tensor to an image.
Image to_image(const torch::Tensor& t);
torch::Tensor to_tensor(const Mask& mask);

/// Restores a module's buffers (batchnorm statistics) on scope exit.
class BufferFreeze {
 public:
  explicit BufferFreeze(torch::nn::Module& module);
  ~BufferFreeze();
  BufferFreeze(const BufferFreeze&) = delete;
  BufferFreeze& operator=(const BufferFreeze&) = delete;

 private:
  std::vector<torch::Tensor> live_;
  std::vector<torch::Tensor> saved_;
};

}  // namespace igr
