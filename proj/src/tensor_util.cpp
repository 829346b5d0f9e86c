#include "igr/tensor_util.hpp"

#include <cstring>

#include "igr/error.hpp"

namespace igr {

torch::Tensor to_tensor(const Image& img) {
  auto t = torch::from_blob(const_cast<float*>(img.data.data()), {img.height, img.width, img.channels},
                            torch::kFloat32);
  return t.permute({2, 0, 1}).contiguous();
}

Image to_image(const torch::Tensor& tensor) {
  auto t = tensor.detach();
  if (t.dim() == 4) {
    require(t.size(0) == 1, ErrorKind::ShapeMismatch, "to_image: batch tensors need an explicit index");
    t = t[0];
  }
  require(t.dim() == 3, ErrorKind::ShapeMismatch, "to_image expects C x H x W");
  t = t.to(torch::kFloat32).permute({1, 2, 0}).contiguous();
  Image img(static_cast<int>(t.size(0)), static_cast<int>(t.size(1)), static_cast<int>(t.size(2)));
  std::memcpy(img.data.data(), t.data_ptr<float>(), img.data.size() * sizeof(float));
  return img;
}

torch::Tensor to_tensor(const Mask& mask) {
  auto t = torch::empty({mask.height, mask.width}, torch::kFloat32);
  float* p = t.data_ptr<float>();
  for (std::size_t i = 0; i < mask.data.size(); ++i) p[i] = mask.data[i] ? 1.0f : 0.0f;
  return t;
}

BufferFreeze::BufferFreeze(torch::nn::Module& module) {
  for (auto& b : module.buffers()) {
    live_.push_back(b);
    saved_.push_back(b.clone());
  }
}

BufferFreeze::~BufferFreeze() {
  torch::NoGradGuard no_grad;
  for (std::size_t i = 0; i < live_.size(); ++i) live_[i].copy_(saved_[i]);
}

}  // namespace igr
