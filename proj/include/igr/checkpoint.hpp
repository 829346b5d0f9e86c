#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "json.hpp"

namespace igr {

/// Named-tensor container. On disk:
///   8-byte magic "IGRCKPT1", u32 format version, u64 header length, JSON header, raw tensor bytes.
/// The header carries caller metadata (architecture descriptor, training progress) under "meta" and
/// the tensor directory (name, dtype, shape, byte offset) under "tensors".
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, torch::Tensor>> tensors;

  void add(const std::string& name, const torch::Tensor& t) { tensors.emplace_back(name, t); }
  const torch::Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Parameters and buffers (batchnorm statistics) of a module under `prefix`.
void add_module_state(Checkpoint& ckpt, const std::string& prefix, torch::nn::Module& module);
/// Copies stored values into the module; throws ModelMismatch on missing names or shape differences.
void load_module_state(const Checkpoint& ckpt, const std::string& prefix, torch::nn::Module& module);

}  // namespace igr
