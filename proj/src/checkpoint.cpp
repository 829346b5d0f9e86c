#include "igr/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "igr/error.hpp"

namespace igr {
using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'I', 'G', 'R', 'C', 'K', 'P', 'T', '1'};

std::string dtype_name(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return "f32";
    case torch::kFloat64: return "f64";
    case torch::kInt64: return "i64";
    default: throw Error(ErrorKind::InvalidArgument, "unsupported checkpoint dtype");
  }
}

torch::ScalarType dtype_from(const std::string& s) {
  if (s == "f32") return torch::kFloat32;
  if (s == "f64") return torch::kFloat64;
  if (s == "i64") return torch::kInt64;
  throw Error(ErrorKind::ModelMismatch, "unknown checkpoint dtype " + s);
}

}  // namespace

const torch::Tensor& Checkpoint::get(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return t;
  throw Error(ErrorKind::ModelMismatch, "checkpoint has no tensor " + name);
}

bool Checkpoint::contains(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return true;
  return false;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  json dir = json::array();
  std::vector<torch::Tensor> blobs;
  std::uint64_t offset = 0;
  for (const auto& [name, t] : ckpt.tensors) {
    auto c = t.detach().contiguous().cpu();
    const std::uint64_t bytes = static_cast<std::uint64_t>(c.numel()) * c.element_size();
    dir.push_back({{"name", name}, {"dtype", dtype_name(c.scalar_type())}, {"shape", c.sizes().vec()},
                   {"offset", offset}, {"bytes", bytes}});
    offset += bytes;
    blobs.push_back(c);
  }
  const std::string header = json{{"meta", ckpt.meta}, {"tensors", dir}}.dump();
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    require(out.good(), ErrorKind::Io, "cannot write " + tmp.string());
    const std::uint32_t version = Checkpoint::kVersion;
    const std::uint64_t header_len = header.size();
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const auto& b : blobs)
      out.write(static_cast<const char*>(b.data_ptr()), static_cast<std::streamsize>(b.numel() * b.element_size()));
    require(out.good(), ErrorKind::Io, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::MissingFile, "cannot open checkpoint " + path.string());
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t header_len = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  require(in.good() && std::memcmp(magic, kMagic, 8) == 0, ErrorKind::ModelMismatch,
          path.string() + " is not a checkpoint");
  require(version == Checkpoint::kVersion, ErrorKind::ModelMismatch,
          "unsupported checkpoint version " + std::to_string(version));
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  const json h = json::parse(header);
  Checkpoint ckpt;
  ckpt.meta = h.at("meta");
  const auto data_start = in.tellg();
  for (const auto& e : h.at("tensors")) {
    const auto shape = e.at("shape").get<std::vector<std::int64_t>>();
    auto t = torch::empty(shape, torch::TensorOptions().dtype(dtype_from(e.at("dtype").get<std::string>())));
    const auto bytes = e.at("bytes").get<std::uint64_t>();
    require(bytes == static_cast<std::uint64_t>(t.numel() * t.element_size()), ErrorKind::ModelMismatch,
            "tensor size mismatch in " + path.string());
    in.seekg(data_start + static_cast<std::streamoff>(e.at("offset").get<std::uint64_t>()));
    in.read(static_cast<char*>(t.data_ptr()), static_cast<std::streamsize>(bytes));
    require(in.good(), ErrorKind::Io, "truncated checkpoint " + path.string());
    ckpt.tensors.emplace_back(e.at("name").get<std::string>(), t);
  }
  return ckpt;
}

void add_module_state(Checkpoint& ckpt, const std::string& prefix, torch::nn::Module& module) {
  for (const auto& p : module.named_parameters()) ckpt.add(prefix + "param." + p.key(), p.value());
  for (const auto& b : module.named_buffers()) ckpt.add(prefix + "buffer." + b.key(), b.value());
}

void load_module_state(const Checkpoint& ckpt, const std::string& prefix, torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  auto copy = [&](const std::string& name, torch::Tensor& dst) {
    const auto& src = ckpt.get(name);
    require(src.sizes() == dst.sizes(), ErrorKind::ModelMismatch, "shape mismatch for " + name);
    dst.copy_(src);
  };
  for (auto& p : module.named_parameters()) copy(prefix + "param." + p.key(), p.value());
  for (auto& b : module.named_buffers()) copy(prefix + "buffer." + b.key(), b.value());
}

}  // namespace igr
