#include "igr/image.hpp"

#include <algorithm>

namespace igr {

Image subtract(const Image& a, const Image& b) {
  require(a.same_shape(b), ErrorKind::ShapeMismatch, "subtract: image shapes differ");
  Image out(a.height, a.width, a.channels);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
  return out;
}

Image add(const Image& a, const Image& b) {
  require(a.same_shape(b), ErrorKind::ShapeMismatch, "add: image shapes differ");
  Image out(a.height, a.width, a.channels);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] + b.data[i];
  return out;
}

Image clamp01(const Image& img) {
  Image out = img;
  for (auto& v : out.data) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

}  // namespace igr
