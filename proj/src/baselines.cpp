#include "igr/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "igr/error.hpp"
#include "igr/raster.hpp"

namespace igr {

Image naive_blend(std::span<const WarpResult> warps) {
  require(!warps.empty(), ErrorKind::CountMismatch, "naive_blend needs at least one warp");
  const Image& first = warps.front().color;
  Image out(first.height, first.width, first.channels);
  for (int y = 0; y < first.height; ++y) {
    for (int x = 0; x < first.width; ++x) {
      int n = 0;
      for (const auto& w : warps) {
        require(w.color.same_shape(first), ErrorKind::ShapeMismatch, "naive_blend: warp shapes differ");
        if (!w.mask.at(y, x)) continue;
        ++n;
        for (int c = 0; c < first.channels; ++c) out.at(y, x, c) += w.color.at(y, x, c);
      }
      if (n > 1)
        for (int c = 0; c < first.channels; ++c) out.at(y, x, c) /= static_cast<float>(n);
    }
  }
  return out;
}

Image naive_ibr(const ViewTarget& target, std::span<const Frame> references, int k, double occlusion_eps) {
  const SelectionResult sel = select_nearest(target, references, k, occlusion_eps);
  std::vector<WarpResult> warps;
  for (int id : sel.ids) {
    const auto it = std::find_if(references.begin(), references.end(), [&](const Frame& f) { return f.id == id; });
    warps.push_back(warp_image(*it, target.camera, target.depth, occlusion_eps));
  }
  return naive_blend(warps);
}

Image per_triangle_ibr(const ViewTarget& target, std::span<const Frame> references, const ProxyMesh& mesh,
                       double occlusion_eps) {
  require(!references.empty(), ErrorKind::InvalidArgument, "per_triangle_ibr needs references");
  const int h = target.camera.height, w = target.camera.width;
  const RasterResult raster = rasterize(mesh, target.camera);
  const Eigen::Vector3d eye = target.camera.center();
  std::vector<std::vector<std::size_t>> ranking(mesh.triangles.size());
  std::vector<bool> ranked(mesh.triangles.size(), false);
  Image out(h, w, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int t = raster.triangle_at(y, x);
      if (t < 0 || !(target.depth.at(y, x) > 0.0f)) continue;
      const auto tu = static_cast<std::size_t>(t);
      if (!ranked[tu]) {
        ranked[tu] = true;
        const Eigen::Vector3d c = mesh.triangle_centroid(tu);
        Eigen::Vector3d n = mesh.triangle_normal(tu);
        if (n.dot(eye - c) < 0) n = -n;
        // References that see the centroid come first; the others stay as per-pixel fallbacks for
        // triangles whose centroid test fails at a silhouette.
        std::vector<std::tuple<bool, double, std::size_t>> scored;
        for (std::size_t r = 0; r < references.size(); ++r) {
          const Frame& ref = references[r];
          const double score = n.dot((ref.camera.center() - c).normalized());
          if (score <= 0) continue;
          scored.emplace_back(visible_from(ref.camera, ref.depth, c, occlusion_eps), score, r);
        }
        std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
          if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a);
          if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
          return references[std::get<2>(a)].id < references[std::get<2>(b)].id;
        });
        for (const auto& s : scored) ranking[tu].push_back(std::get<2>(s));
      }
      for (std::size_t r : ranking[tu]) {
        const Frame& ref = references[r];
        ScreenPoint hit;
        if (!pixel_visible(target.camera, target.depth, x, y, ref.camera, ref.depth, occlusion_eps, &hit)) continue;
        sample_bilinear(ref.image, hit.u, hit.v, &out.at(y, x, 0));
        break;
      }
    }
  }
  return out;
}

double mse_eval(const Image& predicted, const Image& ground_truth) {
  require(predicted.same_shape(ground_truth), ErrorKind::ShapeMismatch, "mse_eval: shapes differ");
  require(!predicted.empty(), ErrorKind::ShapeMismatch, "mse_eval: empty images");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.data.size(); ++i) {
    const double d = 255.0 * static_cast<double>(predicted.data[i]) - 255.0 * static_cast<double>(ground_truth.data[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(predicted.data.size());
}

}  // namespace igr
