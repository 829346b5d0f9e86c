#pragma once

#include <span>

#include "igr/frame.hpp"
#include "igr/mesh.hpp"
#include "igr/view_selection.hpp"
#include "igr/warp.hpp"

namespace igr {

/// Per-pixel mean over warps whose mask is set; 0 where no warp is valid.
Image naive_blend(std::span<const WarpResult> warps);

/// Nearest-K naive blending: select_nearest, warp the original (effect-laden) reference images, average.
Image naive_ibr(const ViewTarget& target, std::span<const Frame> references, int k, double occlusion_eps);

/// View-dependent texture mapping with one source view per triangle. Each visible triangle ranks the
/// references whose view of the triangle centroid passes the occlusion test by
/// normal . (reference center - centroid) / |...|; a pixel takes the first ranked view that sees it.
/// Facing references that fail the centroid test are ranked after the others as per-pixel fallbacks.
Image per_triangle_ibr(const ViewTarget& target, std::span<const Frame> references, const ProxyMesh& mesh,
                       double occlusion_eps);

/// Mean over all pixels and channels of (255 a - 255 b)^2.
double mse_eval(const Image& predicted, const Image& ground_truth);

}  // namespace igr
