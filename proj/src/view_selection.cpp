#include "igr/view_selection.hpp"

#include "igr/error.hpp"
#include "igr/warp.hpp"

namespace igr {

std::size_t SampleSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t SampleSet::count_common(const SampleSet& other) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) n += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
  return n;
}

void SampleSet::subtract(const SampleSet& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
}

void SampleSet::concat(const SampleSet& other) {
  const std::size_t offset = size_;
  if (offset % 64 == 0) {
    words_.resize(offset / 64);
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
    size_ += other.size_;
    return;
  }
  size_ += other.size_;
  words_.resize((size_ + 63) / 64, 0);
  for (std::size_t i = 0; i < other.size_; ++i)
    if (other.test(i)) set(offset + i);
}

std::pair<int, int> CoverageGrid::sample_pixel(int index, int grid, int width, int height) {
  const int i = index / grid, j = index % grid;
  const int x = static_cast<int>((j + 0.5) * width / grid);
  const int y = static_cast<int>((i + 0.5) * height / grid);
  return {x, y};
}

CoverageGrid CoverageGrid::from_depth(const DepthMap& depth, int grid) {
  CoverageGrid g;
  g.grid = grid;
  g.state.resize(static_cast<std::size_t>(grid) * grid);
  for (int s = 0; s < grid * grid; ++s) {
    const auto [x, y] = sample_pixel(s, grid, depth.width, depth.height);
    g.state[s] = depth.at(y, x) > 0.0f ? SampleState::Uncovered : SampleState::Invalid;
  }
  return g;
}

SampleSet covered_samples(const ViewTarget& target, const Frame& candidate, double occlusion_eps, int grid) {
  require(candidate.has_depth(), ErrorKind::InvalidArgument, "covered_samples: candidate has no depth");
  SampleSet out(static_cast<std::size_t>(grid) * grid);
  for (int s = 0; s < grid * grid; ++s) {
    const auto [x, y] = CoverageGrid::sample_pixel(s, grid, target.depth.width, target.depth.height);
    if (pixel_visible(target.camera, target.depth, x, y, candidate.camera, candidate.depth, occlusion_eps))
      out.set(static_cast<std::size_t>(s));
  }
  return out;
}

SelectionResult select_greedy_sets(std::span<const SampleSet> coverage, std::span<const int> ids, int count) {
  require(coverage.size() == ids.size(), ErrorKind::CountMismatch, "one coverage set per id required");
  require(!ids.empty(), ErrorKind::InvalidArgument, "no candidates");
  require(count >= 1 && static_cast<std::size_t>(count) <= ids.size(), ErrorKind::InvalidArgument,
          "selection count must be in [1, candidates]");
  SampleSet uncovered(coverage.front().size());
  for (std::size_t i = 0; i < uncovered.size(); ++i) uncovered.set(i);
  std::vector<bool> used(ids.size(), false);
  SelectionResult result;
  for (int round = 0; round < count; ++round) {
    std::size_t best = ids.size();
    std::size_t best_gain = 0;
    for (std::size_t c = 0; c < ids.size(); ++c) {
      if (used[c]) continue;
      const std::size_t gain = coverage[c].count_common(uncovered);
      if (best == ids.size() || gain > best_gain || (gain == best_gain && ids[c] < ids[best])) {
        best = c;
        best_gain = gain;
      }
    }
    used[best] = true;
    uncovered.subtract(coverage[best]);
    result.ids.push_back(ids[best]);
    result.gains.push_back(best_gain);
  }
  return result;
}

SelectionResult select_greedy(const ViewTarget& target, std::span<const Frame> candidates, int count,
                              double occlusion_eps, int grid) {
  std::vector<SampleSet> coverage;
  std::vector<int> ids;
  coverage.reserve(candidates.size());
  for (const Frame& f : candidates) {
    coverage.push_back(covered_samples(target, f, occlusion_eps, grid));
    ids.push_back(f.id);
  }
  return select_greedy_sets(coverage, ids, count);
}

SelectionResult select_nearest(const ViewTarget& target, std::span<const Frame> references, int k,
                               double occlusion_eps, int grid) {
  return select_greedy(target, references, k, occlusion_eps, grid);
}

std::vector<int> select_reference_views(const Dataset& training, int n, double occlusion_eps, int grid) {
  require(training.all_depth_present(), ErrorKind::InvalidArgument, "reference selection needs depth maps");
  std::vector<SampleSet> coverage(training.frames.size());
  for (const Frame& target : training.frames) {
    const ViewTarget t{target.camera, target.depth};
    for (std::size_t c = 0; c < training.frames.size(); ++c)
      coverage[c].concat(covered_samples(t, training.frames[c], occlusion_eps, grid));
  }
  return select_greedy_sets(coverage, training.ids(), n).ids;
}

}  // namespace igr
