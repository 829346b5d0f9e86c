#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "igr/dataset.hpp"
#include "igr/frame.hpp"

namespace igr {

/// Fixed-size bit set over grid samples.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  std::size_t count() const;
  /// |this ∩ other|
  std::size_t count_common(const SampleSet& other) const;
  /// this ← this \ other
  void subtract(const SampleSet& other);
  /// Appends the bits of `other` after the current ones.
  void concat(const SampleSet& other);
  bool operator==(const SampleSet&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class SampleState : std::uint8_t { Uncovered, Covered, Invalid };

/// grid x grid samples on the target image; sample (i, j) sits on pixel
/// (floor((j + 0.5) W / grid), floor((i + 0.5) H / grid)).
struct CoverageGrid {
  int grid = 64;
  std::vector<SampleState> state;

  static CoverageGrid from_depth(const DepthMap& target_depth, int grid = 64);
  static std::pair<int, int> sample_pixel(int index, int grid, int width, int height);  // (x, y)
};

struct SelectionResult {
  std::vector<int> ids;   // selection order
  std::vector<std::size_t> gains;
};

struct ViewTarget {
  const Camera& camera;
  const DepthMap& depth;
};

/// Samples of the target grid that the candidate sees (frustum + occlusion test of the warp).
SampleSet covered_samples(const ViewTarget& target, const Frame& candidate, double occlusion_eps, int grid = 64);

/// Greedy max-gain selection over explicit coverage sets; ties go to the lowest id.
/// After zero-gain rounds the remaining slots are therefore filled by the lowest unused ids.
SelectionResult select_greedy_sets(std::span<const SampleSet> coverage, std::span<const int> ids, int count);

SelectionResult select_greedy(const ViewTarget& target, std::span<const Frame> candidates, int count,
                              double occlusion_eps, int grid = 64);

/// K views from the reference set for one target view.
SelectionResult select_nearest(const ViewTarget& target, std::span<const Frame> references, int k,
                               double occlusion_eps, int grid = 64);

/// n reference views of a training set: greedy over the union of every training view's coverage grid.
std::vector<int> select_reference_views(const Dataset& training, int n, double occlusion_eps, int grid = 64);

}  // namespace igr
