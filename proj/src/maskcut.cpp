#include "vidcut/maskcut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vidcut/error.hpp"

namespace vidcut {

namespace {

// True when every pair of unclaimed patches carries the same weight. Such a
// graph has no preferred cut: any vector orthogonal to the constant one is a
// valid Fiedler vector, so a bipartition would be arbitrary.
bool structureless(const AffinityGraph& graph, const BinaryMask& claimed) {
  const int n = graph.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    if (claimed.bits[i]) continue;
    for (int j = i + 1; j < n; ++j) {
      if (claimed.bits[j]) continue;
      lo = std::min(lo, graph.weights(i, j));
      hi = std::max(hi, graph.weights(i, j));
    }
  }
  return hi - lo <= 1e-12 * std::max(1.0, std::abs(hi));
}

}  // namespace

void suppress_patches(AffinityGraph& graph, const BinaryMask& claimed) {
  const int n = graph.size();
  for (int i = 0; i < n; ++i) {
    if (!claimed.bits[i]) continue;
    graph.weights.row(i).setConstant(kAffinityEpsilon);
    graph.weights.col(i).setConstant(kAffinityEpsilon);
  }
  graph.update_degrees();
}

MaskSet maskcut(const FeatureMap& fm, const MaskCutOptions& options) {
  if (options.max_masks < 1) throw ConfigError("t must be ≥ 1");
  fm.validate();
  AffinityGraph graph = build_affinity(fm, options.tau);
  BinaryMask claimed(fm.rows, fm.cols);
  int remaining = fm.patch_count();

  MaskSet out;
  std::vector<double> raw_scores;
  for (int round = 0; round < options.max_masks; ++round) {
    if (remaining < kMinRemainingPatches) break;
    if (round > 0) suppress_patches(graph, claimed);
    if (structureless(graph, claimed)) break;
    const FiedlerResult fr = fiedler(graph, options.eigen_tolerance);
    BinaryMask mask;
    try {
      mask = bipartition(fr, fm.rows, fm.cols, &claimed, options.seed_component_only);
    } catch (const DegeneratePartition&) {
      break;
    }
    // Orient the vector so the foreground lies on the high side.
    const double mean = fr.eigenvector.mean();
    double sum = 0.0;
    std::size_t count = 0;
    bool foreground_high = true;
    for (int i = 0; i < fm.patch_count(); ++i) {
      if (!mask.bits[i]) continue;
      sum += fr.eigenvector(i);
      foreground_high = fr.eigenvector(i) >= mean;
      ++count;
    }
    const double mean_value = sum / static_cast<double>(count);
    raw_scores.push_back(foreground_high ? mean_value : -mean_value);

    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
      if (mask.bits[i]) claimed.bits[i] = 1;
    }
    remaining -= static_cast<int>(count);
    out.masks.push_back(std::move(mask));
  }

  if (!raw_scores.empty()) {
    const auto [lo, hi] = std::minmax_element(raw_scores.begin(), raw_scores.end());
    const double span = *hi - *lo;
    for (double s : raw_scores) {
      out.scores.push_back(span > 0.0 ? (s - *lo) / span : 1.0);
    }
  }
  return out;
}

BinaryMask upsample_mask(const BinaryMask& patch_mask, int patch_size,
                         int image_height, int image_width) {
  if (patch_size <= 0) throw ConfigError("patch_size must be positive");
  const int rows = (image_height + patch_size - 1) / patch_size;
  const int cols = (image_width + patch_size - 1) / patch_size;
  if (patch_mask.height != rows || patch_mask.width != cols) {
    throw MismatchError("patch mask is " + std::to_string(patch_mask.height) + "x" +
                        std::to_string(patch_mask.width) + ", expected " +
                        std::to_string(rows) + "x" + std::to_string(cols));
  }
  BinaryMask out(image_height, image_width);
  for (int r = 0; r < image_height; ++r) {
    for (int c = 0; c < image_width; ++c) {
      if (patch_mask.at(r / patch_size, c / patch_size)) out.set(r, c);
    }
  }
  return out;
}

}  // namespace vidcut
