#pragma once

#include "vidcut/spectral.hpp"
#include "vidcut/types.hpp"

namespace vidcut {

inline constexpr int kDefaultMaskCount = 3;
// Rounds stop once fewer unclaimed patches than this remain.
inline constexpr int kMinRemainingPatches = 4;

struct MaskCutOptions {
  int max_masks = kDefaultMaskCount;  // t
  double tau = kDefaultTau;
  double eigen_tolerance = kDefaultEigenTolerance;
  bool seed_component_only = true;
};

// Iterative NCut over the patch affinity graph. After each round the rows
// and columns of claimed patches are pushed down to kAffinityEpsilon, which
// for binary masks equals zeroing their key features before the cosine.
//
// Returns at most `max_masks` pairwise-disjoint patch-resolution masks.
// Each score is the mean (foreground-oriented) Fiedler entry of the mask,
// min-max normalized across the set; a single mask, or a set of equal
// means, scores 1.
MaskSet maskcut(const FeatureMap& fm, const MaskCutOptions& options = {});

// Suppresses rows/cols of `claimed` patches to kAffinityEpsilon in place.
void suppress_patches(AffinityGraph& graph, const BinaryMask& claimed);

// Nearest-neighbour expansion of a patch mask to pixels, cropped to the
// image. Throws MismatchError unless the mask is the
// ceil(h/p) x ceil(w/p) grid.
BinaryMask upsample_mask(const BinaryMask& patch_mask, int patch_size,
                         int image_height, int image_width);

}  // namespace vidcut
