#pragma once

#include <vector>

#include "vidcut/rng.hpp"
#include "vidcut/types.hpp"

namespace vidcut {

struct PasteTransform {
  double scale = 1.0;
  double dx = 0.0;  // pixels, applied after scaling/rotation about the center
  double dy = 0.0;
  double rotation_deg = 0.0;
  double brightness = 1.0;
  double contrast = 1.0;

  friend bool operator==(const PasteTransform&, const PasteTransform&) =
      default;
};

enum class MotionModel {
  kInterpolate,  // linear path between a start and an end transform
  kIndependent,  // every frame sampled on its own
};

struct SynthConfig {
  int frames = 2;
  double scale_min = 0.8;
  double scale_max = 1.0;
  double rotation_max_deg = 30.0;
  double brightness_min = 0.8;
  double brightness_max = 1.2;
  double contrast_min = 0.8;
  double contrast_max = 1.2;
  // Offsets are drawn from +-max_shift_fraction of the target size.
  double max_shift_fraction = 0.25;
  double min_visible_fraction = 0.2;
  MotionModel motion = MotionModel::kInterpolate;
  std::uint64_t seed = 0;
  // Redraws allowed when a transform pushes a mask out of the frame.
  int max_resample = 8;

  // Throws ConfigError.
  void validate() const;
};

struct TrajectoryTransforms {
  PasteTransform start;
  PasteTransform end;
  std::vector<PasteTransform> per_frame;  // cfg.frames entries
};

// Scale, offsets and rotation are interpolated linearly from start to end
// (or drawn per frame for MotionModel::kIndependent); brightness and
// contrast stay fixed along the trajectory.
TrajectoryTransforms sample_trajectory_transforms(Rng& rng,
                                                  const SynthConfig& cfg,
                                                  int target_height,
                                                  int target_width);

// frames >= 2 transforms; geometry interpolated linearly, photometry taken
// from `start`.
std::vector<PasteTransform> interpolate_transforms(const PasteTransform& start,
                                                   const PasteTransform& end,
                                                   int frames);

struct PasteResult {
  RgbImage image;
  BinaryMask mask;  // transformed mask in target coordinates
};

// Geometry: the source is stretched to the target size, then scaled and
// rotated about the image center and shifted by (dx, dy). Image samples are
// bilinear and mask samples nearest-neighbour. Brightness and contrast act
// on the pasted pixels only. Outside the transformed mask the target is
// returned untouched.
//
// An empty input mask returns the target unchanged. Throws MismatchError
// when mask and source sizes differ and EmptyPaste when a non-empty mask is
// moved entirely out of the target.
PasteResult apply_paste(const RgbImage& target, const RgbImage& source,
                        const BinaryMask& mask, const PasteTransform& t);

// Transformed mask only (same geometry as apply_paste).
BinaryMask transform_mask(const BinaryMask& mask, int target_height,
                          int target_width, const PasteTransform& t);

struct SyntheticVideo {
  std::vector<RgbImage> frames;
  VideoRecord record;
};

// Duplicates the target across cfg.frames frames and pastes every source
// mask (in index order, later ones on top) with its own trajectory of
// transforms drawn from cfg.seed. Static trajectories come from the target
// masks, minus whatever is pasted over them, and are dropped when less than
// min_visible_fraction of the mask stays visible in every frame. Mobile
// trajectories come from the pasted masks, minus later pastes.
//
// Throws MismatchError when no usable trajectory remains.
SyntheticVideo synthesize(const RgbImage& target, const MaskSet& target_masks,
                          const RgbImage& source, const MaskSet& source_masks,
                          const SynthConfig& cfg);

}  // namespace vidcut
