#pragma once

#include <map>
#include <optional>
#include <vector>

#include "vidcut/types.hpp"

namespace vidcut {

// 0.50, 0.55, ..., 0.95.
std::vector<double> default_iou_thresholds();

inline constexpr double kSmallArea = 32.0 * 32.0;
inline constexpr double kMediumArea = 96.0 * 96.0;
inline constexpr double kBoundaryTolerance = 0.008;  // of the frame diagonal

enum class SizeBucket { kAll, kSmall, kMedium, kLarge };

// Mean per-frame area over frames where the instance has a non-empty mask.
double mean_present_area(const Trajectory& t);
SizeBucket size_bucket_of(double area);

// Sum over frames of |a & b| divided by the sum over frames of |a | b|;
// absent frames count as empty and an all-empty pair scores 0.
// Throws MismatchError on differing frame counts or mask sizes.
double st_iou(const Trajectory& a, const Trajectory& b);

struct EvalReport {
  std::map<double, double> ap_per_threshold;
  std::optional<double> ap_mean;
  std::optional<double> ap50;
  std::optional<double> ap75;
  std::optional<double> ap_small;
  std::optional<double> ap_medium;
  std::optional<double> ap_large;
  std::map<int, double> ar_at;
  std::optional<double> j_mean;
  std::optional<double> f_mean;
  std::optional<double> jf_mean;
};

struct ApOptions {
  std::vector<double> thresholds = default_iou_thresholds();
  std::vector<int> max_dets = {1, 10, 100};
};

// Class-agnostic video AP/AR.
//
// Predictions are ranked by score across all videos and greedily matched to
// the unmatched ground truth of highest spatio-temporal IoU in the same
// video. AP is the 101-point interpolated average precision; AR@k keeps the
// top k predictions per video and averages recall over the thresholds.
// Size-bucketed AP ignores ground truth outside the bucket, along with
// predictions matched to it and unmatched predictions outside the bucket.
// Entries without ground truth are left absent.
//
// Ground-truth videos missing from `preds` are scored as complete misses.
// Throws MismatchError on duplicate video ids, on predicted videos with no
// ground truth, and on frame/size disagreements.
EvalReport evaluate_ap(const std::vector<VideoRecord>& preds,
                       const std::vector<VideoRecord>& gts,
                       const ApOptions& options = {});

// Foreground pixels with a background 4-neighbour; outside the image counts
// as background.
BinaryMask boundary_pixels(const BinaryMask& mask);

// Pixels within Euclidean distance `radius` of a set pixel.
BinaryMask dilate_disk(const BinaryMask& mask, int radius);

// ceil(kBoundaryTolerance * diagonal).
int boundary_tolerance_px(int height, int width);

// Per-frame region similarity; two empty masks score 1.
double frame_region_iou(const BinaryMask* pred, const BinaryMask* gt,
                        int height, int width);
// Per-frame boundary F-measure; two empty masks score 1.
double frame_boundary_f(const BinaryMask* pred, const BinaryMask* gt,
                        int height, int width);

struct PairScore {
  double j = 0.0;
  double f = 0.0;
};

// J and F of one prediction/ground-truth pair, averaged over frames.
PairScore davis_pair_score(const Trajectory& pred, const Trajectory& gt,
                           int height, int width);

// DAVIS J, F and J&F. Within each video, predictions are assigned one-to-one
// to ground truth maximizing the summed (J+F)/2; unmatched ground truth
// scores 0. Means are taken over all ground-truth instances.
EvalReport evaluate_davis(const std::vector<VideoRecord>& preds,
                          const std::vector<VideoRecord>& gts);

}  // namespace vidcut
