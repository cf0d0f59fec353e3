#include "vidcut/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "vidcut/error.hpp"
#include "vidcut/hungarian.hpp"

namespace vidcut {
namespace {

std::size_t intersection(const BinaryMask& a, const BinaryMask& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) n += (a.bits[i] & b.bits[i]) ? 1 : 0;
  return n;
}

void check_compatible(const Trajectory& a, const Trajectory& b) {
  if (a.frames.size() != b.frames.size()) {
    throw MismatchError("trajectory frame counts differ (" + std::to_string(a.frames.size()) +
                        " vs " + std::to_string(b.frames.size()) + ")");
  }
}

struct VideoPair {
  const VideoRecord* gt = nullptr;
  const VideoRecord* pred = nullptr;  // null when no predictions exist
};

std::vector<VideoPair> align_videos(const std::vector<VideoRecord>& preds,
                                    const std::vector<VideoRecord>& gts) {
  std::unordered_map<std::string, std::size_t> gt_index;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (!gt_index.emplace(gts[i].video_id, i).second) {
      throw MismatchError("duplicate ground-truth video_id " + gts[i].video_id);
    }
  }
  std::vector<VideoPair> pairs(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) pairs[i].gt = &gts[i];
  std::string missing;
  for (const VideoRecord& p : preds) {
    auto it = gt_index.find(p.video_id);
    if (it == gt_index.end()) {
      missing += (missing.empty() ? "" : ", ") + p.video_id;
      continue;
    }
    VideoPair& pair = pairs[it->second];
    if (pair.pred) throw MismatchError("duplicate predicted video_id " + p.video_id);
    if (p.frame_count != pair.gt->frame_count || p.height != pair.gt->height ||
        p.width != pair.gt->width) {
      throw MismatchError("video " + p.video_id +
                          ": prediction and ground truth differ in frames or size");
    }
    pair.pred = &p;
  }
  if (!missing.empty()) {
    throw MismatchError("predicted videos without ground truth: " + missing);
  }
  return pairs;
}

bool in_bucket(double area, SizeBucket bucket) {
  return bucket == SizeBucket::kAll || size_bucket_of(area) == bucket;
}

// One prediction after per-video matching at a given threshold.
struct Detection {
  double score;
  std::size_t order;  // global tie-break: video order, then rank in video
  bool matched;
  bool ignored;
};

struct Prepared {
  struct Video {
    std::vector<std::size_t> pred_rank;  // prediction indices by score
    std::vector<double> pred_area;
    std::vector<double> gt_area;
    std::vector<std::vector<double>> iou;  // [pred][gt]
    const VideoRecord* pred = nullptr;
  };
  std::vector<Video> videos;
};

Prepared prepare(const std::vector<VideoPair>& pairs) {
  Prepared out;
  for (const VideoPair& vp : pairs) {
    Prepared::Video v;
    v.pred = vp.pred;
    for (const Trajectory& g : vp.gt->trajectories) v.gt_area.push_back(mean_present_area(g));
    if (vp.pred) {
      const auto& pt = vp.pred->trajectories;
      v.pred_rank.resize(pt.size());
      std::iota(v.pred_rank.begin(), v.pred_rank.end(), 0);
      std::stable_sort(v.pred_rank.begin(), v.pred_rank.end(),
                       [&](std::size_t a, std::size_t b) { return pt[a].score > pt[b].score; });
      for (const Trajectory& p : pt) {
        v.pred_area.push_back(mean_present_area(p));
        std::vector<double> row;
        for (const Trajectory& g : vp.gt->trajectories) row.push_back(st_iou(p, g));
        v.iou.push_back(std::move(row));
      }
    }
    out.videos.push_back(std::move(v));
  }
  return out;
}

struct MatchOutcome {
  std::vector<Detection> detections;
  std::size_t gt_count = 0;  // non-ignored ground truth
  std::size_t gt_matched = 0;
};

MatchOutcome match(const Prepared& prep, double threshold, SizeBucket bucket,
                   std::size_t max_det) {
  MatchOutcome out;
  std::size_t order = 0;
  for (const Prepared::Video& v : prep.videos) {
    const std::size_t n_gt = v.gt_area.size();
    std::vector<std::size_t> gt_order(n_gt);
    std::iota(gt_order.begin(), gt_order.end(), 0);
    std::vector<char> gt_ignored(n_gt);
    for (std::size_t g = 0; g < n_gt; ++g) {
      gt_ignored[g] = in_bucket(v.gt_area[g], bucket) ? 0 : 1;
      if (!gt_ignored[g]) ++out.gt_count;
    }
    std::stable_sort(gt_order.begin(), gt_order.end(),
                     [&](std::size_t a, std::size_t b) { return gt_ignored[a] < gt_ignored[b]; });
    std::vector<char> gt_taken(n_gt, 0);
    const std::size_t n_det = std::min(max_det, v.pred_rank.size());
    for (std::size_t k = 0; k < n_det; ++k) {
      const std::size_t d = v.pred_rank[k];
      double best = threshold;
      int m = -1;
      for (std::size_t g : gt_order) {
        if (gt_taken[g]) continue;
        if (m >= 0 && !gt_ignored[m] && gt_ignored[g]) break;
        const double iou = v.iou[d][g];
        if (iou < best || (m >= 0 && iou == best)) continue;
        best = iou;
        m = static_cast<int>(g);
      }
      Detection det{v.pred->trajectories[d].score, order++, m >= 0, false};
      if (m >= 0) {
        gt_taken[m] = 1;
        det.ignored = gt_ignored[m] != 0;
        if (!det.ignored) ++out.gt_matched;
      } else {
        det.ignored = !in_bucket(v.pred_area[d], bucket);
      }
      out.detections.push_back(det);
    }
  }
  return out;
}

std::optional<double> average_precision(MatchOutcome outcome) {
  if (outcome.gt_count == 0) return std::nullopt;
  auto& dets = outcome.detections;
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.order < b.order;
  });
  std::vector<double> recall, precision;
  std::size_t tp = 0, fp = 0;
  for (const Detection& d : dets) {
    if (d.ignored) continue;
    (d.matched ? tp : fp) += 1;
    recall.push_back(static_cast<double>(tp) / static_cast<double>(outcome.gt_count));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[it - recall.begin()];
  }
  return sum / 101.0;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) return std::nullopt;
    sum += *v;
  }
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int k = 10; k <= 19; ++k) t.push_back(k / 20.0);
  return t;
}

double mean_present_area(const Trajectory& t) {
  double sum = 0.0;
  int present = 0;
  for (const auto& m : t.frames) {
    if (!m) continue;
    const std::size_t a = m->area();
    if (a == 0) continue;
    sum += static_cast<double>(a);
    ++present;
  }
  return present ? sum / present : 0.0;
}

SizeBucket size_bucket_of(double area) {
  if (area < kSmallArea) return SizeBucket::kSmall;
  if (area < kMediumArea) return SizeBucket::kMedium;
  return SizeBucket::kLarge;
}

double st_iou(const Trajectory& a, const Trajectory& b) {
  check_compatible(a, b);
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t f = 0; f < a.frames.size(); ++f) {
    const auto& ma = a.frames[f];
    const auto& mb = b.frames[f];
    if (ma && mb) {
      if (!ma->same_shape(*mb)) throw MismatchError("trajectory mask sizes differ");
      const std::size_t i = intersection(*ma, *mb);
      inter += i;
      uni += ma->area() + mb->area() - i;
    } else if (ma) {
      uni += ma->area();
    } else if (mb) {
      uni += mb->area();
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

EvalReport evaluate_ap(const std::vector<VideoRecord>& preds,
                       const std::vector<VideoRecord>& gts, const ApOptions& options) {
  if (options.thresholds.empty()) throw ConfigError("at least one IoU threshold is required");
  if (options.max_dets.empty()) throw ConfigError("at least one max_dets value is required");
  const Prepared prep = prepare(align_videos(preds, gts));
  const std::size_t ap_dets =
      static_cast<std::size_t>(*std::max_element(options.max_dets.begin(), options.max_dets.end()));

  EvalReport report;
  std::vector<std::optional<double>> all, small, medium, large;
  for (double t : options.thresholds) {
    all.push_back(average_precision(match(prep, t, SizeBucket::kAll, ap_dets)));
    small.push_back(average_precision(match(prep, t, SizeBucket::kSmall, ap_dets)));
    medium.push_back(average_precision(match(prep, t, SizeBucket::kMedium, ap_dets)));
    large.push_back(average_precision(match(prep, t, SizeBucket::kLarge, ap_dets)));
    if (all.back()) report.ap_per_threshold[t] = *all.back();
  }
  report.ap_mean = mean_of(all);
  if (auto it = report.ap_per_threshold.find(0.5); it != report.ap_per_threshold.end()) {
    report.ap50 = it->second;
  }
  if (auto it = report.ap_per_threshold.find(0.75); it != report.ap_per_threshold.end()) {
    report.ap75 = it->second;
  }
  report.ap_small = mean_of(small);
  report.ap_medium = mean_of(medium);
  report.ap_large = mean_of(large);

  for (int k : options.max_dets) {
    double sum = 0.0;
    bool defined = true;
    for (double t : options.thresholds) {
      const MatchOutcome m = match(prep, t, SizeBucket::kAll, static_cast<std::size_t>(k));
      if (m.gt_count == 0) {
        defined = false;
        break;
      }
      sum += static_cast<double>(m.gt_matched) / static_cast<double>(m.gt_count);
    }
    if (defined) report.ar_at[k] = sum / static_cast<double>(options.thresholds.size());
  }
  return report;
}

BinaryMask boundary_pixels(const BinaryMask& mask) {
  BinaryMask out(mask.height, mask.width);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(r, c)) continue;
      const bool edge = r == 0 || c == 0 || r == mask.height - 1 || c == mask.width - 1 ||
                        !mask.at(r - 1, c) || !mask.at(r + 1, c) || !mask.at(r, c - 1) ||
                        !mask.at(r, c + 1);
      if (edge) out.set(r, c);
    }
  }
  return out;
}

BinaryMask dilate_disk(const BinaryMask& mask, int radius) {
  BinaryMask out(mask.height, mask.width);
  std::vector<std::pair<int, int>> disk;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      if (dr * dr + dc * dc <= radius * radius) disk.emplace_back(dr, dc);
    }
  }
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(r, c)) continue;
      for (const auto& [dr, dc] : disk) {
        const int rr = r + dr;
        const int cc = c + dc;
        if (rr >= 0 && rr < mask.height && cc >= 0 && cc < mask.width) out.set(rr, cc);
      }
    }
  }
  return out;
}

int boundary_tolerance_px(int height, int width) {
  const double diag = std::sqrt(static_cast<double>(height) * height +
                                static_cast<double>(width) * width);
  return static_cast<int>(std::ceil(kBoundaryTolerance * diag));
}

double frame_region_iou(const BinaryMask* pred, const BinaryMask* gt, int height, int width) {
  const BinaryMask empty(height, width);
  const BinaryMask& p = pred ? *pred : empty;
  const BinaryMask& g = gt ? *gt : empty;
  const std::size_t inter = intersection(p, g);
  const std::size_t uni = p.area() + g.area() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double frame_boundary_f(const BinaryMask* pred, const BinaryMask* gt, int height, int width) {
  const BinaryMask empty(height, width);
  const BinaryMask pb = boundary_pixels(pred ? *pred : empty);
  const BinaryMask gb = boundary_pixels(gt ? *gt : empty);
  const double n_pred = static_cast<double>(pb.area());
  const double n_gt = static_cast<double>(gb.area());
  double precision, recall;
  if (n_pred == 0 && n_gt == 0) {
    precision = recall = 1.0;
  } else if (n_pred == 0) {
    precision = 1.0;
    recall = 0.0;
  } else if (n_gt == 0) {
    precision = 0.0;
    recall = 1.0;
  } else {
    const int radius = boundary_tolerance_px(height, width);
    precision = static_cast<double>(intersection(pb, dilate_disk(gb, radius))) / n_pred;
    recall = static_cast<double>(intersection(gb, dilate_disk(pb, radius))) / n_gt;
  }
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

PairScore davis_pair_score(const Trajectory& pred, const Trajectory& gt, int height, int width) {
  check_compatible(pred, gt);
  PairScore s;
  const std::size_t n = gt.frames.size();
  if (n == 0) return s;
  for (std::size_t f = 0; f < n; ++f) {
    const BinaryMask* p = pred.frames[f] ? &*pred.frames[f] : nullptr;
    const BinaryMask* g = gt.frames[f] ? &*gt.frames[f] : nullptr;
    if ((p && (p->height != height || p->width != width)) ||
        (g && (g->height != height || g->width != width))) {
      throw MismatchError("mask size differs from video size");
    }
    s.j += frame_region_iou(p, g, height, width);
    s.f += frame_boundary_f(p, g, height, width);
  }
  s.j /= static_cast<double>(n);
  s.f /= static_cast<double>(n);
  return s;
}

EvalReport evaluate_davis(const std::vector<VideoRecord>& preds,
                          const std::vector<VideoRecord>& gts) {
  const std::vector<VideoPair> pairs = align_videos(preds, gts);
  double j_sum = 0.0;
  double f_sum = 0.0;
  std::size_t instances = 0;
  for (const VideoPair& vp : pairs) {
    const auto& gt = vp.gt->trajectories;
    instances += gt.size();
    if (!vp.pred || vp.pred->trajectories.empty() || gt.empty()) continue;
    const auto& pr = vp.pred->trajectories;
    const int rows = static_cast<int>(gt.size());
    const int cols = static_cast<int>(pr.size());
    std::vector<PairScore> scores(static_cast<std::size_t>(rows) * cols);
    std::vector<double> cost(scores.size());
    for (int g = 0; g < rows; ++g) {
      for (int p = 0; p < cols; ++p) {
        const std::size_t k = static_cast<std::size_t>(g) * cols + p;
        scores[k] = davis_pair_score(pr[p], gt[g], vp.gt->height, vp.gt->width);
        cost[k] = -(scores[k].j + scores[k].f) / 2.0;
      }
    }
    const std::vector<int> assignment = hungarian_min_cost(cost, rows, cols);
    for (int g = 0; g < rows; ++g) {
      if (assignment[g] < 0) continue;
      const PairScore& s = scores[static_cast<std::size_t>(g) * cols + assignment[g]];
      j_sum += s.j;
      f_sum += s.f;
    }
  }
  EvalReport report;
  if (instances == 0) return report;
  report.j_mean = j_sum / static_cast<double>(instances);
  report.f_mean = f_sum / static_cast<double>(instances);
  report.jf_mean = (*report.j_mean + *report.f_mean) / 2.0;
  return report;
}

}  // namespace vidcut
