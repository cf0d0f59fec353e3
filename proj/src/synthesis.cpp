#include "vidcut/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vidcut/error.hpp"

namespace vidcut {
namespace {

// Maps target pixel centers back into continuous source coordinates.
class InverseWarp {
 public:
  InverseWarp(int target_h, int target_w, int source_h, int source_w,
              const PasteTransform& t)
      : cx_(target_w / 2.0),
        cy_(target_h / 2.0),
        sx_(static_cast<double>(source_w) / target_w),
        sy_(static_cast<double>(source_h) / target_h),
        t_(t) {
    const double theta = t.rotation_deg * std::numbers::pi / 180.0;
    cos_ = std::cos(theta);
    sin_ = std::sin(theta);
  }

  // Continuous source position of target pixel (r, c).
  void map(int r, int c, double& src_x, double& src_y) const {
    const double vx = c + 0.5 - cx_ - t_.dx;
    const double vy = r + 0.5 - cy_ - t_.dy;
    // Undo rotation by theta, then scaling.
    const double ux = (cos_ * vx + sin_ * vy) / t_.scale;
    const double uy = (-sin_ * vx + cos_ * vy) / t_.scale;
    src_x = (ux + cx_) * sx_;
    src_y = (uy + cy_) * sy_;
  }

 private:
  double cx_, cy_, sx_, sy_;
  double cos_ = 1.0, sin_ = 0.0;
  PasteTransform t_;
};

bool mask_at(const BinaryMask& mask, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  if (fx < 0 || fy < 0 || fx >= mask.width || fy >= mask.height) return false;
  return mask.at(static_cast<int>(fy), static_cast<int>(fx));
}

double bilinear(const RgbImage& img, double x, double y, int ch) {
  const double fx = x - 0.5;
  const double fy = y - 0.5;
  const double x0f = std::floor(fx);
  const double y0f = std::floor(fy);
  const double ax = fx - x0f;
  const double ay = fy - y0f;
  auto clampi = [](double v, int hi) {
    return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(hi - 1)));
  };
  const int x0 = clampi(x0f, img.width);
  const int x1 = clampi(x0f + 1, img.width);
  const int y0 = clampi(y0f, img.height);
  const int y1 = clampi(y0f + 1, img.height);
  const double top = (1 - ax) * img.at(y0, x0, ch) + ax * img.at(y0, x1, ch);
  const double bottom = (1 - ax) * img.at(y1, x0, ch) + ax * img.at(y1, x1, ch);
  return (1 - ay) * top + ay * bottom;
}

PasteTransform sample_geometry(Rng& rng, const SynthConfig& cfg, int h, int w) {
  PasteTransform t;
  t.scale = rng.uniform(cfg.scale_min, cfg.scale_max);
  t.dx = rng.uniform(-cfg.max_shift_fraction * w, cfg.max_shift_fraction * w);
  t.dy = rng.uniform(-cfg.max_shift_fraction * h, cfg.max_shift_fraction * h);
  t.rotation_deg = rng.uniform(-cfg.rotation_max_deg, cfg.rotation_max_deg);
  return t;
}

BinaryMask subtract(BinaryMask mask, const BinaryMask& cover) {
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (cover.bits[i]) mask.bits[i] = 0;
  }
  return mask;
}

void add_into(BinaryMask& acc, const BinaryMask& m) {
  for (std::size_t i = 0; i < acc.bits.size(); ++i) acc.bits[i] |= m.bits[i];
}

}  // namespace

void SynthConfig::validate() const {
  if (frames < 2) throw ConfigError("frames must be ≥ 2");
  if (!(min_visible_fraction > 0.0 && min_visible_fraction <= 1.0)) {
    throw ConfigError("min_visible_fraction must lie in (0, 1]");
  }
  if (!(scale_min > 0.0 && scale_min <= scale_max)) throw ConfigError("invalid scale range");
  if (rotation_max_deg < 0.0) throw ConfigError("rotation_max must be non-negative");
  if (!(brightness_min > 0.0 && brightness_min <= brightness_max)) {
    throw ConfigError("invalid brightness range");
  }
  if (!(contrast_min > 0.0 && contrast_min <= contrast_max)) {
    throw ConfigError("invalid contrast range");
  }
  if (max_shift_fraction < 0.0) throw ConfigError("max_shift_fraction must be non-negative");
  if (max_resample < 0) throw ConfigError("max_resample must be non-negative");
}

std::vector<PasteTransform> interpolate_transforms(const PasteTransform& start,
                                                   const PasteTransform& end, int frames) {
  if (frames < 2) throw ConfigError("frames must be ≥ 2");
  std::vector<PasteTransform> out;
  out.reserve(frames);
  for (int f = 0; f < frames; ++f) {
    if (f == 0) {
      out.push_back(start);
      continue;
    }
    if (f == frames - 1) {
      PasteTransform last = end;
      last.brightness = start.brightness;
      last.contrast = start.contrast;
      out.push_back(last);
      continue;
    }
    const double a = static_cast<double>(f) / (frames - 1);
    PasteTransform t = start;
    t.scale = start.scale + a * (end.scale - start.scale);
    t.dx = start.dx + a * (end.dx - start.dx);
    t.dy = start.dy + a * (end.dy - start.dy);
    t.rotation_deg = start.rotation_deg + a * (end.rotation_deg - start.rotation_deg);
    out.push_back(t);
  }
  return out;
}

TrajectoryTransforms sample_trajectory_transforms(Rng& rng, const SynthConfig& cfg,
                                                  int target_height, int target_width) {
  cfg.validate();
  const double brightness = rng.uniform(cfg.brightness_min, cfg.brightness_max);
  const double contrast = rng.uniform(cfg.contrast_min, cfg.contrast_max);
  TrajectoryTransforms out;
  if (cfg.motion == MotionModel::kInterpolate) {
    out.start = sample_geometry(rng, cfg, target_height, target_width);
    out.end = sample_geometry(rng, cfg, target_height, target_width);
    out.start.brightness = out.end.brightness = brightness;
    out.start.contrast = out.end.contrast = contrast;
    out.per_frame = interpolate_transforms(out.start, out.end, cfg.frames);
  } else {
    for (int f = 0; f < cfg.frames; ++f) {
      PasteTransform t = sample_geometry(rng, cfg, target_height, target_width);
      t.brightness = brightness;
      t.contrast = contrast;
      out.per_frame.push_back(t);
    }
    out.start = out.per_frame.front();
    out.end = out.per_frame.back();
  }
  return out;
}

BinaryMask transform_mask(const BinaryMask& mask, int target_height, int target_width,
                          const PasteTransform& t) {
  const InverseWarp warp(target_height, target_width, mask.height, mask.width, t);
  BinaryMask out(target_height, target_width);
  for (int r = 0; r < target_height; ++r) {
    for (int c = 0; c < target_width; ++c) {
      double x, y;
      warp.map(r, c, x, y);
      if (mask_at(mask, x, y)) out.set(r, c);
    }
  }
  return out;
}

PasteResult apply_paste(const RgbImage& target, const RgbImage& source,
                        const BinaryMask& mask, const PasteTransform& t) {
  if (mask.height != source.height || mask.width != source.width) {
    throw MismatchError("paste mask and source image sizes differ");
  }
  PasteResult out{target, BinaryMask(target.height, target.width)};
  if (mask.empty()) return out;
  out.mask = transform_mask(mask, target.height, target.width, t);
  if (out.mask.empty()) throw EmptyPaste();

  // Mean gray level of the object; contrast scales around it.
  double sum = 0.0;
  std::size_t count = 0;
  for (int r = 0; r < source.height; ++r) {
    for (int c = 0; c < source.width; ++c) {
      if (!mask.at(r, c)) continue;
      sum += source.at(r, c, 0) + source.at(r, c, 1) + source.at(r, c, 2);
      count += 3;
    }
  }
  const double pivot = t.brightness * sum / static_cast<double>(count);

  const InverseWarp warp(target.height, target.width, source.height, source.width, t);
  for (int r = 0; r < target.height; ++r) {
    for (int c = 0; c < target.width; ++c) {
      if (!out.mask.at(r, c)) continue;
      double x, y;
      warp.map(r, c, x, y);
      for (int ch = 0; ch < 3; ++ch) {
        const double v = t.brightness * bilinear(source, x, y, ch);
        const double adjusted = (v - pivot) * t.contrast + pivot;
        out.image.at(r, c, ch) =
            static_cast<std::uint8_t>(std::clamp(std::round(adjusted), 0.0, 255.0));
      }
    }
  }
  return out;
}

SyntheticVideo synthesize(const RgbImage& target, const MaskSet& target_masks,
                          const RgbImage& source, const MaskSet& source_masks,
                          const SynthConfig& cfg) {
  cfg.validate();
  for (const auto& m : target_masks.masks) {
    if (m.height != target.height || m.width != target.width) {
      throw MismatchError("target mask size differs from target image");
    }
  }
  for (const auto& m : source_masks.masks) {
    if (m.height != source.height || m.width != source.width) {
      throw MismatchError("source mask size differs from source image");
    }
  }
  auto score_of = [](const MaskSet& set, std::size_t k) {
    return k < set.scores.size() ? set.scores[k] : 1.0;
  };

  const int frames = cfg.frames;
  const int h = target.height;
  const int w = target.width;
  Rng rng(cfg.seed);

  // pasted[k][f]: transformed source mask k in frame f.
  std::vector<std::vector<BinaryMask>> pasted;
  std::vector<std::vector<PasteTransform>> paths;
  std::vector<std::size_t> pasted_index;
  for (std::size_t k = 0; k < source_masks.size(); ++k) {
    const BinaryMask& m = source_masks.masks[k];
    if (m.empty()) continue;
    for (int attempt = 0; attempt <= cfg.max_resample; ++attempt) {
      TrajectoryTransforms tt = sample_trajectory_transforms(rng, cfg, h, w);
      std::vector<BinaryMask> per_frame;
      bool ok = true;
      for (const PasteTransform& t : tt.per_frame) {
        per_frame.push_back(transform_mask(m, h, w, t));
        if (per_frame.back().empty()) {
          ok = false;
          break;
        }
      }
      if (ok) {
        pasted.push_back(std::move(per_frame));
        paths.push_back(std::move(tt.per_frame));
        pasted_index.push_back(k);
        break;
      }
    }
  }

  SyntheticVideo video;
  video.record.frame_count = frames;
  video.record.height = h;
  video.record.width = w;
  std::vector<BinaryMask> pasted_union(frames, BinaryMask(h, w));
  for (int f = 0; f < frames; ++f) {
    RgbImage canvas = target;
    for (std::size_t p = 0; p < pasted.size(); ++p) {
      PasteResult res =
          apply_paste(canvas, source, source_masks.masks[pasted_index[p]], paths[p][f]);
      canvas = std::move(res.image);
      add_into(pasted_union[f], pasted[p][f]);
    }
    video.frames.push_back(std::move(canvas));
  }

  std::int64_t next_id = 1;
  BinaryMask static_claimed(h, w);
  for (std::size_t a = 0; a < target_masks.size(); ++a) {
    const BinaryMask base = subtract(target_masks.masks[a], static_claimed);
    add_into(static_claimed, target_masks.masks[a]);
    const double base_area = static_cast<double>(target_masks.masks[a].area());
    if (base_area == 0.0) continue;
    Trajectory traj;
    traj.score = score_of(target_masks, a);
    bool keep = false;
    for (int f = 0; f < frames; ++f) {
      BinaryMask visible = subtract(base, pasted_union[f]);
      const double area = static_cast<double>(visible.area());
      keep = keep || area / base_area >= cfg.min_visible_fraction;
      if (area > 0) {
        traj.frames.emplace_back(std::move(visible));
      } else {
        traj.frames.emplace_back(std::nullopt);
      }
    }
    if (!keep) continue;
    traj.instance_id = next_id++;
    video.record.trajectories.push_back(std::move(traj));
  }

  for (std::size_t p = 0; p < pasted.size(); ++p) {
    Trajectory traj;
    traj.score = score_of(source_masks, pasted_index[p]);
    bool any = false;
    for (int f = 0; f < frames; ++f) {
      BinaryMask visible = pasted[p][f];
      for (std::size_t later = p + 1; later < pasted.size(); ++later) {
        visible = subtract(std::move(visible), pasted[later][f]);
      }
      if (visible.empty()) {
        traj.frames.emplace_back(std::nullopt);
      } else {
        any = true;
        traj.frames.emplace_back(std::move(visible));
      }
    }
    if (!any) continue;
    traj.instance_id = next_id++;
    video.record.trajectories.push_back(std::move(traj));
  }

  if (video.record.trajectories.empty()) {
    throw MismatchError("synthesized video has no usable trajectories");
  }
  return video;
}

}  // namespace vidcut
