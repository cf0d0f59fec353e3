#include "vidcut/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vidcut/error.hpp"

namespace vidcut {

std::size_t BinaryMask::area() const {
  return static_cast<std::size_t>(std::count_if(
      bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

void FeatureMap::validate() const {
  if (rows <= 0 || cols <= 0 || dim <= 0) {
    throw MismatchError("feature map has an empty dimension");
  }
  if (data.size() != static_cast<std::size_t>(rows) * cols * dim) {
    throw MismatchError("feature data length does not match rows*cols*dim");
  }
  if (patch_size <= 0 || image_height <= 0 || image_width <= 0) {
    throw ConfigError("patch_size and image dimensions must be positive");
  }
  const int want_rows = (image_height + patch_size - 1) / patch_size;
  const int want_cols = (image_width + patch_size - 1) / patch_size;
  if (rows != want_rows || cols != want_cols) {
    throw MismatchError("patch grid " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " does not cover a " +
                        std::to_string(image_height) + "x" +
                        std::to_string(image_width) + " image with patch " +
                        std::to_string(patch_size));
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw NumericError("non-finite feature");
  }
}

void VideoRecord::validate() const {
  if (frame_count <= 0) {
    throw MismatchError("video " + video_id + ": frame_count must be positive");
  }
  if (!frame_paths.empty() &&
      frame_paths.size() != static_cast<std::size_t>(frame_count)) {
    throw MismatchError("video " + video_id +
                        ": frame path count differs from frame_count");
  }
  for (const Trajectory& t : trajectories) {
    const std::string where =
        "video " + video_id + " instance " + std::to_string(t.instance_id);
    if (t.frames.size() != static_cast<std::size_t>(frame_count)) {
      throw MismatchError(where + ": expected " + std::to_string(frame_count) +
                          " frame slots, got " +
                          std::to_string(t.frames.size()));
    }
    bool any = false;
    for (const auto& m : t.frames) {
      if (!m) continue;
      if (m->height != height || m->width != width) {
        throw MismatchError(where + ": mask size differs from video size");
      }
      any = any || !m->empty();
    }
    if (!any) throw MismatchError(where + ": trajectory has no visible mask");
    if (!(t.score >= 0.0 && t.score <= 1.0)) {
      throw MismatchError(where + ": score outside [0, 1]");
    }
  }
}

}  // namespace vidcut
