#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vidcut {

// Per-patch key features of a vision transformer, row-major over the patch
// grid: feature(r, c) occupies data[(r * cols + c) * dim, +dim).
struct FeatureMap {
  int rows = 0;
  int cols = 0;
  int dim = 0;
  std::vector<double> data;
  int patch_size = 0;
  int image_height = 0;
  int image_width = 0;

  int patch_count() const { return rows * cols; }
  std::span<const double> feature(int patch) const {
    return {data.data() + static_cast<std::size_t>(patch) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<double> feature(int patch) {
    return {data.data() + static_cast<std::size_t>(patch) * dim,
            static_cast<std::size_t>(dim)};
  }

  // Throws if any invariant is broken (length, grid/image consistency,
  // finiteness).
  void validate() const;
};

struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;  // row-major, 0 or 1

  BinaryMask() = default;
  BinaryMask(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), bits(static_cast<std::size_t>(h) * w, fill) {}

  std::size_t size() const { return bits.size(); }
  bool at(int r, int c) const {
    return bits[static_cast<std::size_t>(r) * width + c] != 0;
  }
  void set(int r, int c, bool v = true) {
    bits[static_cast<std::size_t>(r) * width + c] = v ? 1 : 0;
  }
  std::size_t area() const;
  bool empty() const { return area() == 0; }
  bool same_shape(const BinaryMask& o) const {
    return height == o.height && width == o.width;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

struct MaskSet {
  std::vector<BinaryMask> masks;
  std::vector<double> scores;

  std::size_t size() const { return masks.size(); }
  bool empty() const { return masks.empty(); }
};

// 8-bit interleaved RGB.
struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, fill) {}

  std::uint8_t& at(int r, int c, int ch) {
    return data[(static_cast<std::size_t>(r) * width + c) * 3 + ch];
  }
  std::uint8_t at(int r, int c, int ch) const {
    return data[(static_cast<std::size_t>(r) * width + c) * 3 + ch];
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

struct Trajectory {
  std::int64_t instance_id = 0;
  std::vector<std::optional<BinaryMask>> frames;  // nullopt = not visible
  double score = 1.0;

  std::size_t frame_count() const { return frames.size(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct VideoRecord {
  std::string video_id;
  int frame_count = 0;
  int height = 0;
  int width = 0;
  std::vector<std::string> frame_paths;
  std::vector<Trajectory> trajectories;

  // Throws MismatchError on broken frame counts, dimensions or empty
  // trajectories.
  void validate() const;

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

// Column-major run lengths starting with a (possibly empty) background run.
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const RleMask&, const RleMask&) = default;
};

}  // namespace vidcut
