#pragma once

#include <filesystem>
#include <vector>

#include "vidcut/types.hpp"

namespace vidcut {

// Any 8-bit or 16-bit PNG is converted to 8-bit RGB (alpha dropped, gray
// expanded).
RgbImage read_png_rgb(const std::filesystem::path& path);
void write_png_rgb(const RgbImage& image, const std::filesystem::path& path);

// Single-channel 8-bit label map: 0 is background, k marks instance k.
struct LabelMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> labels;
};

LabelMap read_png_labels(const std::filesystem::path& path);
void write_png_labels(const LabelMap& labels,
                      const std::filesystem::path& path);

// Paints masks in order; a pixel keeps the first label that claims it.
// At most 255 masks.
LabelMap masks_to_labels(const std::vector<BinaryMask>& masks);
std::vector<BinaryMask> labels_to_masks(const LabelMap& labels);

}  // namespace vidcut
