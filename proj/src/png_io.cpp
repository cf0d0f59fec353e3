#include "vidcut/png_io.hpp"

#include <png.h>

#include <cstring>

#include "vidcut/error.hpp"

namespace vidcut {
namespace {

struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> read_png(const std::filesystem::path& path,
                                   png_uint_32 format, int& height, int& width) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
    throw IoError("cannot read PNG " + path.string() + ": " + png.image.message);
  }
  png.image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr)) {
    throw IoError("cannot decode PNG " + path.string() + ": " + png.image.message);
  }
  height = static_cast<int>(png.image.height);
  width = static_cast<int>(png.image.width);
  return buffer;
}

void write_png(const std::filesystem::path& path, png_uint_32 format, int height,
               int width, const std::uint8_t* data) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(width);
  png.image.height = static_cast<png_uint_32>(height);
  png.image.format = format;
  if (!png_image_write_to_file(&png.image, path.c_str(), 0, data, 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + png.image.message);
  }
}

}  // namespace

RgbImage read_png_rgb(const std::filesystem::path& path) {
  RgbImage img;
  img.data = read_png(path, PNG_FORMAT_RGB, img.height, img.width);
  return img;
}

void write_png_rgb(const RgbImage& image, const std::filesystem::path& path) {
  write_png(path, PNG_FORMAT_RGB, image.height, image.width, image.data.data());
}

LabelMap read_png_labels(const std::filesystem::path& path) {
  LabelMap labels;
  labels.labels = read_png(path, PNG_FORMAT_GRAY, labels.height, labels.width);
  return labels;
}

void write_png_labels(const LabelMap& labels, const std::filesystem::path& path) {
  write_png(path, PNG_FORMAT_GRAY, labels.height, labels.width,
            labels.labels.data());
}

LabelMap masks_to_labels(const std::vector<BinaryMask>& masks) {
  if (masks.size() > 255) throw ConfigError("at most 255 masks fit a label map");
  LabelMap out;
  if (masks.empty()) return out;
  out.height = masks.front().height;
  out.width = masks.front().width;
  out.labels.assign(masks.front().size(), 0);
  for (std::size_t k = 0; k < masks.size(); ++k) {
    if (!masks[k].same_shape(masks.front())) {
      throw MismatchError("label map masks differ in size");
    }
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
      if (masks[k].bits[i] && out.labels[i] == 0) {
        out.labels[i] = static_cast<std::uint8_t>(k + 1);
      }
    }
  }
  return out;
}

std::vector<BinaryMask> labels_to_masks(const LabelMap& labels) {
  std::uint8_t max_label = 0;
  for (auto v : labels.labels) max_label = std::max(max_label, v);
  std::vector<BinaryMask> masks(max_label, BinaryMask(labels.height, labels.width));
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    if (labels.labels[i]) masks[labels.labels[i] - 1].bits[i] = 1;
  }
  return masks;
}

}  // namespace vidcut
