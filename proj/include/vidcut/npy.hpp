#pragma once

#include <filesystem>
#include <vector>

#include "vidcut/types.hpp"

namespace vidcut {

// A dense floating-point tensor read from an NPY file, widened to double.
struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<double> values;  // C order
  int word_size = 8;           // 4 or 8 as stored on disk
};

// Reads NPY v1.0/v2.0 (and v3.0, whose header is identical to v2.0) with a
// float32/float64 dtype of either byte order. Fortran-ordered arrays are
// rejected.
NpyArray read_npy(const std::filesystem::path& path);

// Writes a little-endian C-order float64 (or float32 when `as_float32`)
// NPY v1.0 file.
void write_npy(const std::filesystem::path& path,
               const std::vector<std::size_t>& shape,
               const std::vector<double>& values, bool as_float32 = false);

// Sidecar of `foo.npy` is `foo.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& npy_path);

// Loads a (rows, cols, dim) tensor plus its sidecar
// {"patch_size", "image_height", "image_width"}.
//
// Errors: IoError for unreadable or malformed tensors (including rank != 3),
// ConfigError naming the path when the sidecar is missing or invalid,
// NumericError "non-finite feature" for NaN/Inf entries.
FeatureMap load_feature_map(const std::filesystem::path& path);

// Writes the tensor and its sidecar.
void save_feature_map(const FeatureMap& fm, const std::filesystem::path& path,
                      bool as_float32 = false);

}  // namespace vidcut
