#include "vidcut/rle.hpp"

#include <string>

#include "vidcut/error.hpp"

namespace vidcut {

RleMask rle_encode(const BinaryMask& mask) {
  RleMask rle{mask.height, mask.width, {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (int c = 0; c < mask.width; ++c) {
    for (int r = 0; r < mask.height; ++r) {
      const std::uint8_t v = mask.at(r, c) ? 1 : 0;
      if (v != current) {
        rle.counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

BinaryMask rle_decode(const RleMask& rle) {
  const std::uint64_t total = static_cast<std::uint64_t>(rle.height) * rle.width;
  std::uint64_t sum = 0;
  for (auto c : rle.counts) sum += c;
  if (sum != total) {
    throw MismatchError("RLE counts sum to " + std::to_string(sum) +
                        ", expected " + std::to_string(total));
  }
  BinaryMask mask(rle.height, rle.width);
  std::uint64_t pos = 0;
  bool value = false;
  for (auto count : rle.counts) {
    if (value) {
      for (std::uint64_t k = pos; k < pos + count; ++k) {
        // k walks column-major.
        mask.set(static_cast<int>(k % rle.height), static_cast<int>(k / rle.height));
      }
    }
    pos += count;
    value = !value;
  }
  return mask;
}

}  // namespace vidcut
