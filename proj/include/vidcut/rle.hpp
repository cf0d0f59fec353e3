#pragma once

#include "vidcut/types.hpp"

namespace vidcut {

RleMask rle_encode(const BinaryMask& mask);

// Throws MismatchError when the counts do not sum to height * width.
BinaryMask rle_decode(const RleMask& rle);

}  // namespace vidcut
