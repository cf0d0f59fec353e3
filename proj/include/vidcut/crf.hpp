#pragma once

#include <functional>
#include <span>

#include "vidcut/types.hpp"

namespace vidcut {

struct CrfParams {
  int iterations = 10;
  double unary_fg_prob = 0.9;
  double gauss_sigma_xy = 3.0;
  double gauss_weight = 3.0;
  double bilateral_sigma_xy = 60.0;
  double bilateral_sigma_rgb = 10.0;
  double bilateral_weight = 5.0;
  int neighborhood_radius = 11;

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Called after every mean-field update with the background and foreground
// marginals of each pixel.
using CrfObserver = std::function<void(int iteration,
                                       std::span<const double> q_background,
                                       std::span<const double> q_foreground)>;

// Foreground marginals after params.iterations rounds of mean-field
// inference on a two-label fully connected CRF, truncated to pixels within
// neighborhood_radius (Euclidean). Unaries are -log p with p = unary_fg_prob
// on the mask; pairwise terms are Potts with a spatial Gaussian and a
// bilateral kernel.
std::vector<double> crf_marginals(const RgbImage& image, const BinaryMask& mask,
                                  const CrfParams& params,
                                  const CrfObserver& observer = {});

// Argmax of crf_marginals. Throws MismatchError when image and mask sizes
// differ.
BinaryMask crf_refine(const RgbImage& image, const BinaryMask& mask,
                      const CrfParams& params = {});

}  // namespace vidcut
