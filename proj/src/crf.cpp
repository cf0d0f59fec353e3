#include "vidcut/crf.hpp"

#include <algorithm>
#include <cmath>

#include "vidcut/error.hpp"

namespace vidcut {
namespace {

struct Offset {
  int dr;
  int dc;
  double gauss;      // gauss_weight * exp(-d^2 / 2 sigma_g^2)
  double bilateral;  // bilateral_weight * exp(-d^2 / 2 sigma_xy^2)
};

std::vector<Offset> window(const CrfParams& p) {
  std::vector<Offset> out;
  const int r = p.neighborhood_radius;
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      const int d2 = dr * dr + dc * dc;
      if (d2 == 0 || d2 > r * r) continue;
      out.push_back({dr, dc,
                     p.gauss_weight * std::exp(-d2 / (2.0 * p.gauss_sigma_xy * p.gauss_sigma_xy)),
                     p.bilateral_weight *
                         std::exp(-d2 / (2.0 * p.bilateral_sigma_xy * p.bilateral_sigma_xy))});
    }
  }
  return out;
}

}  // namespace

void CrfParams::validate() const {
  if (iterations < 1) throw ConfigError("crf iterations must be >= 1");
  if (!(unary_fg_prob > 0.5 && unary_fg_prob < 1.0)) {
    throw ConfigError("crf unary_fg_prob must lie in (0.5, 1)");
  }
  if (!(gauss_sigma_xy > 0.0 && bilateral_sigma_xy > 0.0 && bilateral_sigma_rgb > 0.0)) {
    throw ConfigError("crf sigmas must be positive");
  }
  if (gauss_weight < 0.0 || bilateral_weight < 0.0) {
    throw ConfigError("crf weights must be non-negative");
  }
  if (neighborhood_radius < 1) throw ConfigError("crf neighborhood_radius must be >= 1");
}

std::vector<double> crf_marginals(const RgbImage& image, const BinaryMask& mask,
                                  const CrfParams& params, const CrfObserver& observer) {
  params.validate();
  if (image.height != mask.height || image.width != mask.width) {
    throw MismatchError("crf image and mask sizes differ");
  }
  const int h = mask.height;
  const int w = mask.width;
  const std::size_t n = mask.size();

  const double log_hi = std::log(params.unary_fg_prob);
  const double log_lo = std::log(1.0 - params.unary_fg_prob);
  // Negative unary energies, i.e. log-probabilities.
  std::vector<double> logp_fg(n), logp_bg(n);
  for (std::size_t i = 0; i < n; ++i) {
    logp_fg[i] = mask.bits[i] ? log_hi : log_lo;
    logp_bg[i] = mask.bits[i] ? log_lo : log_hi;
  }

  const std::vector<Offset> offsets = window(params);
  std::vector<double> color_lut(3 * 255 * 255 + 1);
  const double inv_two_var = 1.0 / (2.0 * params.bilateral_sigma_rgb * params.bilateral_sigma_rgb);
  for (std::size_t d2 = 0; d2 < color_lut.size(); ++d2) {
    color_lut[d2] = std::exp(-static_cast<double>(d2) * inv_two_var);
  }

  std::vector<double> q_fg(n), q_bg(n), next_fg(n), next_bg(n);
  auto normalize = [](double a, double b, double& qa, double& qb) {
    const double m = std::max(a, b);
    const double ea = std::exp(a - m);
    const double eb = std::exp(b - m);
    qa = ea / (ea + eb);
    qb = eb / (ea + eb);
  };
  for (std::size_t i = 0; i < n; ++i) normalize(logp_fg[i], logp_bg[i], q_fg[i], q_bg[i]);

  const std::uint8_t* px = image.data.data();
  for (int it = 0; it < params.iterations; ++it) {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        const std::uint8_t* pi = px + i * 3;
        double msg_fg = 0.0;
        double msg_bg = 0.0;
        for (const Offset& o : offsets) {
          const int rr = r + o.dr;
          const int cc = c + o.dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
          const std::uint8_t* pj = px + j * 3;
          const int d0 = pi[0] - pj[0];
          const int d1 = pi[1] - pj[1];
          const int d2 = pi[2] - pj[2];
          const double k = o.gauss + o.bilateral * color_lut[d0 * d0 + d1 * d1 + d2 * d2];
          msg_fg += k * q_fg[j];
          msg_bg += k * q_bg[j];
        }
        normalize(logp_fg[i] + msg_fg, logp_bg[i] + msg_bg, next_fg[i], next_bg[i]);
      }
    }
    q_fg.swap(next_fg);
    q_bg.swap(next_bg);
    if (observer) observer(it, q_bg, q_fg);
  }
  return q_fg;
}

BinaryMask crf_refine(const RgbImage& image, const BinaryMask& mask, const CrfParams& params) {
  const std::vector<double> q_fg = crf_marginals(image, mask, params);
  BinaryMask out(mask.height, mask.width);
  for (std::size_t i = 0; i < q_fg.size(); ++i) out.bits[i] = q_fg[i] > 0.5 ? 1 : 0;
  return out;
}

}  // namespace vidcut
