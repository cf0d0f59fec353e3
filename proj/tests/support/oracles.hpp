#pragma once

// Reference implementations used only by tests. Each one is written from
// the definitions directly (pixel loops, enumeration) and shares no code
// with the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vidcut/types.hpp"

namespace vidcut::oracle {

// ---------------------------------------------------------------- spectral

inline double ncut_of(const Eigen::MatrixXd& w, const std::vector<int>& side) {
  double cut = 0.0, assoc_a = 0.0, assoc_b = 0.0;
  const int n = static_cast<int>(w.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (side[i]) {
        assoc_a += w(i, j);
      } else {
        assoc_b += w(i, j);
      }
      if (side[i] && !side[j]) cut += w(i, j);
    }
  }
  return cut / assoc_a + cut / assoc_b;
}

// Minimum NCut over every proper bipartition (node n-1 pinned to side B).
inline double min_ncut(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> side(n);
  for (unsigned bits = 1; bits < (1u << (n - 1)); ++bits) {
    for (int i = 0; i < n; ++i) side[i] = (bits >> i) & 1u;
    best = std::min(best, ncut_of(w, side));
  }
  return best;
}

// All generalized eigenvalues of (D - W) x = lambda D x, ascending.
inline Eigen::VectorXd generalized_spectrum(const Eigen::MatrixXd& w) {
  const Eigen::VectorXd d = w.rowwise().sum();
  const Eigen::MatrixXd dm = d.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(dm - w, dm);
  return es.eigenvalues();
}

// -------------------------------------------------------------- trajectories

inline std::size_t count_and(const std::optional<BinaryMask>& a,
                             const std::optional<BinaryMask>& b) {
  if (!a || !b) return 0;
  std::size_t n = 0;
  for (int r = 0; r < a->height; ++r) {
    for (int c = 0; c < a->width; ++c) n += (a->at(r, c) && b->at(r, c)) ? 1 : 0;
  }
  return n;
}

inline std::size_t count_or(const std::optional<BinaryMask>& a,
                            const std::optional<BinaryMask>& b) {
  const BinaryMask& ref = a ? *a : *b;
  std::size_t n = 0;
  for (int r = 0; r < ref.height; ++r) {
    for (int c = 0; c < ref.width; ++c) {
      const bool x = a && a->at(r, c);
      const bool y = b && b->at(r, c);
      n += (x || y) ? 1 : 0;
    }
  }
  return n;
}

inline double traj_iou(const Trajectory& a, const Trajectory& b) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t f = 0; f < a.frames.size(); ++f) {
    if (!a.frames[f] && !b.frames[f]) continue;
    inter += count_and(a.frames[f], b.frames[f]);
    uni += count_or(a.frames[f], b.frames[f]);
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline double present_area(const Trajectory& t) {
  double sum = 0.0;
  int n = 0;
  for (const auto& m : t.frames) {
    if (!m) continue;
    std::size_t a = 0;
    for (auto b : m->bits) a += b ? 1 : 0;
    if (a == 0) continue;
    sum += static_cast<double>(a);
    ++n;
  }
  return n ? sum / n : 0.0;
}

// ----------------------------------------------------------------- AP / AR

// 0 = any size, 1 small, 2 medium, 3 large.
inline bool area_in(double area, int bucket) {
  if (bucket == 0) return true;
  const int b = area < 1024.0 ? 1 : (area < 9216.0 ? 2 : 3);
  return b == bucket;
}

// Pixel counts are expensive on large frames; memoize per trajectory pair.
struct IouCache {
  std::map<std::pair<const Trajectory*, const Trajectory*>, double> iou;
  std::map<const Trajectory*, double> area;
  double get_iou(const Trajectory& a, const Trajectory& b) {
    auto [it, fresh] = iou.try_emplace({&a, &b}, 0.0);
    if (fresh) it->second = traj_iou(a, b);
    return it->second;
  }
  double get_area(const Trajectory& t) {
    auto [it, fresh] = area.try_emplace(&t, 0.0);
    if (fresh) it->second = present_area(t);
    return it->second;
  }
};

struct OracleMatch {
  std::vector<std::pair<double, int>> dets;  // (score, 1 tp / 0 fp), ranked, ignored removed
  int gt_total = 0;
  int gt_hit = 0;
};

// Greedy matching written from scratch: detections are visited in global
// rank order (score descending; ties keep video order, then in-video rank).
inline OracleMatch oracle_match(const std::vector<VideoRecord>& preds,
                                const std::vector<VideoRecord>& gts, double thr, int bucket,
                                std::size_t max_det, IouCache& cache) {
  struct Cand {
    double score;
    int video;  // index into gts
    int rank;
    int pred;
  };
  std::vector<Cand> cands;
  for (std::size_t v = 0; v < gts.size(); ++v) {
    const VideoRecord* p = nullptr;
    for (const auto& pr : preds) {
      if (pr.video_id == gts[v].video_id) p = &pr;
    }
    if (!p) continue;
    std::vector<int> idx(p->trajectories.size());
    std::iota(idx.begin(), idx.end(), 0);
    // Insertion sort keeps equal scores in input order.
    for (std::size_t i = 1; i < idx.size(); ++i) {
      for (std::size_t j = i; j > 0; --j) {
        if (p->trajectories[idx[j]].score > p->trajectories[idx[j - 1]].score) {
          std::swap(idx[j], idx[j - 1]);
        } else {
          break;
        }
      }
    }
    for (std::size_t k = 0; k < idx.size() && k < max_det; ++k) {
      cands.push_back({p->trajectories[idx[k]].score, static_cast<int>(v), static_cast<int>(k),
                       idx[k]});
    }
  }
  // Selection of the next detection by explicit scan.
  std::vector<char> used(cands.size(), 0);
  std::vector<std::vector<char>> taken(gts.size());
  OracleMatch out;
  for (std::size_t v = 0; v < gts.size(); ++v) {
    taken[v].assign(gts[v].trajectories.size(), 0);
    for (const auto& g : gts[v].trajectories) out.gt_total += area_in(cache.get_area(g), bucket);
  }
  for (std::size_t step = 0; step < cands.size(); ++step) {
    int pick = -1;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (used[i]) continue;
      if (pick < 0) {
        pick = static_cast<int>(i);
        continue;
      }
      const Cand& a = cands[i];
      const Cand& b = cands[pick];
      const bool better = a.score > b.score ||
                          (a.score == b.score &&
                           (a.video < b.video || (a.video == b.video && a.rank < b.rank)));
      if (better) pick = static_cast<int>(i);
    }
    used[pick] = 1;
    const Cand& c = cands[pick];
    const VideoRecord& gv = gts[c.video];
    const VideoRecord* pv = nullptr;
    for (const auto& pr : preds) {
      if (pr.video_id == gv.video_id) pv = &pr;
    }
    const Trajectory& det = pv->trajectories[c.pred];
    // Non-ignored ground truth first, then ignored; highest IoU, first index on ties.
    int match = -1;
    bool match_ignored = false;
    for (int pass = 0; pass < 2 && match < 0; ++pass) {
      double best = -1.0;
      for (std::size_t g = 0; g < gv.trajectories.size(); ++g) {
        if (taken[c.video][g]) continue;
        const bool ign = !area_in(cache.get_area(gv.trajectories[g]), bucket);
        if (ign != (pass == 1)) continue;
        const double iou = cache.get_iou(det, gv.trajectories[g]);
        if (iou >= thr && iou > best) {
          best = iou;
          match = static_cast<int>(g);
        }
      }
      match_ignored = pass == 1;
    }
    if (match >= 0) {
      taken[c.video][match] = 1;
      if (match_ignored) continue;
      ++out.gt_hit;
      out.dets.push_back({c.score, 1});
    } else {
      if (!area_in(cache.get_area(det), bucket)) continue;
      out.dets.push_back({c.score, 0});
    }
  }
  return out;
}

// 101-point interpolated AP from the definition: at every recall level r,
// the best precision achieved at any recall >= r.
inline std::optional<double> oracle_ap(const OracleMatch& m) {
  if (m.gt_total == 0) return std::nullopt;
  std::vector<double> rec, prec;
  int tp = 0;
  for (std::size_t i = 0; i < m.dets.size(); ++i) {
    tp += m.dets[i].second;
    rec.push_back(static_cast<double>(tp) / m.gt_total);
    prec.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
  }
  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    double best = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i] >= r) best = std::max(best, prec[i]);
    }
    sum += best;
  }
  return sum / 101.0;
}

struct OracleReport {
  std::vector<std::optional<double>> ap;  // per threshold
  std::optional<double> ap_mean, ap_small, ap_medium, ap_large;
  std::map<int, std::optional<double>> ar;
};

inline OracleReport oracle_report(const std::vector<VideoRecord>& preds,
                                  const std::vector<VideoRecord>& gts,
                                  const std::vector<double>& thresholds) {
  IouCache cache;
  OracleReport rep;
  std::optional<double> per_bucket[4];
  for (int bucket = 0; bucket < 4; ++bucket) {
    double sum = 0.0;
    bool defined = true;
    for (double t : thresholds) {
      const auto ap = oracle_ap(oracle_match(preds, gts, t, bucket, 100, cache));
      if (bucket == 0) rep.ap.push_back(ap);
      if (!ap) defined = false;
      sum += ap.value_or(0.0);
    }
    if (defined) per_bucket[bucket] = sum / thresholds.size();
  }
  rep.ap_mean = per_bucket[0];
  rep.ap_small = per_bucket[1];
  rep.ap_medium = per_bucket[2];
  rep.ap_large = per_bucket[3];
  for (int k : {1, 10, 100}) {
    double sum = 0.0;
    bool defined = true;
    for (double t : thresholds) {
      const OracleMatch m = oracle_match(preds, gts, t, 0, k, cache);
      if (m.gt_total == 0) defined = false;
      sum += m.gt_total ? static_cast<double>(m.gt_hit) / m.gt_total : 0.0;
    }
    rep.ar[k] = defined ? std::optional<double>(sum / thresholds.size()) : std::nullopt;
  }
  return rep;
}

// ------------------------------------------------------------------- DAVIS

inline bool is_edge(const BinaryMask& m, int r, int c) {
  if (!m.at(r, c)) return false;
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (int k = 0; k < 4; ++k) {
    const int rr = r + dr[k];
    const int cc = c + dc[k];
    if (rr < 0 || cc < 0 || rr >= m.height || cc >= m.width || !m.at(rr, cc)) return true;
  }
  return false;
}

// Boundary F with matching by explicit distance search.
inline double boundary_f(const BinaryMask& p, const BinaryMask& g) {
  const double tol = std::ceil(0.008 * std::hypot(p.height, p.width));
  std::vector<std::pair<int, int>> bp, bg;
  for (int r = 0; r < p.height; ++r) {
    for (int c = 0; c < p.width; ++c) {
      if (is_edge(p, r, c)) bp.emplace_back(r, c);
      if (is_edge(g, r, c)) bg.emplace_back(r, c);
    }
  }
  if (bp.empty() && bg.empty()) return 1.0;
  if (bp.empty() || bg.empty()) return 0.0;
  auto hits = [&](const auto& from, const auto& to) {
    double n = 0;
    for (auto [r, c] : from) {
      for (auto [rr, cc] : to) {
        const double dr = r - rr, dc = c - cc;
        if (dr * dr + dc * dc <= tol * tol) {
          n += 1;
          break;
        }
      }
    }
    return n;
  };
  const double prec = hits(bp, bg) / bp.size();
  const double rec = hits(bg, bp) / bg.size();
  return prec + rec == 0 ? 0.0 : 2 * prec * rec / (prec + rec);
}

struct Jf {
  double j = 0, f = 0;
};

inline Jf pair_jf(const Trajectory& p, const Trajectory& g, int h, int w) {
  Jf s;
  const BinaryMask empty(h, w);
  for (std::size_t f = 0; f < g.frames.size(); ++f) {
    const BinaryMask& pm = p.frames[f] ? *p.frames[f] : empty;
    const BinaryMask& gm = g.frames[f] ? *g.frames[f] : empty;
    std::size_t i = 0, u = 0;
    for (std::size_t k = 0; k < pm.bits.size(); ++k) {
      i += (pm.bits[k] && gm.bits[k]) ? 1 : 0;
      u += (pm.bits[k] || gm.bits[k]) ? 1 : 0;
    }
    s.j += u == 0 ? 1.0 : static_cast<double>(i) / u;
    s.f += boundary_f(pm, gm);
  }
  s.j /= g.frames.size();
  s.f /= g.frames.size();
  return s;
}

// Best total of score[g][p] over injective assignments (of the smaller
// side into the larger), by enumeration.
inline double best_assignment(const std::vector<std::vector<double>>& score) {
  const int rows = static_cast<int>(score.size());
  const int cols = rows ? static_cast<int>(score[0].size()) : 0;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> used(cols, 0);
  auto rec = [&](auto&& self, int g, double acc) -> void {
    if (g == rows) {
      best = std::max(best, acc);
      return;
    }
    // A row may stay unassigned only if there are more rows than columns.
    const int free_cols = cols - std::accumulate(used.begin(), used.end(), 0);
    if (rows - g > free_cols) self(self, g + 1, acc);
    for (int p = 0; p < cols; ++p) {
      if (used[p]) continue;
      used[p] = 1;
      self(self, g + 1, acc + score[g][p]);
      used[p] = 0;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

// ------------------------------------------------------------- compositing

// Per-pixel application of the paste: the source is first stretched onto
// the target frame, then scaled by s, rotated by theta about the frame
// center and shifted by (dx, dy). Every target pixel center is pulled back
// through the inverse of that affine map.
struct PasteExpectation {
  BinaryMask mask;              // pasted region in target coordinates
  std::vector<double> values;   // unrounded expected intensities, 3 per pixel
};

inline PasteExpectation expected_paste(const RgbImage& target, const RgbImage& source,
                                       const BinaryMask& mask, double scale, double dx,
                                       double dy, double rotation_deg, double brightness,
                                       double contrast) {
  const double th = rotation_deg * 3.14159265358979323846 / 180.0;
  Eigen::Matrix2d rot;
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Eigen::Matrix2d stretch = Eigen::Vector2d(static_cast<double>(target.width) / source.width,
                                            static_cast<double>(target.height) / source.height)
                                .asDiagonal();
  const Eigen::Vector2d center(target.width / 2.0, target.height / 2.0);
  // q = A p + b maps source (x, y) to target (x, y).
  const Eigen::Matrix2d a = scale * rot * stretch;
  const Eigen::Vector2d b = center - scale * rot * center + Eigen::Vector2d(dx, dy);
  const Eigen::Matrix2d a_inv = a.inverse();

  double gray = 0.0;
  double n = 0.0;
  for (int r = 0; r < source.height; ++r) {
    for (int c = 0; c < source.width; ++c) {
      if (!mask.at(r, c)) continue;
      for (int ch = 0; ch < 3; ++ch) gray += source.at(r, c, ch);
      n += 3;
    }
  }
  const double mu = brightness * gray / n;

  auto px = [&](int r, int c, int ch) {
    r = std::clamp(r, 0, source.height - 1);
    c = std::clamp(c, 0, source.width - 1);
    return static_cast<double>(source.at(r, c, ch));
  };

  PasteExpectation out{BinaryMask(target.height, target.width),
                       std::vector<double>(target.data.size())};
  for (int r = 0; r < target.height; ++r) {
    for (int c = 0; c < target.width; ++c) {
      const Eigen::Vector2d p = a_inv * (Eigen::Vector2d(c + 0.5, r + 0.5) - b);
      const int mx = static_cast<int>(std::floor(p.x()));
      const int my = static_cast<int>(std::floor(p.y()));
      const bool inside = mx >= 0 && my >= 0 && mx < mask.width && my < mask.height &&
                          mask.at(my, mx);
      for (int ch = 0; ch < 3; ++ch) {
        const std::size_t k = (static_cast<std::size_t>(r) * target.width + c) * 3 + ch;
        if (!inside) {
          out.values[k] = target.data[k];
          continue;
        }
        const double gx = p.x() - 0.5;
        const double gy = p.y() - 0.5;
        const int x0 = static_cast<int>(std::floor(gx));
        const int y0 = static_cast<int>(std::floor(gy));
        const double fx = gx - x0;
        const double fy = gy - y0;
        const double v = (1 - fy) * ((1 - fx) * px(y0, x0, ch) + fx * px(y0, x0 + 1, ch)) +
                         fy * ((1 - fx) * px(y0 + 1, x0, ch) + fx * px(y0 + 1, x0 + 1, ch));
        out.values[k] = std::clamp(contrast * (brightness * v - mu) + mu, 0.0, 255.0);
      }
      if (inside) out.mask.set(r, c);
    }
  }
  return out;
}

}  // namespace vidcut::oracle
