#include "vidcut/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>

#include "vidcut/error.hpp"

namespace vidcut {

void AffinityGraph::update_degrees() { degrees = weights.rowwise().sum(); }

void AffinityGraph::validate() const {
  const Eigen::Index n = weights.rows();
  if (weights.cols() != n || degrees.size() != n) {
    throw NumericError("affinity graph is not square");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(weights(i, i) > 0.0)) throw NumericError("affinity diagonal must be positive");
    if (!(degrees(i) > 0.0)) throw NumericError("affinity degrees must be positive");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(weights(i, j) - weights(j, i)) > 1e-12) {
        throw NumericError("affinity matrix is not symmetric");
      }
      if (weights(i, j) < 0.0) throw NumericError("negative affinity");
    }
  }
}

Eigen::MatrixXd cosine_affinity(const FeatureMap& fm) {
  const int n = fm.patch_count();
  Eigen::MatrixXd f(n, fm.dim);
  for (int i = 0; i < n; ++i) {
    auto k = fm.feature(i);
    Eigen::Map<const Eigen::RowVectorXd> row(k.data(), fm.dim);
    const double norm = row.norm();
    if (!(norm > 0.0)) {
      throw NumericError("zero-norm feature vector at patch " + std::to_string(i));
    }
    f.row(i) = row / norm;
  }
  Eigen::MatrixXd cos = Eigen::MatrixXd::Zero(n, n);
  cos.selfadjointView<Eigen::Lower>().rankUpdate(f);
  cos.triangularView<Eigen::StrictlyUpper>() = cos.transpose();
  return cos;
}

AffinityGraph graph_from_weights(Eigen::MatrixXd weights) {
  AffinityGraph g;
  g.weights = std::move(weights);
  g.update_degrees();
  g.validate();
  return g;
}

AffinityGraph build_affinity(const FeatureMap& fm, double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) throw ConfigError("tau must lie in [0, 1)");
  Eigen::MatrixXd w = cosine_affinity(fm);
  if (tau == 0.0) {
    w = w.cwiseMax(kAffinityEpsilon);
  } else {
    w = (w.array() >= tau).select(1.0, Eigen::MatrixXd::Constant(w.rows(), w.cols(),
                                                                 kAffinityEpsilon));
  }
  return graph_from_weights(std::move(w));
}

FiedlerResult fiedler(const AffinityGraph& graph, double tol) {
  const int n = graph.size();
  if (n < 2) throw MismatchError("fiedler needs at least 2 nodes");
  if (n > kMaxDenseNodes) {
    throw MismatchError("graph with " + std::to_string(n) +
                        " nodes exceeds the dense solver limit");
  }
  const Eigen::VectorXd inv_sqrt = graph.degrees.cwiseSqrt().cwiseInverse();
  // Lower triangle of I - D^-1/2 W D^-1/2, column-major for LAPACK.
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      m(i, j) = (i == j ? 1.0 : 0.0) - inv_sqrt(i) * graph.weights(i, j) * inv_sqrt(j);
    }
  }
  lapack_int found = 0;
  Eigen::VectorXd w(n);
  Eigen::VectorXd z(n);
  std::array<lapack_int, 2> support{};
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', n, m.data(), n, 0.0, 0.0, 2, 2, 0.0,
      &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != 1) {
    throw NumericError("eigensolver failed (info " + std::to_string(info) + ")");
  }

  FiedlerResult fr;
  fr.eigenvalue = w(0);
  fr.eigenvector = inv_sqrt.cwiseProduct(z);
  // z has unit norm, so x'Dx = z'z; renormalize against rounding.
  const double dnorm =
      std::sqrt(fr.eigenvector.dot(graph.degrees.cwiseProduct(fr.eigenvector)));
  fr.eigenvector /= dnorm;
  Eigen::Index arg = 0;
  fr.eigenvector.cwiseAbs().maxCoeff(&arg);
  if (fr.eigenvector(arg) < 0.0) fr.eigenvector = -fr.eigenvector;

  const Eigen::VectorXd& x = fr.eigenvector;
  const Eigen::VectorXd dx = graph.degrees.cwiseProduct(x);
  fr.residual = (dx - graph.weights * x - fr.eigenvalue * dx).norm();
  if (!(fr.residual <= tol * x.norm())) {
    throw NumericError("eigensolver did not converge: residual " +
                       std::to_string(fr.residual));
  }
  return fr;
}

BinaryMask bipartition(const FiedlerResult& fr, int rows, int cols,
                       const BinaryMask* excluded, bool seed_component_only) {
  const Eigen::VectorXd& x = fr.eigenvector;
  const int n = rows * cols;
  if (x.size() != n) throw MismatchError("eigenvector length differs from grid size");
  if (excluded && (excluded->height != rows || excluded->width != cols)) {
    throw MismatchError("exclusion mask differs from grid size");
  }
  const double mean = x.mean();
  std::vector<std::uint8_t> high(n);
  int high_count = 0;
  for (int i = 0; i < n; ++i) {
    high[i] = x(i) >= mean ? 1 : 0;
    high_count += high[i];
  }
  if (high_count == 0 || high_count == n) throw DegeneratePartition();

  Eigen::Index seed = 0;
  x.cwiseAbs().maxCoeff(&seed);
  std::uint8_t fg_side = high[seed];
  const std::array<int, 4> corners = {0, cols - 1, (rows - 1) * cols, n - 1};
  int corner_hits = 0;
  for (int c : corners) corner_hits += high[c] == fg_side ? 1 : 0;
  if (corner_hits >= 3) fg_side = 1 - fg_side;

  BinaryMask fg(rows, cols);
  int best = -1;
  for (int i = 0; i < n; ++i) {
    if (high[i] != fg_side || (excluded && excluded->bits[i])) continue;
    fg.bits[i] = 1;
    if (best < 0 || std::abs(x(i)) > std::abs(x(best))) best = i;
  }
  if (best < 0) throw DegeneratePartition();
  if (!seed_component_only) return fg;

  BinaryMask component(rows, cols);
  std::queue<int> frontier;
  frontier.push(best);
  component.bits[best] = 1;
  while (!frontier.empty()) {
    const int p = frontier.front();
    frontier.pop();
    const int r = p / cols;
    const int c = p % cols;
    const std::array<std::array<int, 2>, 4> steps = {{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
    for (const auto& [dr, dc] : steps) {
      const int nr = r + dr;
      const int nc = c + dc;
      if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
      const int q = nr * cols + nc;
      if (fg.bits[q] && !component.bits[q]) {
        component.bits[q] = 1;
        frontier.push(q);
      }
    }
  }
  return component;
}

double ncut_value(const AffinityGraph& graph, const BinaryMask& partition) {
  const int n = graph.size();
  if (static_cast<int>(partition.size()) != n) {
    throw MismatchError("partition size differs from graph size");
  }
  double cut = 0.0;
  double assoc_a = 0.0;
  double assoc_b = 0.0;
  for (int i = 0; i < n; ++i) {
    const bool in_a = partition.bits[i] != 0;
    (in_a ? assoc_a : assoc_b) += graph.degrees(i);
    if (!in_a) continue;
    for (int j = 0; j < n; ++j) {
      if (!partition.bits[j]) cut += graph.weights(i, j);
    }
  }
  if (assoc_a == 0.0 || assoc_b == 0.0) {
    throw MismatchError("ncut needs two non-empty sides");
  }
  return cut / assoc_a + cut / assoc_b;
}

}  // namespace vidcut
