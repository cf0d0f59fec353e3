#pragma once

#include <Eigen/Dense>

#include "vidcut/types.hpp"

namespace vidcut {

// Weight assigned to patch pairs whose cosine similarity falls below tau.
inline constexpr double kAffinityEpsilon = 1e-5;
inline constexpr double kDefaultTau = 0.15;
inline constexpr double kDefaultEigenTolerance = 1e-8;
// Dense solves beyond this size are refused.
inline constexpr int kMaxDenseNodes = 4096;

struct AffinityGraph {
  Eigen::MatrixXd weights;
  Eigen::VectorXd degrees;

  int size() const { return static_cast<int>(weights.rows()); }

  // Recomputes degrees from weights.
  void update_degrees();
  // Throws NumericError unless W is symmetric (1e-12), has a positive
  // diagonal and positive degrees.
  void validate() const;
};

struct FiedlerResult {
  double eigenvalue = 0.0;
  Eigen::VectorXd eigenvector;  // unit D-norm, largest-magnitude entry > 0
  double residual = 0.0;        // ||(D - W)x - lambda D x||_2
};

// Raw cosine similarity K_i.K_j / (|K_i| |K_j|) between every patch pair.
// Throws NumericError on a zero-norm feature.
Eigen::MatrixXd cosine_affinity(const FeatureMap& fm);

// Cosine affinity binarized at tau: entries >= tau become 1 and the rest
// kAffinityEpsilon. tau == 0 keeps the raw cosines instead, with entries
// below kAffinityEpsilon lifted to it so the graph stays connected.
AffinityGraph build_affinity(const FeatureMap& fm, double tau = kDefaultTau);
AffinityGraph graph_from_weights(Eigen::MatrixXd weights);

// Second-smallest generalized eigenpair of (D - W)x = lambda D x, solved
// through the symmetric matrix I - D^-1/2 W D^-1/2.
//
// Throws MismatchError for fewer than 2 nodes or more than kMaxDenseNodes,
// NumericError when the LAPACK solve fails or the residual exceeds
// tol * ||x||.
FiedlerResult fiedler(const AffinityGraph& graph,
                      double tol = kDefaultEigenTolerance);

// Foreground side of the Fiedler vector on a rows x cols patch grid.
//
// Patches with x >= mean(x) form one side. The foreground is the side
// holding the largest |x|, swapped when it covers three or more grid
// corners. Patches flagged in `excluded` (already claimed by earlier masks)
// never enter the foreground. With `seed_component_only`, only the
// 4-connected component containing the foreground's largest-|x| patch is
// kept.
//
// Throws DegeneratePartition when either side (or the foreground after
// exclusion) is empty.
BinaryMask bipartition(const FiedlerResult& fr, int rows, int cols,
                       const BinaryMask* excluded = nullptr,
                      bool seed_component_only = true);

// cut(A,B)/assoc(A,V) + cut(A,B)/assoc(B,V) with A = patches set in
// `partition`. Throws MismatchError when a side is empty.
double ncut_value(const AffinityGraph& graph, const BinaryMask& partition);

}  // namespace vidcut
