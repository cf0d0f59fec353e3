#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "vidcut/error.hpp"
#include "vidcut/rng.hpp"
#include "vidcut/spectral.hpp"

using namespace vidcut;

namespace {

FeatureMap features(int rows, int cols, int dim, const std::vector<double>& data) {
  FeatureMap fm;
  fm.rows = rows;
  fm.cols = cols;
  fm.dim = dim;
  fm.patch_size = 1;
  fm.image_height = rows;
  fm.image_width = cols;
  fm.data = data;
  return fm;
}

// Two 3-node cliques (weight 1) joined by eps edges.
Eigen::MatrixXd two_cliques() {
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(6, 6, kAffinityEpsilon);
  w.topLeftCorner(3, 3).setOnes();
  w.bottomRightCorner(3, 3).setOnes();
  return w;
}

Eigen::MatrixXd random_weights(Rng& rng, int n) {
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      // Mix of strong, weak and near-zero links.
      const double u = rng.uniform();
      w(i, j) = w(j, i) = u < 0.3 ? kAffinityEpsilon : rng.uniform();
    }
  }
  return w;
}

}  // namespace

TEST_CASE("affinity: cosine values and binarization") {
  const FeatureMap same = features(1, 3, 2, {2, 1, 2, 1, 2, 1});
  const AffinityGraph g = build_affinity(same);
  CHECK((g.weights.array() == 1.0).all());
  CHECK(g.degrees(0) == 3.0);

  const FeatureMap ortho = features(1, 2, 2, {1, 0, 0, 3});
  const AffinityGraph o = build_affinity(ortho, 0.15);
  CHECK(o.weights(0, 1) == kAffinityEpsilon);
  CHECK(o.weights(1, 0) == kAffinityEpsilon);
  CHECK(o.weights(0, 0) == 1.0);

  const FeatureMap diag = features(1, 2, 2, {1, 0, 1, 1});
  CHECK(cosine_affinity(diag)(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  // tau = 0 keeps raw similarities.
  CHECK(build_affinity(diag, 0.0).weights(0, 1) ==
        doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(build_affinity(ortho, 0.0).weights(0, 1) == kAffinityEpsilon);
  CHECK(build_affinity(diag, 0.8).weights(0, 1) == kAffinityEpsilon);
}

TEST_CASE("affinity: invalid inputs") {
  CHECK_THROWS_AS(build_affinity(features(1, 2, 2, {0, 0, 1, 1})), NumericError);
  CHECK_THROWS_AS(build_affinity(features(1, 2, 2, {1, 0, 1, 1}), 1.0), ConfigError);
  CHECK_THROWS_AS(build_affinity(features(1, 2, 2, {1, 0, 1, 1}), -0.1), ConfigError);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Ones(2, 2);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(graph_from_weights(asym), NumericError);
}

TEST_CASE("fiedler: two cliques joined by eps edges") {
  const AffinityGraph g = graph_from_weights(two_cliques());
  const FiedlerResult fr = fiedler(g);
  CHECK(fr.eigenvalue < 1e-3);
  CHECK(fr.eigenvalue == doctest::Approx(oracle::generalized_spectrum(g.weights)(1)).epsilon(1e-9));
  const double s = fr.eigenvector(0) > 0 ? 1.0 : -1.0;
  for (int i = 0; i < 3; ++i) CHECK(fr.eigenvector(i) * s > 0);
  for (int i = 3; i < 6; ++i) CHECK(fr.eigenvector(i) * s < 0);

  const BinaryMask fg = bipartition(fr, 2, 3);
  const BinaryMask planted_top = [] {
    BinaryMask m(2, 3);
    for (int c = 0; c < 3; ++c) m.set(0, c);
    return m;
  }();
  BinaryMask planted_bottom = planted_top;
  for (auto& b : planted_bottom.bits) b = 1 - b;
  CHECK((fg == planted_top || fg == planted_bottom));
  CHECK(ncut_value(g, planted_top) < 1e-4);
  CHECK(ncut_value(g, planted_top) ==
        doctest::Approx(oracle::ncut_of(g.weights, {1, 1, 1, 0, 0, 0})).epsilon(1e-12));
}

TEST_CASE("fiedler: closed-form 2x2") {
  Eigen::MatrixXd w(2, 2);
  w << 1.0, 0.5, 0.5, 1.0;
  const FiedlerResult fr = fiedler(graph_from_weights(w));
  // D = 1.5 I and D - W = 0.5 [[1, -1], [-1, 1]]: lambda = 1 / 1.5.
  CHECK(fr.eigenvalue == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(fr.eigenvector(0)) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(fr.eigenvector(1) == doctest::Approx(-fr.eigenvector(0)).epsilon(1e-12));
  const double top = std::max(std::abs(fr.eigenvector(0)), std::abs(fr.eigenvector(1)));
  CHECK((fr.eigenvector(0) == top || fr.eigenvector(1) == top));
}

TEST_CASE("fiedler: uniform weights give a D-orthogonal vector") {
  const Eigen::MatrixXd w = Eigen::MatrixXd::Constant(7, 7, 0.4);
  const AffinityGraph g = graph_from_weights(w);
  const FiedlerResult fr = fiedler(g);
  CHECK(std::abs(fr.eigenvector.dot(g.degrees)) < 1e-9);
  CHECK(fr.eigenvector.dot(g.degrees.cwiseProduct(fr.eigenvector)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fiedler: rejects tiny graphs") {
  CHECK_THROWS_AS(fiedler(graph_from_weights(Eigen::MatrixXd::Ones(1, 1))), MismatchError);
}

TEST_CASE("fiedler: random graphs against the dense generalized solver") {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(11));
    const AffinityGraph g = graph_from_weights(random_weights(rng, n));
    const FiedlerResult fr = fiedler(g);
    const Eigen::VectorXd lambdas = oracle::generalized_spectrum(g.weights);
    CHECK(fr.eigenvalue == doctest::Approx(lambdas(1)).epsilon(1e-9));
    CHECK(fr.residual <= 1e-8 * fr.eigenvector.norm());
    CHECK(fr.eigenvector.dot(g.degrees.cwiseProduct(fr.eigenvector)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    Eigen::Index arg;
    fr.eigenvector.cwiseAbs().maxCoeff(&arg);
    CHECK(fr.eigenvector(arg) > 0);
    // Relaxation bound.
    CHECK(fr.eigenvalue <= oracle::min_ncut(g.weights) + 1e-9);
  }
}

TEST_CASE("fiedler: deterministic and scale invariant partition") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd w = random_weights(rng, 12);
    const AffinityGraph g = graph_from_weights(w);
    const FiedlerResult a = fiedler(g);
    const FiedlerResult b = fiedler(g);
    CHECK(a.eigenvalue == b.eigenvalue);
    CHECK(a.eigenvector == b.eigenvector);
    CHECK(a.residual == b.residual);

    const FiedlerResult scaled = fiedler(graph_from_weights(w * 37.5));
    CHECK(scaled.eigenvalue == doctest::Approx(a.eigenvalue).epsilon(1e-9));
    for (bool component : {false, true}) {
      BinaryMask ma, ms;
      bool degenerate = false;
      try {
        ma = bipartition(a, 3, 4, nullptr, component);
      } catch (const DegeneratePartition&) {
        degenerate = true;
      }
      if (degenerate) {
        CHECK_THROWS_AS(bipartition(scaled, 3, 4, nullptr, component), DegeneratePartition);
        continue;
      }
      ms = bipartition(scaled, 3, 4, nullptr, component);
      CHECK(ma == ms);
    }
  }
}

TEST_CASE("bipartition: threshold, corners and exclusion") {
  FiedlerResult fr;
  fr.eigenvector = Eigen::Vector4d(1, 1, -1, -1);
  BinaryMask top(2, 2);
  top.set(0, 0);
  top.set(0, 1);
  CHECK(bipartition(fr, 2, 2) == top);

  fr.eigenvector = Eigen::Vector4d::Constant(0.3);
  CHECK_THROWS_AS(bipartition(fr, 2, 2), DegeneratePartition);
  try {
    bipartition(fr, 2, 2);
  } catch (const DegeneratePartition& e) {
    CHECK(std::string(e.what()) == "degenerate partition");
  }

  // The large side holds three corners of a 3x3 grid, so it is swapped out.
  fr.eigenvector.resize(9);
  fr.eigenvector << 2, 2, 2, 2, -1, 2, 2, -1, -1;
  BinaryMask swapped(3, 3);
  swapped.set(1, 1);
  swapped.set(2, 1);
  swapped.set(2, 2);
  CHECK(bipartition(fr, 3, 3) == swapped);

  // Excluded patches never enter the foreground.
  fr.eigenvector << 0, 0, 0, 0, 3, 2, 0, 0, 0;
  BinaryMask excluded(3, 3);
  excluded.set(1, 1);
  BinaryMask expect(3, 3);
  expect.set(1, 2);
  CHECK(bipartition(fr, 3, 3, &excluded) == expect);
  excluded.set(1, 2);
  CHECK_THROWS_AS(bipartition(fr, 3, 3, &excluded), DegeneratePartition);

  // Two separated high regions: the component rule keeps the seed's.
  fr.eigenvector << 3, 0, 2, 0, 0, 0, 0, 0, 0;
  BinaryMask seed_only(3, 3);
  seed_only.set(0, 0);
  CHECK(bipartition(fr, 3, 3) == seed_only);
  BinaryMask both = seed_only;
  both.set(0, 2);
  CHECK(bipartition(fr, 3, 3, nullptr, false) == both);
}

TEST_CASE("ncut: hand values") {
  Eigen::MatrixXd w(2, 2);
  w << 1.0, 0.25, 0.25, 2.0;
  const AffinityGraph g = graph_from_weights(w);
  BinaryMask p(1, 2);
  p.set(0, 0);
  CHECK(ncut_value(g, p) == doctest::Approx(0.25 / 1.25 + 0.25 / 2.25).epsilon(1e-15));

  // Complete uniform graph on 4 nodes split 2/2: cut 4, assoc 8 per side.
  const AffinityGraph k4 = graph_from_weights(Eigen::MatrixXd::Ones(4, 4));
  BinaryMask half(2, 2);
  half.set(0, 0);
  half.set(0, 1);
  CHECK(ncut_value(k4, half) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(ncut_value(k4, BinaryMask(2, 2)), MismatchError);
  CHECK_THROWS_AS(ncut_value(k4, BinaryMask(2, 2, 1)), MismatchError);
}
