#include <gtest/gtest.h>

#include <random>

#include "matte/analysis.hpp"
#include "matte/neighbors.hpp"
#include "matte/parallel.hpp"
#include "oracles.hpp"

namespace matte {
namespace {

ImagePlane row_image(std::initializer_list<double> values) {
  Field f(1, static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) f(0, i++) = v;
  return ImagePlane::from_gray(f);
}

TEST(NeighborField, ConstantImageKeepsFirstScanPositions) {
  const NeighborField f = build_neighbor_field(ImagePlane::from_gray(Field::Constant(5, 5, 0.3)), 3);
  const Eigen::Index center = 2 * 5 + 2;
  ASSERT_EQ(f.length(center), 3);
  // Window scan order starts at the upper-left corner of the 3×3 window.
  const auto nb = f.neighbors_of(center);
  EXPECT_EQ(nb[0], 6);
  EXPECT_EQ(nb[1], 7);
  EXPECT_EQ(nb[2], 8);
  for (double d : f.distances_of(center)) EXPECT_EQ(d, 0.0);
}

TEST(NeighborField, RowExampleCenterPixel) {
  const NeighborField f = build_neighbor_field(row_image({0.0, 0.5, 1.0}), 3);
  const auto nb = f.neighbors_of(1);
  const auto d = f.distances_of(1);
  ASSERT_EQ(nb.size(), 3u);
  EXPECT_EQ(nb[0], 1);
  EXPECT_EQ(nb[1], 0);
  EXPECT_EQ(nb[2], 2);
  EXPECT_DOUBLE_EQ(d[0], 0.0);
  EXPECT_DOUBLE_EQ(d[1], 0.5);
  EXPECT_DOUBLE_EQ(d[2], 0.5);
}

TEST(NeighborField, InteriorLengthAtDefaultWindow) {
  std::mt19937_64 rng(3);
  const NeighborField f = build_neighbor_field(oracle::random_image(rng, 13, 13), 11);
  for (Eigen::Index i = 0; i < f.pixels(); ++i) EXPECT_EQ(f.length(i), 11);
}

TEST(NeighborField, ValidModeKeepsAllCandidatesWhenFewerThanK) {
  const NeighborField f = build_neighbor_field(row_image({0.1, 0.2}), 3);
  EXPECT_EQ(f.length(0), 2);
  EXPECT_EQ(f.length(1), 2);
}

TEST(NeighborField, ZeroPadUsesPaddedEntries) {
  const NeighborField f = build_neighbor_field(row_image({0.0, 0.9}), 3, Padding::ZeroPad);
  EXPECT_EQ(f.length(0), 3);
  // Pixel 0 is black, so padded neighbors tie with it at distance 0.
  const auto nb = f.neighbors_of(0);
  EXPECT_EQ(nb[0], NeighborField::kPadded);
  for (double d : f.distances_of(0)) EXPECT_EQ(d, 0.0);
}

TEST(NeighborField, RejectsEvenOrSmallWindow) {
  const ImagePlane img = row_image({0.1, 0.2, 0.3});
  EXPECT_THROW(build_neighbor_field(img, 4), ParameterError);
  EXPECT_THROW(build_neighbor_field(img, 1), ParameterError);
}

TEST(NeighborField, MatchesBruteForceSelection) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int h = 3 + trial % 6, w = 4 + trial % 5, K = 3 + 2 * (trial % 4);
    const bool pad = trial % 2 == 1;
    const ImagePlane img = oracle::random_image(rng, h, w, trial % 3 == 0 ? 1 : 3);
    const NeighborField f = build_neighbor_field(img, K, pad ? Padding::ZeroPad : Padding::Valid);
    const auto ref = oracle::neighbors(img, K, pad);
    for (Eigen::Index i = 0; i < f.pixels(); ++i) {
      const auto& r = ref[static_cast<std::size_t>(i)];
      ASSERT_EQ(static_cast<std::size_t>(f.length(i)), r.size());
      for (std::size_t k = 0; k < r.size(); ++k) {
        EXPECT_EQ(f.neighbors_of(i)[k], r[k].index);
        EXPECT_NEAR(f.distances_of(i)[k], r[k].distance, 1e-15);
      }
    }
  }
}

TEST(NeighborField, StructuralInvariants) {
  std::mt19937_64 rng(5);
  const ImagePlane img = oracle::random_image(rng, 9, 10);
  const NeighborField f = build_neighbor_field(img, 5);
  for (Eigen::Index i = 0; i < f.pixels(); ++i) {
    const auto d = f.distances_of(i);
    EXPECT_TRUE(std::is_sorted(d.begin(), d.end()));
    EXPECT_EQ(d[0], 0.0);
    EXPECT_LE(d.back(), std::sqrt(3.0));
    for (Eigen::Index t = f.begin(i); t < f.end(i); ++t) EXPECT_EQ(f.owner(t), i);
  }
  // Reverse adjacency lists exactly the terms that point at each pixel.
  Eigen::Index listed = 0;
  for (Eigen::Index j = 0; j < f.pixels(); ++j)
    for (std::int64_t t : f.referencing(j)) {
      EXPECT_EQ(f.neighbor(t), j);
      ++listed;
    }
  EXPECT_EQ(listed, f.terms());
}

TEST(NeighborField, IdenticalForAnyWorkerCount) {
  std::mt19937_64 rng(9);
  const ImagePlane img = oracle::random_image(rng, 37, 21);
  const int saved = worker_count();
  set_worker_count(1);
  const NeighborField a = build_neighbor_field(img, 7);
  set_worker_count(8);
  const NeighborField b = build_neighbor_field(img, 7);
  set_worker_count(saved);
  ASSERT_EQ(a.terms(), b.terms());
  for (Eigen::Index t = 0; t < a.terms(); ++t) {
    EXPECT_EQ(a.neighbor(t), b.neighbor(t));
    EXPECT_EQ(a.distance(t), b.distance(t));
  }
}

TEST(AffinityWeights, RowExample) {
  const NeighborField f = build_neighbor_field(row_image({0.0, 0.5, 1.0}), 3);
  const auto w = affinity_weights(f);
  EXPECT_DOUBLE_EQ(w[static_cast<std::size_t>(f.begin(1))], 0.5);
  EXPECT_DOUBLE_EQ(w[static_cast<std::size_t>(f.begin(1)) + 1], 0.25);
  EXPECT_DOUBLE_EQ(w[static_cast<std::size_t>(f.begin(1)) + 2], 0.25);
  // Pixel 0 has only two in-image candidates: self and the middle pixel.
  ASSERT_EQ(f.length(0), 2);
  EXPECT_DOUBLE_EQ(w[static_cast<std::size_t>(f.begin(0))], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(w[static_cast<std::size_t>(f.begin(0)) + 1], 1.0 / 3.0);
}

TEST(AffinityWeights, ConstantImageIsUniform) {
  const NeighborField f = build_neighbor_field(ImagePlane::from_gray(Field::Constant(4, 4, 0.7)), 5);
  const auto w = affinity_weights(f);
  for (Eigen::Index t = 0; t < f.terms(); ++t) EXPECT_DOUBLE_EQ(w[static_cast<std::size_t>(t)], 1.0 / 5.0);
}

TEST(AffinityWeights, RowsSumToOne) {
  std::mt19937_64 rng(21);
  const NeighborField f = build_neighbor_field(oracle::random_image(rng, 8, 8), 7);
  const auto w = affinity_weights(f);
  for (Eigen::Index i = 0; i < f.pixels(); ++i) {
    double s = 0;
    for (Eigen::Index t = f.begin(i); t < f.end(i); ++t) {
      EXPECT_GE(w[static_cast<std::size_t>(t)], 0.0);
      s += w[static_cast<std::size_t>(t)];
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(AffinityWeights, SymmetricOnLinearRamp) {
  EXPECT_LT(symmetry_check(5, 0.05, 0.2), 1e-12);
  EXPECT_LT(symmetry_check(11, 0.05, 0.2), 1e-12);
  EXPECT_EQ(symmetry_check(7, 0.0, 0.4), 0.0);
}

}  // namespace
}  // namespace matte
