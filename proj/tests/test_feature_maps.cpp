#include <gtest/gtest.h>

#include <cmath>
#include <variant>
#include <vector>

#include "oracles.hpp"
#include "orf/feature_maps.hpp"
#include "orf/stats.hpp"

namespace orf {
namespace {

using testing::random_vector;

TransformSpec spec_of(Kind kind, Index d, Index D, double sigma = 1.0, Seed seed = 7) {
  return TransformSpec{kind, d, D, sigma, seed};
}

TEST(Build, BlockCountIsCeilOfDOverPaddedDim) {
  const FeatureMap rff = build(spec_of(Kind::RFF, 8, 24));
  ASSERT_EQ(rff.blocks().size(), 3u);
  for (const auto& b : rff.blocks()) {
    const auto& g = std::get<GaussianBlock>(b);
    EXPECT_EQ(g.w.rows(), 8);
    EXPECT_EQ(g.w.cols(), 8);
  }
  EXPECT_EQ(build(spec_of(Kind::ORF, 8, 25)).blocks().size(), 4u);
}

TEST(Build, HadamardKindsPadToPowerOfTwo) {
  const FeatureMap sorf = build(spec_of(Kind::SORF, 100, 128));
  EXPECT_EQ(sorf.d_padded(), 128);
  EXPECT_EQ(sorf.blocks().size(), 1u);
  EXPECT_EQ(std::get<HadamardBlock>(sorf.blocks()[0]).diagonals.size(), 3u);
  EXPECT_EQ(std::get<HadamardBlock>(build(spec_of(Kind::HDHD, 3, 4)).blocks()[0]).diagonals.size(), 2u);
  EXPECT_EQ(std::get<HadamardBlock>(build(spec_of(Kind::HD, 4, 4)).blocks()[0]).diagonals.size(), 1u);
  EXPECT_EQ(build(spec_of(Kind::RFF, 100, 128)).d_padded(), 100);
}

TEST(Build, OrfWithFewerFeaturesUsesLeadingRows) {
  const FeatureMap orf = build(spec_of(Kind::ORF, 16, 8));
  ASSERT_EQ(orf.blocks().size(), 1u);
  const auto& blk = std::get<OrthogonalBlock>(orf.blocks()[0]);
  EXPECT_EQ(blk.q.q.rows(), 16);
  const Eigen::MatrixXd w = materialize(orf);
  EXPECT_EQ(w.rows(), 8);
  for (Index i = 0; i < 8; ++i) {
    EXPECT_LE((w.row(i) - blk.s[static_cast<std::size_t>(i)] * blk.q.q.row(i)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Build, RejectsInvalidSpecs) {
  EXPECT_THROW(build(spec_of(Kind::RFF, 0, 4)), ConfigurationError);
  EXPECT_THROW(build(spec_of(Kind::RFF, 4, 0)), ConfigurationError);
  EXPECT_THROW(build(spec_of(Kind::RFF, 4, 4, 0.0)), ConfigurationError);
  EXPECT_THROW(build(spec_of(Kind::RFF, 4, 4, -1.0)), ConfigurationError);
  EXPECT_THROW(build(spec_of(static_cast<Kind>(42), 4, 4)), ConfigurationError);
  EXPECT_THROW(parse_kind("fastfood"), ConfigurationError);
}

TEST(Build, KindNamesRoundTrip) {
  for (Kind k : kAllKinds) EXPECT_EQ(parse_kind(to_string(k)), k);
  EXPECT_EQ(parse_kind("orf-prime"), Kind::ORFPrime);
  EXPECT_EQ(parse_kind("HDHDHD"), Kind::SORF);
  EXPECT_EQ(parse_kind("sorf"), Kind::SORF);
}

TEST(Project, ZeroAndLinearity) {
  for (Kind k : kAllKinds) {
    const FeatureMap map = build(spec_of(k, 12, 40, 0.8));
    EXPECT_EQ(map.project(Eigen::VectorXd::Zero(12)).cwiseAbs().maxCoeff(), 0.0) << to_string(k);
    const Eigen::VectorXd x = random_vector(12, 3);
    const double a = -2.5;
    const Eigen::VectorXd lhs = map.project(a * x);
    const Eigen::VectorXd rhs = a * map.project(x);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) << to_string(k);
  }
}

TEST(Project, RejectsWrongLength) {
  const FeatureMap map = build(spec_of(Kind::SORF, 10, 16));
  EXPECT_THROW(map.project(Eigen::VectorXd::Ones(16)), DimensionError);
}

TEST(Project, MatchesMaterializedMatrix) {
  for (Kind k : kAllKinds) {
    for (Index d : {5, 64}) {
      const FeatureMap map = build(spec_of(k, d, 3 * d / 2 + 1, 1.3, 11));
      const Eigen::MatrixXd w = materialize(map);
      const Eigen::VectorXd x = random_vector(d, 17);
      Eigen::VectorXd padded = Eigen::VectorXd::Zero(map.d_padded());
      padded.head(d) = x;
      EXPECT_LE((map.project(x) - w * padded).cwiseAbs().maxCoeff(), 1e-10) << to_string(k) << " d=" << d;
    }
  }
}

TEST(Project, SorfMatchesIndependentDenseChain) {
  const Index d = 64;
  const FeatureMap map = build(spec_of(Kind::SORF, d, d, 2.0, 5));
  const auto& blk = std::get<HadamardBlock>(map.blocks()[0]);
  const Eigen::MatrixXd dense = testing::dense_hd_chain(blk.diagonals, std::sqrt(64.0) / 2.0);
  const Eigen::VectorXd x = random_vector(d, 8);
  EXPECT_LE((map.project(x) - dense * x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Materialize, RffReturnsStoredMatrix) {
  const FeatureMap map = build(spec_of(Kind::RFF, 6, 6, 2.0));
  EXPECT_TRUE(materialize(map) == std::get<GaussianBlock>(map.blocks()[0]).w);
}

TEST(Materialize, RowStructureOfOrthogonalKinds) {
  const Index d = 32;
  const double sigma = 1.5;
  for (Kind k : {Kind::ORF, Kind::ORFPrime, Kind::SORF, Kind::HDHD, Kind::HD}) {
    const Eigen::MatrixXd w = materialize(build(spec_of(k, d, d, sigma, 23)));
    const Eigen::MatrixXd gram = w * w.transpose();
    const Eigen::MatrixXd off = gram - Eigen::MatrixXd(gram.diagonal().asDiagonal());
    EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-10) << to_string(k);
    if (k != Kind::ORF) {
      EXPECT_LE((gram.diagonal().array() - d / (sigma * sigma)).abs().maxCoeff(), 1e-10) << to_string(k);
    }
  }
  const FeatureMap orf = build(spec_of(Kind::ORF, d, d, sigma, 23));
  const auto& blk = std::get<OrthogonalBlock>(orf.blocks()[0]);
  const Eigen::MatrixXd w = materialize(orf);
  for (Index i = 0; i < d; ++i) EXPECT_NEAR(w.row(i).norm(), blk.s[static_cast<std::size_t>(i)] / sigma, 1e-10);
}

TEST(Materialize, SorfRowsHaveNormRootD) {
  const Eigen::MatrixXd w = materialize(build(spec_of(Kind::SORF, 64, 64, 1.0, 3)));
  for (Index i = 0; i < 64; ++i) EXPECT_NEAR(w.row(i).norm(), 8.0, 1e-10);
}

// (sigma * row norm)^2 of ORF is chi^2_d, so its mean over seeds is d, as for
// the Gaussian rows of RFF.
TEST(Materialize, OrfRowNormsMatchGaussianRows) {
  const Index d = 64;
  std::vector<double> orf_sq, rff_sq;
  for (Seed s = 0; s < 10000; ++s) {
    const Eigen::MatrixXd w = materialize(build(spec_of(Kind::ORF, d, 1, 0.5, derive_seed(31, s))));
    orf_sq.push_back(std::pow(0.5 * w.row(0).norm(), 2));
    const Eigen::MatrixXd g = materialize(build(spec_of(Kind::RFF, d, 1, 0.5, derive_seed(37, s))));
    rff_sq.push_back(std::pow(0.5 * g.row(0).norm(), 2));
  }
  EXPECT_NEAR(mean(orf_sq), 64.0, 0.64);
  EXPECT_NEAR(mean(rff_sq), 64.0, 0.64);
}

TEST(Blocks, ConcatenatedBlocksAreDistinctAndUncorrelated) {
  const Index d = 16;
  for (Kind k : {Kind::RFF, Kind::ORF, Kind::SORF}) {
    const Eigen::MatrixXd w = materialize(build(spec_of(k, d, 2 * d, 1.0, 41)));
    EXPECT_GT((w.topRows(d) - w.bottomRows(d)).cwiseAbs().maxCoeff(), 0.0) << to_string(k);
  }
  // Correlation across seeds of W[0,0] (block 0) and W[d,0] (block 1).
  std::vector<double> a, b;
  for (Seed s = 0; s < 20000; ++s) {
    const Eigen::MatrixXd w = materialize(build(spec_of(Kind::ORF, d, 2 * d, 1.0, derive_seed(43, s))));
    a.push_back(w(0, 0));
    b.push_back(w(d, 0));
  }
  const double ma = mean(a), mb = mean(b);
  double cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - ma) * (b[i] - mb);
  cov /= static_cast<double>(a.size() - 1);
  const double corr = cov / std::sqrt(sample_variance(a) * sample_variance(b));
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(static_cast<double>(a.size())));
}

TEST(Features, UnitNormAndLength) {
  for (Kind k : kAllKinds) {
    const FeatureMap map = build(spec_of(k, 20, 50, 0.7));
    const FeatureVector f = features(map, random_vector(20, 2));
    EXPECT_EQ(f.values.size(), 100);
    EXPECT_NEAR(f.values.norm(), 1.0, 1e-12);
    EXPECT_NEAR(f.values.dot(f.values), 1.0, 1e-12);
  }
}

TEST(Features, DotIsMeanCosineOfProjectionDifference) {
  const FeatureMap map = build(spec_of(Kind::SORF, 30, 70, 1.1));
  const Eigen::VectorXd x = random_vector(30, 4), y = random_vector(30, 5);
  const Eigen::VectorXd u = map.project(x), v = map.project(y);
  const double expected = (u - v).array().cos().mean();
  EXPECT_NEAR(features(map, x).values.dot(features(map, y).values), expected, 1e-12);
}

TEST(Features, SinesFirstThenCosines) {
  const FeatureMap map = build(spec_of(Kind::RFF, 3, 4));
  const Eigen::VectorXd x = random_vector(3, 1);
  const Eigen::VectorXd u = map.project(x);
  const FeatureVector f = features(map, x);
  for (Index i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(f.values(i), 0.5 * std::sin(u(i)));
    EXPECT_DOUBLE_EQ(f.values(4 + i), 0.5 * std::cos(u(i)));
  }
}

TEST(Features, ShiftInvariance) {
  for (Kind k : kAllKinds) {
    const FeatureMap map = build(spec_of(k, 16, 48, 2.0, 9));
    for (Seed s = 0; s < 5; ++s) {
      const Eigen::VectorXd x = random_vector(16, derive_seed(s, 1));
      const Eigen::VectorXd y = random_vector(16, derive_seed(s, 2));
      const Eigen::VectorXd t = 3.0 * random_vector(16, derive_seed(s, 3));
      const double base = features(map, x).values.dot(features(map, y).values);
      const double shifted = features(map, x + t).values.dot(features(map, y + t).values);
      EXPECT_NEAR(base, shifted, 1e-10) << to_string(k);
    }
  }
}

TEST(Determinism, SameSpecSameMap) {
  for (Kind k : kAllKinds) {
    const auto spec = spec_of(k, 24, 40, 1.0, 1234);
    EXPECT_TRUE(materialize(build(spec)) == materialize(build(spec))) << to_string(k);
  }
}

TEST(Serialization, SpecJsonRoundTripRebuildsMap) {
  const auto spec = spec_of(Kind::ORFPrime, 9, 20, 0.123456789012345678, 0xFFFFFFFFFFFFFFF1ULL);
  const auto text = to_json(spec).dump();
  const TransformSpec back = spec_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back, spec);
  EXPECT_TRUE(materialize(build(back)) == materialize(build(spec)));
  auto j = to_json(spec);
  j["version"] = 2;
  EXPECT_THROW(spec_from_json(j), ConfigurationError);
  EXPECT_THROW(spec_from_json(nlohmann::json{{"format", "orf-transform-spec"}}), ConfigurationError);
}

}  // namespace
}  // namespace orf
