#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_util.hpp"

using namespace corrgeo;
using corrgeo::testing::gaussian;
using corrgeo::testing::nearby_point;
using corrgeo::testing::random_point;
using corrgeo::testing::random_point_of_rank;
using corrgeo::testing::random_tangent;
using std::numbers::pi;

namespace {

UnitRowMatrix circle_rows(std::initializer_list<double> angles) {
  Matrix m(static_cast<Eigen::Index>(angles.size()), 2);
  Eigen::Index i = 0;
  for (double a : angles) {
    m(i, 0) = std::cos(a);
    m(i, 1) = std::sin(a);
    ++i;
  }
  return UnitRowMatrix(m);
}

UnitRowMatrix counterexample_x() {
  Matrix x(4, 2);
  x << -1, 0, 1, 0, 0, 1, 0, -1;
  return UnitRowMatrix(x);
}

UnitRowMatrix counterexample_y() {
  Matrix y(4, 2);
  y << 1, 0, 1, 0, 0, 1, 0, -1;
  return UnitRowMatrix(y);
}

OrthogonalMatrix reflection(Eigen::Index k) {
  Matrix r = Matrix::Identity(k, k);
  r(0, 0) = -1.0;
  return OrthogonalMatrix(r);
}

} // namespace

TEST(Align, SelfAlignment) {
  std::mt19937_64 rng(61);
  const OrbitPoint x{random_point(5, 3, rng)};
  const AlignmentResult r = align(x, x, SolverConfig{});
  EXPECT_LT(r.loss, 1e-24);
  EXPECT_LT((r.rotation.matrix() - Matrix::Identity(3, 3)).norm(), 1e-10);
}

TEST(Align, RecoversRotationAndReflection) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const OrbitPoint x{random_point(6, 3, rng)};
    OrthogonalMatrix r = random_orthogonal(3, rng);
    if (trial % 2 == 1) r = OrthogonalMatrix(r.matrix() * reflection(3).matrix());
    const OrbitPoint y{x.rep.rotated(r)};
    const AlignmentResult a = align(x, y, SolverConfig{});
    EXPECT_LT(a.loss, 1e-16);
    EXPECT_LT((a.rotation.matrix() - r.matrix()).norm(), 1e-7);
    EXPECT_LT((a.aligned.matrix() - x.rep.matrix()).norm(), 1e-7);
  }
}

TEST(Align, LossMatchesO2Grid) {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    const UnitRowMatrix x = random_point(4, 2, rng), y = random_point(4, 2, rng);
    const AlignmentResult a = align(OrbitPoint{x}, OrbitPoint{y}, SolverConfig{});
    const oracle::GridDistance g = oracle::o2_grid_distance(x, y, {10000, true});
    EXPECT_LE(a.loss, g.distance * g.distance + 1e-12);
    EXPECT_NEAR(a.loss, g.distance * g.distance, 1e-6);
  }
}

// For k = 2 and a rotation-optimal pair the loss is the centered sum of
// squares of the wrapped angle differences; the grid oracle at 10^7
// samples gives 0.73727538205549437.
TEST(OrbitDist, FrozenCirclePair) {
  const UnitRowMatrix x = circle_rows({0.1, 1.3, 2.9, -2.0});
  const UnitRowMatrix y = circle_rows({0.7, 2.2, -2.5, -0.4});
  double diffs[] = {0.6, 0.9, -5.4 + 2 * pi, 1.6};
  double mean = 0.0;
  for (double d : diffs) mean += d / 4.0;
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double d = orbit_dist(OrbitPoint{x}, OrbitPoint{y}, SolverConfig{});
  EXPECT_NEAR(d, std::sqrt(ss), 1e-12);
  EXPECT_NEAR(d, 0.73727538205549437, 1e-12);
}

TEST(OrbitDist, SameOrbitIsZero) {
  std::mt19937_64 rng(64);
  const OrbitPoint x{random_point(5, 3, rng)};
  const OrbitPoint y{x.rep.rotated(random_orthogonal(3, rng))};
  EXPECT_LT(orbit_dist(x, y, SolverConfig{}), 1e-8);
  EXPECT_TRUE(same_orbit(x, y, SolverConfig{}));
  EXPECT_FALSE(same_orbit(x, OrbitPoint{random_point(5, 3, rng)}, SolverConfig{}));
}

TEST(OrbitDist, SingleRowIsAlwaysZero) {
  std::mt19937_64 rng(65);
  for (int trial = 0; trial < 10; ++trial)
    EXPECT_LT(orbit_dist(OrbitPoint{random_point(1, 3, rng)}, OrbitPoint{random_point(1, 3, rng)},
                         SolverConfig{}),
              1e-8);
}

TEST(OrbitDist, CounterexampleExceedsBoundAndMatchesAnalyticValue) {
  const double d = orbit_dist(OrbitPoint{counterexample_x()}, OrbitPoint{counterexample_y()},
                              SolverConfig{});
  EXPECT_GT(d, pi / std::sqrt(2.0));
  // Rotations and reflections tie at loss 3 pi^2 / 4.
  EXPECT_NEAR(d, pi * std::sqrt(3.0) / 2.0, 1e-9);
  const oracle::GridDistance g =
      oracle::o2_grid_distance(counterexample_x(), counterexample_y(), {10000, true});
  EXPECT_NEAR(d, g.distance, 1e-4);
}

TEST(OrbitDist, CounterexampleEmbeddedCollapses) {
  const OrbitPoint x3 = k_embedding(OrbitPoint{counterexample_x()}, 3);
  const OrbitPoint y3 = k_embedding(OrbitPoint{counterexample_y()}, 3);
  SolverConfig cfg;
  cfg.restarts = 10;
  EXPECT_LE(orbit_dist(x3, y3, cfg), pi / std::sqrt(2.0) + 1e-6);
}

TEST(OrbitDist, RepresentativeInvarianceAndUpperBound) {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    const UnitRowMatrix x = random_point(5, 3, rng), y = random_point(5, 3, rng);
    const double d = orbit_dist(OrbitPoint{x}, OrbitPoint{y}, SolverConfig{});
    const OrbitPoint xr{x.rotated(random_orthogonal(3, rng))};
    const OrbitPoint ys{y.rotated(random_orthogonal(3, rng))};
    EXPECT_NEAR(orbit_dist(xr, ys, SolverConfig{}), d, 1e-6);
    EXPECT_LE(d, ps_dist(x, y) + 1e-12);
  }
}

TEST(OrbitDist, TriangleInequality) {
  std::mt19937_64 rng(67);
  const SolverConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    const OrbitPoint a{random_point(4, 2, rng)}, b{random_point(4, 2, rng)},
        c{random_point(4, 2, rng)};
    EXPECT_LE(orbit_dist(a, c, cfg), orbit_dist(a, b, cfg) + orbit_dist(b, c, cfg) + 2e-6);
  }
}

TEST(OrbitDist, KMonotonicity) {
  std::mt19937_64 rng(68);
  SolverConfig cfg;
  cfg.restarts = 8;
  for (int trial = 0; trial < 10; ++trial) {
    const OrbitPoint x{random_point(5, 2, rng)}, y{random_point(5, 2, rng)};
    const double d2 = orbit_dist(x, y, cfg);
    const double d3 = orbit_dist(k_embedding(x, 3), k_embedding(y, 3), cfg);
    EXPECT_LE(d3, d2 + 1e-5);
  }
}

TEST(AlignmentGradient, MatchesFiniteDifferencesOnO3) {
  std::mt19937_64 rng(69);
  int checked = 0;
  while (checked < 10) {
    const UnitRowMatrix x = random_point(5, 3, rng), y = random_point(5, 3, rng);
    const OrthogonalMatrix o = random_orthogonal(3, rng);
    const Matrix xo = x.matrix() * o.matrix();
    if ((xo.array() * y.matrix().array()).rowwise().sum().abs().maxCoeff() > 1.0 - 1e-3) continue;
    const Matrix g = alignment_gradient(x, y, o);
    EXPECT_LT((o.matrix().transpose() * g + g.transpose() * o.matrix()).norm(), 1e-12);

    std::vector<Matrix> basis;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        Matrix e = Matrix::Zero(3, 3);
        e(i, j) = 1.0;
        e(j, i) = -1.0;
        basis.push_back(o.matrix() * e);
      }
    const std::function<double(const OrthogonalMatrix&)> loss = [&](const OrthogonalMatrix& p) {
      return alignment_loss(x, y, p);
    };
    const std::function<OrthogonalMatrix(const OrthogonalMatrix&, const Matrix&)> retract =
        [](const OrthogonalMatrix& p, const Matrix& xi) { return og_retract(p, xi); };
    const oracle::FiniteDifference fd = oracle::fd_gradient(loss, retract, o, basis);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const double analytic = (g.array() * basis[b].array()).sum();
      EXPECT_NEAR(fd.derivatives(static_cast<Eigen::Index>(b)), analytic,
                  1e-5 * std::max(1.0, std::abs(analytic)));
    }
    ++checked;
  }
}

TEST(OrbitLog, ZeroForSameOrbit) {
  std::mt19937_64 rng(70);
  const OrbitPoint x{random_point(5, 3, rng)};
  EXPECT_LT(orbit_log(x, x, SolverConfig{}).velocity.norm(), 1e-10);
  const OrbitPoint y{x.rep.rotated(random_orthogonal(3, rng))};
  EXPECT_LT(orbit_log(x, y, SolverConfig{}).velocity.norm(), 1e-7);
}

TEST(OrbitLog, RoundTripAndHorizontality) {
  std::mt19937_64 rng(71);
  const SolverConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    const UnitRowMatrix x = random_point(5, 3, rng);
    const OrbitPoint y{nearby_point(x, 0.5, rng).rotated(random_orthogonal(3, rng))};
    const OrbitLog log = orbit_log(OrbitPoint{x}, y, cfg);
    EXPECT_TRUE(log.horizontal);
    EXPECT_LT(log.vertical_residual, 1e-8);
    EXPECT_LT(orbit_dist(orbit_exp(OrbitPoint{x}, log.velocity, 1.0), y, cfg), 1e-6);
  }
}

TEST(OrbitExp, ConstantSpeed) {
  std::mt19937_64 rng(72);
  const SolverConfig cfg;
  for (int trial = 0; trial < 3; ++trial) {
    const UnitRowMatrix x = random_point(5, 3, rng);
    const OrbitPoint y{nearby_point(x, 0.4, rng)};
    const OrbitLog log = orbit_log(OrbitPoint{x}, y, cfg);
    EXPECT_EQ(orbit_exp(OrbitPoint{x}, log.velocity, 0.0).rep.matrix(), x.matrix());
    for (int s = 1; s <= 9; ++s) {
      const double t = 0.1 * s;
      EXPECT_NEAR(orbit_dist(OrbitPoint{x}, orbit_exp(OrbitPoint{x}, log.velocity, t), cfg),
                  t * log.velocity.norm(), 1e-4);
    }
  }
}

TEST(OrbitExp, RequireHorizontalRejectsVerticalDirection) {
  std::mt19937_64 rng(73);
  const UnitRowMatrix x = random_point(5, 3, rng);
  const ProductTangent vertical = vertical_project(x, random_tangent(x, rng));
  SolverConfig cfg;
  cfg.require_horizontal = true;
  EXPECT_THROW(orbit_exp(OrbitPoint{x}, vertical, 1.0, cfg), GeometryError);
  cfg.require_horizontal = false;
  EXPECT_NO_THROW(orbit_exp(OrbitPoint{x}, vertical, 1.0, cfg));
}

TEST(GeodesicRankProfile, ZeroVelocityKeepsRank) {
  std::mt19937_64 rng(74);
  const UnitRowMatrix x = random_point_of_rank(5, 3, 2, rng);
  const GeodesicSegment seg{x, ProductTangent(x, Matrix::Zero(5, 3)), 1.0};
  const auto profile = geodesic_rank_profile(seg, 5);
  ASSERT_EQ(profile.size(), 7u);
  for (const RankSample& s : profile) EXPECT_EQ(s.rank, 2);
  EXPECT_TRUE(profile.front().endpoint);
  EXPECT_TRUE(profile.back().endpoint);
}

TEST(GeodesicRankProfile, MinimizingGeodesicHasConstantInteriorRank) {
  std::mt19937_64 rng(75);
  for (int trial = 0; trial < 5; ++trial) {
    const OrbitPoint x{random_point(5, 3, rng)};
    const OrbitPoint y{nearby_point(x.rep, 0.6, rng)};
    const auto profile = geodesic_rank_profile(minimizing_geodesic(x, y, SolverConfig{}), 17);
    int max_end = 0;
    for (const RankSample& s : profile)
      if (s.endpoint) max_end = std::max(max_end, s.rank);
    for (const RankSample& s : profile)
      if (!s.endpoint) EXPECT_GE(s.rank, max_end);
  }
}

TEST(GeodesicRankProfile, LongSegmentReportsWithoutError) {
  std::mt19937_64 rng(76);
  const UnitRowMatrix x = random_point(4, 2, rng);
  const GeodesicSegment seg{x, random_tangent(x, rng, 3.0), 5.0};
  EXPECT_NO_THROW(geodesic_rank_profile(seg, 50));
  EXPECT_THROW(geodesic_rank_profile(seg, 1), GeometryError);
}

TEST(MaxFullRankInterval, ZeroVelocityGivesWholeWindow) {
  std::mt19937_64 rng(77);
  const UnitRowMatrix x = random_point(4, 2, rng);
  const TimeInterval iv = max_full_rank_interval(OrbitPoint{x}, ProductTangent(x, Matrix::Zero(4, 2)), 7.0);
  EXPECT_EQ(iv.t_min, -7.0);
  EXPECT_EQ(iv.t_max, 7.0);
}

TEST(MaxFullRankInterval, TwoRowsCollideAtQuarterTurn) {
  const UnitRowMatrix x(Matrix::Identity(2, 2));
  Matrix v = Matrix::Zero(2, 2);
  v(0, 1) = 1.0;
  const TimeInterval iv = max_full_rank_interval(OrbitPoint{x}, ProductTangent(x, v), 10.0);
  EXPECT_NEAR(iv.t_max, pi / 2, 1e-4);
  EXPECT_NEAR(iv.t_min, -pi / 2, 1e-4);
}

TEST(MaxFullRankInterval, BoundaryIsRankDeficient) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 10; ++trial) {
    const UnitRowMatrix x = random_point(2, 2, rng);
    const HorizontalTangent h = horizontal_project(x, random_tangent(x, rng));
    // Unit-speed horizontal: the rows turn in opposite senses at 1/sqrt(2)
    // each and meet (up to sign) within pi / sqrt(2).
    const ProductTangent v(x, h.vec() / h.vec().norm());
    const TimeInterval iv = max_full_rank_interval(OrbitPoint{x}, v, 20.0);
    ASSERT_LT(iv.t_max, 20.0);
    RankTolerance loose;
    loose.relative_factor = 1e-5;
    EXPECT_EQ(numerical_rank(ps_exp(x, v, iv.t_max).matrix(), loose), 1);
    EXPECT_EQ(numerical_rank(ps_exp(x, v, 0.99 * iv.t_max).matrix()), 2);
  }
}

TEST(MaxFullRankInterval, RequiresFullRank) {
  std::mt19937_64 rng(79);
  const UnitRowMatrix x = random_point_of_rank(4, 3, 2, rng);
  EXPECT_THROW(max_full_rank_interval(OrbitPoint{x}, random_tangent(x, rng), 1.0), GeometryError);
}

TEST(KEmbedding, PadsWithZeros) {
  std::mt19937_64 rng(80);
  const OrbitPoint x{random_point(4, 2, rng)};
  EXPECT_EQ(k_embedding(x, 2).rep.matrix(), x.rep.matrix());
  const OrbitPoint x3 = k_embedding(x, 3);
  ASSERT_EQ(x3.k(), 3);
  EXPECT_LT((x3.rep.matrix() * x3.rep.matrix().transpose() -
             x.rep.matrix() * x.rep.matrix().transpose()).norm(),
            1e-15);
  EXPECT_THROW(k_embedding(x, 1), GeometryError);
}

TEST(Align, WarmStartIsUsed) {
  std::mt19937_64 rng(81);
  const OrbitPoint x{random_point(5, 3, rng)};
  const OrthogonalMatrix r = random_orthogonal(3, rng);
  const OrbitPoint y{x.rep.rotated(r)};
  SolverConfig cfg;
  cfg.restarts = 1;
  const AlignmentResult a = align(x, y, cfg, r);
  EXPECT_LT(a.loss, 1e-20);
  EXPECT_GE(a.restarts_used, 1);
  EXPECT_THROW(align(x, y, cfg, OrthogonalMatrix::identity(2)), GeometryError);
}

TEST(Align, ShapeMismatchThrows) {
  std::mt19937_64 rng(82);
  EXPECT_THROW(align(OrbitPoint{random_point(4, 3, rng)}, OrbitPoint{random_point(5, 3, rng)},
                     SolverConfig{}),
               GeometryError);
}
