#include <gtest/gtest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "test_util.hpp"

using namespace corrgeo;
using corrgeo::testing::gaussian;

TEST(SkewMatrix, Validation) {
  Matrix s(2, 2);
  s << 0, 1, -1, 0;
  EXPECT_NO_THROW(SkewMatrix{s});
  EXPECT_THROW(SkewMatrix(Matrix::Identity(2, 2)), GeometryError);
}

TEST(OgProject, Examples) {
  std::mt19937_64 rng(51);
  const OrthogonalMatrix o = random_orthogonal(3, rng);
  EXPECT_LT(og_project(o, o.matrix()).norm(), 1e-14);
  const Matrix w = skew(gaussian(3, 3, rng));
  const OrthogonalMatrix id = OrthogonalMatrix::identity(3);
  EXPECT_LT((og_project(id, w) - w).norm(), 1e-15);
  const Matrix s = sym(gaussian(3, 3, rng));
  EXPECT_LT(og_project(id, s).norm(), 1e-15);
}

TEST(OgProject, LinearIdempotentOrthogonalToNormalSpace) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const OrthogonalMatrix o = random_orthogonal(4, rng);
    const Matrix a = gaussian(4, 4, rng), b = gaussian(4, 4, rng);
    const Matrix pa = og_project(o, a);
    EXPECT_LT((og_project(o, 2.0 * a - b) - (2.0 * pa - og_project(o, b))).norm(), 1e-13);
    EXPECT_LT((og_project(o, pa) - pa).norm(), 1e-13);
    const Matrix normal = o.matrix() * sym(gaussian(4, 4, rng));
    EXPECT_NEAR((pa.array() * normal.array()).sum(), 0.0, 1e-12);
    // Image lies in {O Omega}.
    const Matrix omega = o.matrix().transpose() * pa;
    EXPECT_LT((omega + omega.transpose()).norm(), 1e-13);
  }
}

TEST(OgRetract, ZeroIsExactAndOutputOrthogonal) {
  std::mt19937_64 rng(53);
  const OrthogonalMatrix o = random_orthogonal(3, rng);
  EXPECT_EQ(og_retract(o, Matrix::Zero(3, 3)).matrix(), o.matrix());
  for (int trial = 0; trial < 20; ++trial) {
    const OrthogonalMatrix p = random_orthogonal(4, rng);
    const Matrix xi = og_project(p, 3.0 * gaussian(4, 4, rng));
    const Matrix r = og_retract(p, xi).matrix();
    EXPECT_LT((r.transpose() * r - Matrix::Identity(4, 4)).norm(), 1e-12);
  }
}

TEST(OgRetract, SecondOrderAgreementWithExponential) {
  std::mt19937_64 rng(54);
  const Matrix omega = skew(gaussian(3, 3, rng));
  const OrthogonalMatrix id = OrthogonalMatrix::identity(3);
  double previous = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const Matrix e = (eps * omega).exp();
    const double err = (og_retract(id, eps * omega).matrix() - e).norm();
    EXPECT_LT(err, 10.0 * eps * eps * omega.squaredNorm());
    if (previous > 0.0) EXPECT_LT(err, previous / 50.0);
    previous = err;
  }
}

TEST(OgRetract, DerivativeAtZero) {
  std::mt19937_64 rng(55);
  const OrthogonalMatrix o = random_orthogonal(3, rng);
  const Matrix xi = og_project(o, gaussian(3, 3, rng));
  const double h = 1e-6;
  const Matrix fd = (og_retract(o, h * xi).matrix() - og_retract(o, -h * xi).matrix()) / (2 * h);
  EXPECT_LT((fd - xi).norm(), 1e-6);
}

TEST(OgArmijo, ZeroDirectionLeavesLossUnchanged) {
  const OrthogonalLoss loss = [](const OrthogonalMatrix& o) { return o.matrix()(0, 1); };
  const OrthogonalMatrix id = OrthogonalMatrix::identity(2);
  const ArmijoStep s = og_armijo(loss, id, loss(id), Matrix::Zero(2, 2), ArmijoConfig{});
  EXPECT_EQ(s.loss, loss(id));
  EXPECT_EQ(s.next.matrix(), id.matrix());
  EXPECT_FALSE(s.stagnated);
}

TEST(OgArmijo, AcceptsFullStepOnQuadraticModel) {
  std::mt19937_64 rng(56);
  const OrthogonalMatrix target = random_orthogonal(3, rng);
  const OrthogonalLoss loss = [&](const OrthogonalMatrix& o) {
    return 0.5 * (o.matrix() - target.matrix()).squaredNorm();
  };
  // Start close to the target.
  const OrthogonalMatrix start =
      og_retract(target, og_project(target, 0.05 * gaussian(3, 3, rng)));
  const Matrix g = og_project(start, start.matrix() - target.matrix());
  const ArmijoStep s = og_armijo(loss, start, loss(start), -g, ArmijoConfig{});
  EXPECT_EQ(s.step, 1.0);
  EXPECT_LT(s.loss, loss(start));
  EXPECT_FALSE(s.stagnated);
}

TEST(OgArmijo, FlatLossStagnates) {
  const OrthogonalLoss flat = [](const OrthogonalMatrix&) { return 1.0; };
  const OrthogonalMatrix id = OrthogonalMatrix::identity(3);
  Matrix xi = Matrix::Zero(3, 3);
  xi(0, 1) = 1.0;
  xi(1, 0) = -1.0;
  const ArmijoStep s = og_armijo(flat, id, 1.0, xi, ArmijoConfig{});
  EXPECT_TRUE(s.stagnated);
  EXPECT_EQ(s.step, 0.0);
  EXPECT_EQ(s.loss, 1.0);
  EXPECT_EQ(s.next.matrix(), id.matrix());
}

TEST(OgArmijo, NeverIncreasesLoss) {
  std::mt19937_64 rng(57);
  const Matrix c = gaussian(3, 3, rng);
  const OrthogonalLoss loss = [&](const OrthogonalMatrix& o) {
    return std::sin(3.0 * (c.array() * o.matrix().array()).sum());
  };
  for (int trial = 0; trial < 20; ++trial) {
    const OrthogonalMatrix o = random_orthogonal(3, rng);
    const Matrix xi = og_project(o, gaussian(3, 3, rng));
    const double before = loss(o);
    const ArmijoStep s = og_armijo(loss, o, before, xi, ArmijoConfig{});
    EXPECT_TRUE(s.stagnated || s.loss < before);
    EXPECT_LE(s.loss, before);
  }
}

TEST(RandomOrthogonal, SeededAndOrthogonal) {
  std::mt19937_64 a(58), b(58);
  const Matrix qa = random_orthogonal(5, a).matrix();
  EXPECT_EQ(qa, random_orthogonal(5, b).matrix());
  EXPECT_LT((qa.transpose() * qa - Matrix::Identity(5, 5)).norm(), 1e-12);
}
