#include <gtest/gtest.h>

#include <cmath>

#include "homegen/geometry.hpp"
#include "homegen/rng.hpp"

using namespace homegen;

TEST(Angles, WrapAndDistance) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_NEAR(wrap_angle(kTwoPi + 0.25), 0.25, 1e-12);
  EXPECT_NEAR(wrap_angle(-0.25), kTwoPi - 0.25, 1e-12);
  EXPECT_NEAR(angle_distance(0.1, kTwoPi - 0.1), 0.2, 1e-12);
  EXPECT_NEAR(angle_distance(kPi - 0.05, -kPi + 0.05), 0.1, 1e-12);
  EXPECT_NEAR(angle_distance(1.0, 1.0 + 7.0 * kTwoPi), 0.0, 1e-9);
}

TEST(Vec2, RotatedMatchesHandExpansion) {
  // rotated(a) = (c*x - s*y, s*x + c*y): counterclockwise rotation.
  Vec2 v{1.0, 0.0};
  Vec2 r = v.rotated(kPi / 2.0);
  EXPECT_NEAR(r.x, 0.0, 1e-15);
  EXPECT_NEAR(r.y, 1.0, 1e-15);
  Rng rng(101);
  for (int i = 0; i < 100; ++i) {
    Vec2 p{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    double a = rng.uniform(-10, 10);
    Vec2 q = p.rotated(a);
    EXPECT_NEAR(q.x, std::cos(a) * p.x - std::sin(a) * p.y, 1e-12);
    EXPECT_NEAR(q.y, std::sin(a) * p.x + std::cos(a) * p.y, 1e-12);
    EXPECT_NEAR(q.norm(), p.norm(), 1e-12);
  }
}

TEST(Vec3, CrossIsOrthogonalRightHanded) {
  Vec3 x{1, 0, 0}, y{0, 1, 0};
  Vec3 z = x.cross(y);
  EXPECT_DOUBLE_EQ(z.x, 0.0);
  EXPECT_DOUBLE_EQ(z.y, 0.0);
  EXPECT_DOUBLE_EQ(z.z, 1.0);
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    Vec3 a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    Vec3 b{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    Vec3 c = a.cross(b);
    EXPECT_NEAR(c.dot(a), 0.0, 1e-12);
    EXPECT_NEAR(c.dot(b), 0.0, 1e-12);
  }
}

TEST(Vec3, NormalizedZeroVectorStaysZero) {
  Vec3 z{0, 0, 0};
  Vec3 n = z.normalized();
  EXPECT_EQ(n.x, 0.0);
  EXPECT_EQ(n.y, 0.0);
  EXPECT_EQ(n.z, 0.0);
}

TEST(Mat3, RotationZOrthonormalNoRoll) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    double a = rng.uniform(-10, 10);
    Mat3 r = Mat3::rotation_z(a);
    EXPECT_LT(r.orthonormality_error(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    Vec3 v = r * Vec3{1, 0, 0};
    EXPECT_NEAR(v.x, std::cos(a), 1e-12);
    EXPECT_NEAR(v.y, std::sin(a), 1e-12);
    EXPECT_NEAR(v.z, 0.0, 1e-15);
  }
}

TEST(Mat3, MultiplyMatchesManualContraction) {
  Mat3 a = Mat3::rotation_z(0.3);
  Mat3 b = Mat3::rotation_z(-1.1);
  Mat3 ab = a * b;
  Mat3 expect = Mat3::rotation_z(0.3 - 1.1);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(ab.m[r][c], expect.m[r][c], 1e-12);
  Mat3 t = a.transposed() * a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      EXPECT_NEAR(t.m[r][c], r == c ? 1.0 : 0.0, 1e-12);
}

TEST(IntervalOverlap, SignConvention) {
  EXPECT_DOUBLE_EQ(interval_overlap(0, 2, 1, 3), 1.0);
  EXPECT_DOUBLE_EQ(interval_overlap(0, 1, 1, 2), 0.0);
  EXPECT_LT(interval_overlap(0, 1, 2, 3), 0.0);
  EXPECT_DOUBLE_EQ(interval_overlap(0, 4, 1, 2), 1.0);
}

// Independent separating-axis oracle built from explicit corner projections
// rather than the projection-radius formula.
namespace {
bool sat_overlap(const Obb2& a, const Obb2& b) {
  auto axes = [](const Obb2& o) {
    return std::array<Vec2, 2>{Vec2{1, 0}.rotated(o.yaw),
                               Vec2{0, 1}.rotated(o.yaw)};
  };
  auto ca = a.corners(), cb = b.corners();
  for (const Obb2* o : {&a, &b}) {
    for (const Vec2& axis : axes(*o)) {
      double alo = 1e300, ahi = -1e300, blo = 1e300, bhi = -1e300;
      for (const Vec2& c : ca) {
        double p = c.dot(axis);
        alo = std::min(alo, p);
        ahi = std::max(ahi, p);
      }
      for (const Vec2& c : cb) {
        double p = c.dot(axis);
        blo = std::min(blo, p);
        bhi = std::max(bhi, p);
      }
      if (ahi <= blo + 1e-9 || bhi <= alo + 1e-9) return false;
    }
  }
  return true;
}
}  // namespace

TEST(Obb2, IntersectAgreesWithCornerProjectionOracle) {
  Rng rng(42);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    Obb2 a{{rng.uniform(-2, 2), rng.uniform(-2, 2)},
           rng.uniform(0.1, 1.0),
           rng.uniform(0.1, 1.0),
           rng.uniform(0, kTwoPi)};
    Obb2 b{{rng.uniform(-2, 2), rng.uniform(-2, 2)},
           rng.uniform(0.1, 1.0),
           rng.uniform(0.1, 1.0),
           rng.uniform(0, kTwoPi)};
    bool oracle = sat_overlap(a, b);
    EXPECT_EQ(obb_intersect(a, b), oracle) << "case " << i;
    EXPECT_EQ(obb_intersect(b, a), oracle) << "case " << i;
    hits += oracle;
  }
  // The sample must exercise both branches.
  EXPECT_GT(hits, 100);
  EXPECT_LT(hits, 1900);
}

TEST(Obb2, TouchingEdgesDoNotIntersect) {
  Obb2 a{{0.0, 0.0}, 0.5, 0.5, 0.0};
  Obb2 b{{1.0, 0.0}, 0.5, 0.5, 0.0};
  EXPECT_FALSE(obb_intersect(a, b));
  Obb2 c{{0.999, 0.0}, 0.5, 0.5, 0.0};
  EXPECT_TRUE(obb_intersect(a, c));
}

TEST(Obb2, MtvSeparatesIntersectingBoxes) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    Obb2 a{{rng.uniform(-1, 1), rng.uniform(-1, 1)},
           rng.uniform(0.2, 0.8),
           rng.uniform(0.2, 0.8),
           rng.uniform(0, kTwoPi)};
    Obb2 b{{a.center.x + rng.uniform(-0.3, 0.3),
            a.center.y + rng.uniform(-0.3, 0.3)},
           rng.uniform(0.2, 0.8),
           rng.uniform(0.2, 0.8),
           rng.uniform(0, kTwoPi)};
    if (!obb_intersect(a, b)) continue;
    Vec2 mtv = obb_mtv(a, b);
    Obb2 moved = b;
    moved.center = b.center + mtv * 1.0001;
    EXPECT_FALSE(obb_intersect(a, moved)) << "case " << i;
  }
}

TEST(Obb2, ContainsPointAxisAlignedAndRotated) {
  Obb2 box{{1.0, 1.0}, 0.5, 0.25, 0.0};
  EXPECT_TRUE(box.contains({1.0, 1.0}));
  EXPECT_TRUE(box.contains({1.49, 1.0}));
  EXPECT_FALSE(box.contains({1.51, 1.0}));
  EXPECT_FALSE(box.contains({1.0, 1.26}));
  Obb2 rot{{0.0, 0.0}, 1.0, 0.1, kPi / 4.0};
  // Local +x end rotates onto the diagonal.
  Vec2 tip = Vec2{0.99, 0.0}.rotated(kPi / 4.0);
  EXPECT_TRUE(rot.contains(tip));
  EXPECT_FALSE(rot.contains({0.99, 0.0}));
}

TEST(Rng, DeterministicPerSeedDistinctAcrossSeeds) {
  Rng a(9), b(9), c(10);
  bool all_equal = true;
  for (int i = 0; i < 32; ++i) {
    double va = a.uniform(0, 1);
    double vb = b.uniform(0, 1);
    EXPECT_DOUBLE_EQ(va, vb);
    if (va != c.uniform(0, 1)) all_equal = false;
    EXPECT_GE(va, 0.0);
    EXPECT_LT(va, 1.0);
  }
  EXPECT_FALSE(all_equal);
}

TEST(Rng, NextIntCoversRangeInclusive) {
  Rng rng(5);
  bool lo = false, hi = false;
  for (int i = 0; i < 1000; ++i) {
    int v = rng.next_int(2, 5);
    ASSERT_GE(v, 2);
    ASSERT_LE(v, 5);
    lo |= v == 2;
    hi |= v == 5;
  }
  EXPECT_TRUE(lo);
  EXPECT_TRUE(hi);
}

TEST(Rng, ForkedStreamsDiverge) {
  Rng base(1);
  Rng f1 = base.fork(1);
  Rng f2 = base.fork(2);
  bool differ = false;
  for (int i = 0; i < 16; ++i)
    differ |= f1.next_u64() != f2.next_u64();
  EXPECT_TRUE(differ);
}
