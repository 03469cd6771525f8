#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace kleinian;
using namespace kleinian::testing;

namespace {

const double kRoot2 = std::sqrt(2.0);
const double kRoot3 = std::sqrt(3.0);

Vec3 v3(Complex a, Complex b, Complex c) { return Vec3(a, b, c); }

void expect_triple_near(const Vec3& got, const Vec3& want, double eps = 1e-12) {
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(std::abs(got[i] - want[i]), 0.0, eps) << "coordinate " << i;
  }
}

Mat3 example_b() {
  Mat3 b = Mat3::Zero();
  b(1, 0) = 1.0;
  b(2, 1) = 1.0;
  b(0, 2) = 1.0;
  return b;
}

}  // namespace

TEST(NormalizePoint, ScalesToUnitNorm) {
  expect_triple_near(normalize_point(v3(2, 0, 0)).coords(), v3(1, 0, 0));
}

TEST(NormalizePoint, RotatesPhaseOfDominantEntry) {
  expect_triple_near(normalize_point(v3(0, 0, Complex(0, -3))).coords(), v3(0, 0, 1));
}

TEST(NormalizePoint, TieGoesToLowestIndex) {
  const Vec3 c = normalize_point(v3(1, 1, 1)).coords();
  expect_triple_near(c, v3(1, 1, 1) / kRoot3);
  // Rotate an equal-modulus triple and check the first entry is made real.
  const Vec3 d = normalize_point(v3(Complex(0, 1), 1, -1)).coords();
  EXPECT_NEAR(d[0].imag(), 0.0, 1e-15);
  EXPECT_GT(d[0].real(), 0.0);
}

TEST(NormalizePoint, ZeroVectorRejected) {
  try {
    normalize_point(Vec3::Zero());
    FAIL() << "expected ZeroVector";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVector);
  }
}

TEST(NormalizePoint, IdempotentOnStoredValues) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const ProjPoint p = random_point(rng);
    const ProjPoint q = normalize_point(p.coords());
    EXPECT_EQ(p.coords(), q.coords());
    EXPECT_NEAR(p.coords().norm(), 1.0, 1e-12);
  }
}

TEST(LineThrough, CoordinatePairs) {
  expect_triple_near(line_through(basis_point(0), basis_point(1)).coords(), v3(0, 0, 1));
  expect_triple_near(line_through(basis_point(1), basis_point(2)).coords(), v3(1, 0, 0));
}

TEST(LineThrough, HandComputedCrossProduct) {
  const ProjPoint p(v3(1, 1, 0)), q(v3(0, 1, 1));
  const ProjLine l = line_through(p, q);
  expect_triple_near(l.coords(), v3(1, -1, 1) / kRoot3);
  EXPECT_LE(std::abs(bilinear_dot(l.coords(), p.coords())), 1e-10);
  EXPECT_LE(std::abs(bilinear_dot(l.coords(), q.coords())), 1e-10);
}

TEST(LineThrough, CoincidentPointsRejected) {
  const ProjPoint p(v3(1, 2, 3));
  try {
    line_through(p, ProjPoint(v3(2, 4, 6)));
    FAIL() << "expected CoincidentPoints";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CoincidentPoints);
  }
}

TEST(Meet, CoordinateLines) {
  expect_triple_near(meet(basis_line(2), basis_line(0)).coords(), v3(0, 1, 0));
  expect_triple_near(meet(basis_line(2), basis_line(1)).coords(), v3(1, 0, 0));
}

TEST(Meet, HandComputed) {
  const ProjLine a(v3(1, 1, 0) / kRoot2), b(v3(0, 1, 1) / kRoot2);
  const ProjPoint p = meet(a, b);
  expect_triple_near(p.coords(), v3(1, -1, 1) / kRoot3);
  EXPECT_LE(incidence_residual(p, a), 1e-10);
  EXPECT_LE(incidence_residual(p, b), 1e-10);
}

TEST(Meet, CoincidentLinesRejected) {
  try {
    meet(basis_line(0), ProjLine(v3(Complex(0, 5), 0, 0)));
    FAIL() << "expected CoincidentLines";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CoincidentLines);
  }
}

TEST(Meet, AnyTwoDistinctLinesMeet) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const ProjLine a = random_line(rng), b = random_line(rng);
    const ProjPoint p = meet(a, b);
    EXPECT_LE(incidence_residual(p, a), 1e-10);
    EXPECT_LE(incidence_residual(p, b), 1e-10);
  }
}

TEST(Duality, MeetOfTwoLinesThroughPReturnsP) {
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const ProjPoint p = random_point(rng), q = random_point(rng), r = random_point(rng);
    const ProjPoint back = meet(line_through(p, q), line_through(p, r));
    EXPECT_LE(chordal_dist(back, p), 1e-8);
  }
}

TEST(Incident, Examples) {
  EXPECT_TRUE(incident(basis_point(0), basis_line(2), 1e-9));
  EXPECT_FALSE(incident(basis_point(2), basis_line(2), 1e-9));
  EXPECT_NEAR(incidence_residual(basis_point(2), basis_line(2)), 1.0, 1e-15);
  const ProjPoint p(v3(1, 1, 0) / kRoot2);
  const ProjLine l(v3(1, -1, 5) / std::sqrt(27.0));
  EXPECT_TRUE(incident(p, l, 1e-9));
}

TEST(ApplyPoint, Examples) {
  Rng rng(14);
  const ProjPoint p = random_point(rng);
  EXPECT_LE(chordal_dist(apply_point(GroupElement::identity(), p), p), 1e-15);

  Mat3 a = Mat3::Zero();
  a.diagonal() << 0.5, 1.0, 2.0;
  const ProjPoint q = apply_point(GroupElement(a), ProjPoint(v3(1, 1, 1)));
  expect_triple_near(q.coords(), v3(0.5, 1, 2) / std::sqrt(5.25));

  expect_triple_near(apply_point(GroupElement(example_b()), basis_point(0)).coords(),
                     v3(0, 1, 0));
}

TEST(ApplyLine, Examples) {
  Rng rng(15);
  const ProjLine l = random_line(rng);
  EXPECT_LE(chordal_dist(apply_line(GroupElement::identity(), l), l), 1e-15);

  Mat3 a = Mat3::Zero();
  a.diagonal() << 0.5, 1.0, 2.0;
  expect_triple_near(apply_line(GroupElement(a), basis_line(2)).coords(), v3(0, 0, 1));
}

TEST(ApplyLine, PermutationMovesThirdCoordinateLine) {
  // B sends e1 -> e2 -> e3 -> e1, so the line z3 = 0 spanned by e1, e2 goes
  // to the line spanned by e2, e3, which is z1 = 0.
  const GroupElement b(example_b());
  const ProjLine image = apply_line(b, basis_line(2));
  expect_triple_near(image.coords(), v3(1, 0, 0));
  for (int i : {0, 1}) {
    EXPECT_LE(incidence_residual(apply_point(b, basis_point(i)), image), 1e-15);
  }
}

TEST(Equivariance, IncidencePreservedByTheAction) {
  Rng rng(16);
  for (int i = 0; i < 1000; ++i) {
    const GroupElement g(random_well_conditioned(rng, 1e6));
    const ProjLine l = random_line(rng);
    // A point on l: meet with a random second line.
    const ProjPoint p = meet(l, random_line(rng));
    const ProjPoint q = random_point(rng);
    const Eigen::JacobiSVD<Mat3> svd(g.matrix());
    const double cond = svd.singularValues()[0] / svd.singularValues()[2];
    EXPECT_LE(incidence_residual(apply_point(g, p), apply_line(g, l)), std::max(1e-10, 1e-15 * cond));
    // The residual of an arbitrary pair changes by at most a factor cond.
    const double r = incidence_residual(q, l);
    const double moved = incidence_residual(apply_point(g, q), apply_line(g, l));
    EXPECT_GE(moved, r / cond * (1 - 1e-9) - 1e-12);
    EXPECT_LE(moved, r * cond * (1 + 1e-9) + 1e-12);
  }
}

TEST(Homomorphism, ApplyPointOfProduct) {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const GroupElement g(random_well_conditioned(rng, 100)), h(random_well_conditioned(rng, 100));
    const ProjPoint p = random_point(rng);
    EXPECT_LE(chordal_dist(apply_point(g * h, p), apply_point(g, apply_point(h, p))), 1e-9);
  }
}

TEST(ChordalDist, ExamplesAndOracle) {
  Rng rng(18);
  const ProjPoint p = random_point(rng);
  EXPECT_NEAR(chordal_dist(p, p), 0.0, 1e-7);
  EXPECT_NEAR(chordal_dist(basis_point(0), basis_point(1)), 1.0, 1e-15);
  EXPECT_NEAR(chordal_dist(ProjPoint(v3(1, 1, 0)), basis_point(0)), 1.0 / kRoot2, 1e-15);
  for (int i = 0; i < 1000; ++i) {
    const ProjPoint a = random_point(rng), b = random_point(rng);
    const double d = chordal_dist(a, b);
    EXPECT_NEAR(d, oracle_chordal(a.coords(), b.coords()), 1e-12);
    EXPECT_DOUBLE_EQ(d, chordal_dist(b, a));
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(GroupElementType, UnitDeterminantAndCanonicalPhase) {
  Rng rng(19);
  for (int i = 0; i < 1000; ++i) {
    const GroupElement g(random_well_conditioned(rng, 1e3) * gauss_complex(rng));
    EXPECT_LE(std::abs(g.matrix().determinant() - 1.0), 1e-10);
    const int k = dominant_entry(g.matrix());
    const double phase = std::arg(g.matrix()(k / 3, k % 3));
    EXPECT_GE(phase, -std::numbers::pi / 3 - 1e-12);
    EXPECT_LT(phase, std::numbers::pi / 3 + 1e-12);
    // Scaling by a cube root of unity does not change the representative.
    const GroupElement w(g.matrix() * cube_root_of_unity(1));
    // Only up to the rounding of the det-1 rescale, which grows with the norm.
    EXPECT_LE(sup_norm(w.matrix() - g.matrix()), 1e-13 * std::pow(sup_norm(g.matrix()), 2));
  }
}

TEST(GroupElementType, SingularMatrixRejected) {
  Mat3 m = Mat3::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  try {
    GroupElement g(m);
    FAIL() << "expected NotInvertible";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInvertible);
  }
}

TEST(GeneralPosition3, Examples) {
  EXPECT_TRUE(general_position3(basis_line(0), basis_line(1), basis_line(2)));
  EXPECT_FALSE(general_position3(basis_line(0), basis_line(1), ProjLine(v3(1, 1, 0))));
  Rng rng(20);
  for (int i = 0; i < 200; ++i) {
    const ProjPoint common = random_point(rng);
    const ProjLine a = line_through(common, random_point(rng));
    const ProjLine b = line_through(common, random_point(rng));
    const ProjLine c = line_through(common, random_point(rng));
    EXPECT_FALSE(general_position3(a, b, c));
  }
}

TEST(CountGeneralPosition, Examples) {
  const std::vector<ProjLine> coords = {basis_line(0), basis_line(1), basis_line(2)};
  EXPECT_TRUE(count_general_position(coords, 3));
  EXPECT_FALSE(count_general_position(coords, 4));
  std::vector<ProjLine> four = coords;
  four.emplace_back(v3(1, 1, 1));
  EXPECT_TRUE(count_general_position(four, 4));
  // Brute-force oracle: no triple of the four is concurrent.
  for (int skip = 0; skip < 4; ++skip) {
    Mat3 m;
    int col = 0;
    for (int i = 0; i < 4; ++i) {
      if (i != skip) m.col(col++) = four[i].coords();
    }
    EXPECT_GT(std::abs(m.determinant()), 1e-9);
  }
}
