#pragma once

// Homogeneous-coordinate geometry of the complex projective plane and its
// dual, and the action of PSL(3,C) on both.

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "kleinian/core.hpp"

namespace kleinian {

namespace detail {

/// Unit norm, dominant coordinate real positive. Values already in that form
/// are returned unchanged so canonicalization is exactly idempotent.
inline Vec3 canonical_triple(const Vec3& v) {
  const double n = v.norm();
  if (!(n >= tol::kZeroVector)) {
    throw Error(ErrorCode::ZeroVector, "zero homogeneous triple");
  }
  const int k = dominant_index(v);
  if (v[k].imag() == 0.0 && v[k].real() > 0.0 &&
      std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    return v;
  }
  const Complex phase = std::abs(v[k]) / v[k];
  Vec3 out = v * (phase / n);
  out[k] = Complex(out[k].real(), 0.0);
  return out;
}

/// sqrt(1 - |<a,b>|^2) for unit vectors, via the Lagrange identity so that
/// nearly equal classes keep full relative precision.
inline double chordal(const Vec3& a, const Vec3& b) {
  const double s = std::norm(a[0] * b[1] - a[1] * b[0]) +
                   std::norm(a[0] * b[2] - a[2] * b[0]) +
                   std::norm(a[1] * b[2] - a[2] * b[1]);
  return std::min(1.0, std::sqrt(s));
}

}  // namespace detail

/// A point or line of P2(C) stored as its canonical unit representative.
template <class Tag>
class Homogeneous {
 public:
  Homogeneous() : v_(Vec3(1.0, 0.0, 0.0)) {}

  /// Canonicalizes v; throws ZeroVector for the zero triple.
  explicit Homogeneous(const Vec3& v) : v_(detail::canonical_triple(v)) {}

  Homogeneous(Complex a, Complex b, Complex c) : Homogeneous(Vec3(a, b, c)) {}

  const Vec3& coords() const noexcept { return v_; }
  Complex operator[](int i) const { return v_[i]; }

  bool operator==(const Homogeneous& other) const { return v_ == other.v_; }

 private:
  Vec3 v_;
};

struct PointTag {};
struct LineTag {};

using ProjPoint = Homogeneous<PointTag>;
/// Dual coordinates [A:B:C] of the line A z1 + B z2 + C z3 = 0.
using ProjLine = Homogeneous<LineTag>;

inline ProjPoint normalize_point(const Vec3& v) { return ProjPoint(v); }
inline ProjLine normalize_line(const Vec3& v) { return ProjLine(v); }

/// Fubini-Study chordal distance, in [0, 1].
template <class Tag>
double chordal_dist(const Homogeneous<Tag>& a, const Homogeneous<Tag>& b) {
  return detail::chordal(a.coords(), b.coords());
}

inline ProjLine line_through(const ProjPoint& p, const ProjPoint& q) {
  if (chordal_dist(p, q) <= tol::kCoincidence) {
    throw Error(ErrorCode::CoincidentPoints, "line through coincident points");
  }
  return ProjLine(cross(p.coords(), q.coords()));
}

inline ProjPoint meet(const ProjLine& l1, const ProjLine& l2) {
  if (chordal_dist(l1, l2) <= tol::kCoincidence) {
    throw Error(ErrorCode::CoincidentLines, "meet of coincident lines");
  }
  return ProjPoint(cross(l1.coords(), l2.coords()));
}

/// |A z1 + B z2 + C z3| for the unit representatives.
inline double incidence_residual(const ProjPoint& p, const ProjLine& l) {
  return std::abs(bilinear_dot(p.coords(), l.coords()));
}

inline bool incident(const ProjPoint& p, const ProjLine& l, double tolerance) {
  if (!(tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "incidence tolerance must be > 0");
  }
  return incidence_residual(p, l) <= tolerance;
}

/// Element of PSL(3,C): the canonical unit-determinant lift plus the word
/// that produced it.
class GroupElement {
 public:
  GroupElement() : m_(Mat3::Identity()) {}

  /// Rescales any invertible matrix to determinant one and picks the cube
  /// root of unity that puts the dominant entry's phase in [-pi/3, pi/3).
  explicit GroupElement(const Mat3& m, Word word = {})
      : m_(canonicalize(m)), word_(std::move(word)) {}

  static GroupElement identity() { return GroupElement(); }

  const Mat3& matrix() const noexcept { return m_; }
  const Word& word() const noexcept { return word_; }

  /// adj(m), the inverse of a unit-determinant matrix.
  GroupElement inverse() const {
    return GroupElement(adjugate(m_), inverse_word(word_));
  }

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    Word w = a.word_;
    w.insert(w.end(), b.word_.begin(), b.word_.end());
    return GroupElement(a.m_ * b.m_, std::move(w));
  }

  static Mat3 canonicalize(const Mat3& m) {
    const Complex det = m.determinant();
    if (!(std::abs(det) > 1e-300) || !std::isfinite(std::abs(det))) {
      throw Error(ErrorCode::NotInvertible, "matrix is not invertible");
    }
    Mat3 g = m * std::pow(det, -1.0 / 3.0);
    const int k = dominant_entry(g);
    const double phase = std::arg(g(k / 3, k % 3));
    constexpr double third = std::numbers::pi / 3.0;
    for (int r = 0; r < 3; ++r) {
      double shifted = phase + 2.0 * r * third;
      shifted = std::remainder(shifted, 2.0 * std::numbers::pi);
      if (shifted >= -third && shifted < third) {
        return g * cube_root_of_unity(r);
      }
    }
    return g;
  }

 private:
  Mat3 m_;
  Word word_;
};

/// Sup distance between PSL classes: min over cube roots w of |a - w b|.
inline double psl_distance(const Mat3& a, const Mat3& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    best = std::min(best, sup_norm(a - cube_root_of_unity(k) * b));
  }
  return best;
}

inline double psl_distance(const GroupElement& a, const GroupElement& b) {
  return psl_distance(a.matrix(), b.matrix());
}

inline double distance_to_identity(const GroupElement& g) {
  return psl_distance(g.matrix(), Mat3::Identity());
}

inline ProjPoint apply_point(const GroupElement& g, const ProjPoint& p) {
  return ProjPoint(g.matrix() * p.coords());
}

/// Row vector (A, B, C) times g^-1, i.e. the image line g(l).
inline ProjLine apply_line(const GroupElement& g, const ProjLine& l) {
  return ProjLine(adjugate(g.matrix()).transpose() * l.coords());
}

inline GroupElement power(const GroupElement& g, int n) {
  GroupElement base = n < 0 ? g.inverse() : g;
  Mat3 acc = Mat3::Identity();
  Mat3 b = base.matrix();
  for (unsigned e = static_cast<unsigned>(n < 0 ? -n : n); e; e >>= 1) {
    if (e & 1u) acc = acc * b;
    b = b * b;
  }
  Word w;
  for (int i = 0; i < std::abs(n); ++i) {
    w.insert(w.end(), base.word().begin(), base.word().end());
  }
  return GroupElement(acc, std::move(w));
}

inline bool general_position3(const ProjLine& a, const ProjLine& b,
                              const ProjLine& c) {
  Mat3 m;
  m.row(0) = a.coords().transpose();
  m.row(1) = b.coords().transpose();
  m.row(2) = c.coords().transpose();
  return std::abs(m.determinant()) > tol::kGeneralPosition;
}

/// k = 3: some triple is in general position. k = 4: some four lines are
/// pairwise distinct with no three concurrent.
inline bool count_general_position(std::span<const ProjLine> lines, int k) {
  if (k != 3 && k != 4) {
    throw Error(ErrorCode::InvalidArgument, "k must be 3 or 4");
  }
  const std::size_t n = lines.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t m = j + 1; m < n; ++m) {
        if (!general_position3(lines[i], lines[j], lines[m])) continue;
        if (k == 3) return true;
        for (std::size_t q = m + 1; q < n; ++q) {
          if (general_position3(lines[i], lines[j], lines[q]) &&
              general_position3(lines[i], lines[m], lines[q]) &&
              general_position3(lines[j], lines[m], lines[q])) {
            return true;
          }
        }
      }
    }
  }
  return false;
}

inline ProjPoint basis_point(int i) {
  Vec3 v = Vec3::Zero();
  v[i] = 1.0;
  return ProjPoint(v);
}

inline ProjLine basis_line(int i) {
  Vec3 v = Vec3::Zero();
  v[i] = 1.0;
  return ProjLine(v);
}

}  // namespace kleinian
