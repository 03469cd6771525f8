#pragma once

// Kulkarni limit set of a cyclic group <g>, read off the Jordan type. Every
// limit object is built from eigenvectors of g (or of its transpose) in the
// original coordinates, so no basis change has to be undone afterwards.

#include <algorithm>
#include <vector>

#include "kleinian/element_class.hpp"

namespace kleinian {

struct LimitSetDesc {
  enum class Kind { Empty, WholePlane, Lines };

  Kind kind = Kind::Empty;
  std::vector<ProjLine> lines;
  std::vector<ProjPoint> isolated_points;
};

inline const char* to_string(LimitSetDesc::Kind k) {
  switch (k) {
    case LimitSetDesc::Kind::Empty: return "Empty";
    case LimitSetDesc::Kind::WholePlane: return "WholePlane";
    case LimitSetDesc::Kind::Lines: return "Lines";
  }
  return "Unknown";
}

/// Limit set from an existing classification of g.
inline LimitSetDesc limit_set_from_class(const ElementClass& c) {
  LimitSetDesc out;
  const auto& es = c.eigenspaces;
  const bool elliptic = c.kind == ElementKind::EllipticFinite ||
                        c.kind == ElementKind::EllipticInfiniteOrSuspect;
  const bool complete = !es.empty() && std::all_of(es.begin(), es.end(), [](const Eigenspace& e) {
    return !e.points.empty() && !e.lines.empty();
  });
  if (!elliptic && !complete) {
    throw Error(ErrorCode::Ambiguous, "classification left an eigenspace without a basis");
  }
  auto lines = [&](std::vector<ProjLine> ls) {
    out.kind = LimitSetDesc::Kind::Lines;
    out.lines = std::move(ls);
  };
  switch (c.kind) {
    case ElementKind::EllipticFinite:
      return out;
    case ElementKind::EllipticInfiniteOrSuspect:
      throw Error(ErrorCode::NonDiscreteWitness,
                  "elliptic element of infinite order: limit set is all of P2");
    case ElementKind::ParabolicUnipotentRank1:
      // The two-dimensional fixed subspace.
      lines({line_through(es[0].points[0], es[0].points[1])});
      return out;
    case ElementKind::ParabolicUnipotentRank2:
      lines({es[0].lines[0]});
      return out;
    case ElementKind::ParabolicEllipto:
      lines({line_through(es[0].points[0], es[1].points[0])});
      return out;
    case ElementKind::ComplexHomothety:
      lines({line_through(es[0].points[0], es[0].points[1])});
      out.isolated_points = {es[1].points[0]};
      return out;
    case ElementKind::Screw: {
      // Eigenvalues are sorted by modulus, so the equal pair is adjacent.
      const double l0 = std::log(std::abs(es[0].value));
      const double l1 = std::log(std::abs(es[1].value));
      const double l2 = std::log(std::abs(es[2].value));
      const bool low_pair = std::abs(l0 - l1) < std::abs(l1 - l2);
      const int a = low_pair ? 0 : 1, b = low_pair ? 1 : 2,
                lone = low_pair ? 2 : 0;
      lines({line_through(es[a].points[0], es[b].points[0])});
      out.isolated_points = {es[lone].points[0]};
      return out;
    }
    case ElementKind::Loxoparabolic:
      lines({es[0].lines[0], es[1].lines[0]});
      return out;
    case ElementKind::StronglyLoxodromic: {
      const ProjPoint& repelling = es[0].points[0];
      const ProjPoint& saddle = es[1].points[0];
      const ProjPoint& attracting = es[2].points[0];
      lines({line_through(attracting, saddle), line_through(saddle, repelling)});
      return out;
    }
  }
  return out;
}

inline LimitSetDesc limit_set_cyclic(const GroupElement& g,
                                     double tolerance = tol::kClassify) {
  return limit_set_from_class(classify(g, tolerance));
}

/// Every object of a is within tolerance of an object of b and vice versa.
inline bool same_limit_set(const LimitSetDesc& a, const LimitSetDesc& b,
                           double tolerance) {
  if (a.kind != b.kind || a.lines.size() != b.lines.size() ||
      a.isolated_points.size() != b.isolated_points.size()) {
    return false;
  }
  auto covered = [tolerance](const auto& xs, const auto& ys) {
    return std::all_of(xs.begin(), xs.end(), [&](const auto& x) {
      return std::any_of(ys.begin(), ys.end(), [&](const auto& y) {
        return chordal_dist(x, y) <= tolerance;
      });
    });
  };
  return covered(a.lines, b.lines) && covered(b.lines, a.lines) &&
         covered(a.isolated_points, b.isolated_points) &&
         covered(b.isolated_points, a.isolated_points);
}

namespace detail {

template <class Scalar>
Scalar int_power(Scalar base, int n) {
  if (n < 0) return Scalar(1) / int_power(base, -n);
  Scalar acc(1);
  for (int i = 0; i < n; ++i) acc = acc * base;
  return acc;
}

}  // namespace detail

/// Closed-form n-th power of a matrix already in Jordan form, for the
/// shapes (l 1 0; 0 l 1; 0 0 l) and (l 1 0; 0 l 0; 0 0 m). Works for any
/// exact scalar type, including integers when l = +-1 and m = +-1.
template <class Scalar>
Eigen::Matrix<Scalar, 3, 3> power_matrix_closed_form(
    const Eigen::Matrix<Scalar, 3, 3>& j, int n) {
  using M = Eigen::Matrix<Scalar, 3, 3>;
  const Scalar zero(0), one(1);
  const Scalar l = j(0, 0);
  const bool lower_zero = j(1, 0) == zero && j(2, 0) == zero && j(2, 1) == zero;
  const bool common = lower_zero && j(0, 1) == one && j(1, 1) == l && j(0, 2) == zero;
  const bool triple = common && j(1, 2) == one && j(2, 2) == l;
  const bool block = common && j(1, 2) == zero && j(2, 2) != l;
  const bool block_unipotent = common && j(1, 2) == zero && j(2, 2) == l;
  if (!(triple || block || block_unipotent)) {
    throw Error(ErrorCode::UnsupportedShape,
                "closed-form power needs a non-diagonal Jordan shape");
  }
  M out = M::Zero();
  const Scalar ln = detail::int_power(l, n);
  const Scalar nn(n);
  const Scalar dn = nn * detail::int_power(l, n - 1);
  out(0, 0) = ln;
  out(1, 1) = ln;
  out(0, 1) = dn;
  if (triple) {
    out(2, 2) = ln;
    out(1, 2) = dn;
    // n(n-1)/2 l^(n-2); n(n-1) is always even.
    out(0, 2) = Scalar((static_cast<long long>(n) * (n - 1)) / 2) *
                detail::int_power(l, n - 2);
  } else {
    out(2, 2) = detail::int_power(j(2, 2), n);
  }
  return out;
}

}  // namespace kleinian
