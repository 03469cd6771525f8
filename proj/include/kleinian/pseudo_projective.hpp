#pragma once

// Pseudo-projective maps: classes of nonzero, possibly singular, 3x3
// matrices. They compactify PSL(3,C) and are the limits of divergent
// sequences of group elements.

#include <concepts>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "kleinian/element_class.hpp"

namespace kleinian {

/// A projective subspace of P2: nothing, a point, a line or everything.
struct Subspace {
  enum class Kind { Empty, Point, Line, Plane };

  Kind kind = Kind::Empty;
  ProjPoint point;  // meaningful when kind == Point
  ProjLine line;    // meaningful when kind == Line

  /// Projective dimension, with -1 for the empty subspace.
  int dimension() const {
    switch (kind) {
      case Kind::Empty: return -1;
      case Kind::Point: return 0;
      case Kind::Line: return 1;
      case Kind::Plane: return 2;
    }
    return -1;
  }

  static Subspace empty() { return {}; }
  static Subspace plane() { return {Kind::Plane, {}, {}}; }
  static Subspace of(const ProjPoint& p) { return {Kind::Point, p, {}}; }
  static Subspace of(const ProjLine& l) { return {Kind::Line, {}, l}; }
};

inline const char* to_string(Subspace::Kind k) {
  switch (k) {
    case Subspace::Kind::Empty: return "empty";
    case Subspace::Kind::Point: return "point";
    case Subspace::Kind::Line: return "line";
    case Subspace::Kind::Plane: return "plane";
  }
  return "unknown";
}

/// Distance from p to a subspace: chordal for a point, incidence residual
/// for a line, 0 for the plane and +inf for the empty subspace.
inline double distance_to(const ProjPoint& p, const Subspace& s) {
  switch (s.kind) {
    case Subspace::Kind::Empty: return std::numeric_limits<double>::infinity();
    case Subspace::Kind::Point: return chordal_dist(p, s.point);
    case Subspace::Kind::Line: return incidence_residual(p, s.line);
    case Subspace::Kind::Plane: return 0.0;
  }
  return 0.0;
}

/// True when point subspace a lies in b (point on line, equal points, ...).
inline bool contained_in(const Subspace& a, const Subspace& b, double tolerance) {
  if (a.kind == Subspace::Kind::Empty || b.kind == Subspace::Kind::Plane) return true;
  if (a.dimension() > b.dimension()) return false;
  if (a.kind == Subspace::Kind::Point) return distance_to(a.point, b) <= tolerance;
  return chordal_dist(a.line, b.line) <= tolerance;
}

inline bool same_subspace(const Subspace& a, const Subspace& b, double tolerance) {
  return a.kind == b.kind && contained_in(a, b, tolerance);
}

class PseudoProjMap {
 public:
  const Mat3& matrix() const noexcept { return m_; }
  int rank() const noexcept { return rank_; }
  const Subspace& kernel() const noexcept { return kernel_; }
  const Subspace& image() const noexcept { return image_; }

  /// Sup-norm normalizes s, fixes the phase and reads rank, kernel and
  /// image off the singular value decomposition.
  static PseudoProjMap from_matrix(const Mat3& s) {
    PseudoProjMap out;
    out.m_ = projective_normalize(s);
    Eigen::JacobiSVD<Mat3> svd(out.m_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d sv = svd.singularValues();
    out.rank_ = 0;
    for (int i = 0; i < 3; ++i) {
      if (sv[i] > tol::kRank) ++out.rank_;
    }
    const Mat3& u = svd.matrixU();
    const Mat3& v = svd.matrixV();
    switch (out.rank_) {
      case 3:
        out.kernel_ = Subspace::empty();
        out.image_ = Subspace::plane();
        break;
      case 2:
        out.kernel_ = Subspace::of(ProjPoint(Vec3(v.col(2))));
        out.image_ = Subspace::of(ProjLine(Vec3(u.col(2).conjugate())));
        break;
      default:
        // Rank 1: s = sigma u0 v0^H, so the kernel is the line v0^H x = 0.
        out.kernel_ = Subspace::of(ProjLine(Vec3(v.col(0).conjugate())));
        out.image_ = Subspace::of(ProjPoint(Vec3(u.col(0))));
        break;
    }
    return out;
  }

 private:
  Mat3 m_ = Mat3::Identity();
  int rank_ = 3;
  Subspace kernel_;
  Subspace image_ = Subspace::plane();
};

inline PseudoProjMap from_matrix(const Mat3& s) {
  return PseudoProjMap::from_matrix(s);
}

inline ProjPoint evaluate(const PseudoProjMap& s, const ProjPoint& p) {
  if (distance_to(p, s.kernel()) <= tol::kIdentity) {
    throw Error(ErrorCode::InKernel, "point lies in the kernel");
  }
  return ProjPoint(s.matrix() * p.coords());
}

/// A sequence of group elements, given as lifts to GL(3,C). Yields nullopt
/// when exhausted. Lifts may be scaled arbitrarily, which lets long power
/// sequences stay normalized instead of overflowing.
template <class G>
concept MatrixSequence = requires(G g) {
  { g() } -> std::convertible_to<std::optional<Mat3>>;
};

using SequenceFn = std::function<std::optional<Mat3>()>;

/// Powers of a single element, either g, g^2, g^3, ... or the dyadic
/// subsequence g, g^2, g^4, ... which converges geometrically even where the
/// full sequence converges like 1/n. Knows its inverse sequence, so limits of
/// inverses never have to be recovered from collapsed terms.
class PowerSequence {
 public:
  PowerSequence(const GroupElement& g, bool dyadic)
      : g_(g), acc_(dyadic ? g.matrix() : Mat3::Identity()), dyadic_(dyadic) {
    if (!dyadic) return;
    // Squaring a non-diagonalizable lift doubles the exponent but also
    // squares the rounding left in its nilpotent part, so defective
    // elements are powered in closed form instead.
    try {
      const ElementClass c = detail::classify_with_retry(g);
      if (is_defective(c.kind)) {
        zeta_ = c.eigenvalues[0];
        xi_ = c.eigenvalues[2];
        kind_ = c.kind;
        closed_.emplace(g.matrix(), c.kind, zeta_, xi_);
      }
    } catch (const Error&) {
    }
  }

  std::optional<Mat3> operator()() {
    if (closed_) {
      acc_ = (*closed_)(exponent_);
      exponent_ *= 2.0;
      return acc_;
    }
    if (!dyadic_) {
      acc_ = projective_normalize(acc_ * g_.matrix());
    } else if (!first_) {
      acc_ = projective_normalize(acc_ * acc_);
    }
    first_ = false;
    return acc_;
  }

  PowerSequence inverse() const {
    PowerSequence out(g_.inverse(), dyadic_, false);
    if (closed_) {
      out.kind_ = kind_;
      out.zeta_ = 1.0 / zeta_;
      out.xi_ = 1.0 / xi_;
      out.closed_.emplace(adjugate(g_.matrix()), kind_, out.zeta_, out.xi_);
    }
    return out;
  }

 private:
  PowerSequence(const GroupElement& g, bool dyadic, bool)
      : g_(g), acc_(dyadic ? g.matrix() : Mat3::Identity()), dyadic_(dyadic) {}

  GroupElement g_;
  Mat3 acc_;
  bool dyadic_;
  bool first_ = true;
  std::optional<detail::DefectivePowers> closed_;
  ElementKind kind_ = ElementKind::EllipticFinite;
  Complex zeta_{1.0}, xi_{1.0};
  double exponent_ = 1.0;
};

inline PowerSequence power_sequence(const GroupElement& g) { return {g, false}; }

inline PowerSequence dyadic_power_sequence(const GroupElement& g) { return {g, true}; }

/// Finite sequence of group elements.
inline SequenceFn list_sequence(std::vector<GroupElement> elements) {
  return [els = std::move(elements), i = std::size_t{0}]() mutable
         -> std::optional<Mat3> {
    if (i >= els.size()) return std::nullopt;
    return els[i++].matrix();
  };
}

/// Lifts of the inverses of the terms of seq, via adjugates.
template <MatrixSequence Seq>
SequenceFn cofactor_sequence(Seq seq) {
  return [seq = std::move(seq)]() mutable -> std::optional<Mat3> {
    std::optional<Mat3> m = seq();
    if (!m) return std::nullopt;
    return adjugate(*m);
  };
}

struct SequenceLimit {
  /// Empty when the sequence did not settle within the term budget.
  std::optional<PseudoProjMap> limit;
  int terms_used = 0;
};

inline constexpr int kCauchyWindow = 5;
inline constexpr double kDefaultLimitTol = 1e-12;

/// Normalizes each term; declares convergence once kCauchyWindow
/// consecutive terms lie pairwise within tolerance in sup distance.
template <MatrixSequence Seq>
SequenceLimit limit_of_sequence(Seq seq, int max_terms,
                                double tolerance = kDefaultLimitTol) {
  if (max_terms < 2 || !(tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "need max_terms >= 2 and tol > 0");
  }
  std::deque<Mat3> window;
  SequenceLimit out;
  for (int n = 0; n < max_terms; ++n) {
    std::optional<Mat3> next = seq();
    if (!next) break;
    ++out.terms_used;
    window.push_back(projective_normalize(*next));
    if (static_cast<int>(window.size()) > kCauchyWindow) window.pop_front();
    if (static_cast<int>(window.size()) < kCauchyWindow) continue;
    bool settled = true;
    for (std::size_t i = 0; i < window.size() && settled; ++i) {
      for (std::size_t j = i + 1; j < window.size(); ++j) {
        if (sup_norm(window[i] - window[j]) > tolerance) {
          settled = false;
          break;
        }
      }
    }
    if (settled) {
      out.limit = PseudoProjMap::from_matrix(window.back());
      return out;
    }
  }
  if (out.terms_used == 0) {
    throw Error(ErrorCode::EmptySequence, "sequence produced no terms");
  }
  return out;
}

/// Limit of the inverses. Sequences that can produce their inverse sequence
/// directly are asked to; otherwise the adjugates of the terms are used, which
/// is only accurate while the terms are far from singular.
template <MatrixSequence Seq>
SequenceLimit inverse_limit(Seq seq, int max_terms,
                            double tolerance = kDefaultLimitTol) {
  if constexpr (requires { { seq.inverse() } -> MatrixSequence; }) {
    return limit_of_sequence(seq.inverse(), max_terms, tolerance);
  } else {
    return limit_of_sequence(cofactor_sequence(std::move(seq)), max_terms,
                             tolerance);
  }
}

/// Chordal distance between gamma_n^-1(l) at the last of max_terms terms and
/// the kernel line of S.
template <MatrixSequence Seq>
double line_collapse_check(Seq seq, const ProjLine& l, const PseudoProjMap& s,
                           int max_terms) {
  if (s.kernel().kind != Subspace::Kind::Line) {
    throw Error(ErrorCode::InvalidArgument, "kernel of S must be a line");
  }
  if (s.image().kind == Subspace::Kind::Point &&
      incidence_residual(s.image().point, l) <= 1e-6) {
    throw Error(ErrorCode::ImagePointOnLine, "line passes through Im(S)");
  }
  std::optional<Mat3> last;
  for (int n = 0; n < max_terms; ++n) {
    std::optional<Mat3> next = seq();
    if (!next) break;
    last = projective_normalize(*next);
  }
  if (!last) throw Error(ErrorCode::EmptySequence, "sequence produced no terms");
  // gamma^-1 sends the line with row vector l to l * gamma.
  const ProjLine moved(Vec3(last->transpose() * l.coords()));
  return chordal_dist(moved, s.kernel().line);
}

/// Kernels of a family of limit maps; Eq is estimated as the complement of
/// their union.
struct KernelSet {
  std::vector<ProjLine> lines;
  std::vector<ProjPoint> points;
};

inline KernelSet equicontinuity_complement(std::span<const PseudoProjMap> limits) {
  constexpr double kDedup = 1e-8;
  KernelSet out;
  for (const PseudoProjMap& s : limits) {
    const Subspace& k = s.kernel();
    if (k.kind == Subspace::Kind::Empty) {
      throw Error(ErrorCode::FullRankMember, "invertible limit has no kernel");
    }
    if (k.kind == Subspace::Kind::Line) {
      const bool seen = std::any_of(out.lines.begin(), out.lines.end(),
                                    [&](const ProjLine& l) {
                                      return chordal_dist(l, k.line) <= kDedup;
                                    });
      if (!seen) out.lines.push_back(k.line);
    } else {
      const bool seen = std::any_of(out.points.begin(), out.points.end(),
                                    [&](const ProjPoint& p) {
                                      return chordal_dist(p, k.point) <= kDedup;
                                    });
      if (!seen) out.points.push_back(k.point);
    }
  }
  return out;
}

}  // namespace kleinian
