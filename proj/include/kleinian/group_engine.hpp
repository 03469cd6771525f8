#pragma once

// Finitely generated subgroups of PSL(3,C): word balls, the union of cyclic
// limit sets over a ball, discreteness and fixed-point diagnostics, and the
// resulting estimate of the Kulkarni limit set.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kleinian/cyclic_limit.hpp"
#include "kleinian/pseudo_projective.hpp"

namespace kleinian {

inline constexpr int kMaxRadius = 12;
inline constexpr int kMaxGenerators = 6;
inline constexpr std::size_t kMaxFrontier = 10'000'000;
inline constexpr double kClusterRadius = 1e-7;
/// Products of exact relations land this close to the identity by rounding
/// alone; anything farther but still within tol::kIdentity is a witness.
inline constexpr double kRoundingIdentity = 1e-11;

class GroupPresentation {
 public:
  GroupPresentation() = default;

  /// Canonicalizes each matrix; labels default to g1, g2, ... and must be
  /// unique.
  GroupPresentation(const std::vector<Mat3>& matrices,
                    std::vector<std::string> labels = {}) {
    if (labels.empty()) {
      for (std::size_t i = 0; i < matrices.size(); ++i) {
        labels.push_back("g" + std::to_string(i + 1));
      }
    }
    if (labels.size() != matrices.size()) {
      throw Error(ErrorCode::InvalidArgument, "one label per generator");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (labels[i] == labels[j]) {
          throw Error(ErrorCode::InvalidArgument, "duplicate label " + labels[i]);
        }
      }
      generators_.emplace_back(matrices[i], Word{static_cast<int>(i) + 1});
      inverses_.push_back(adjugate(generators_.back().matrix()));
    }
    labels_ = std::move(labels);
  }

  const std::vector<GroupElement>& generators() const noexcept { return generators_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return generators_.size(); }

  /// The element spelled by w.
  GroupElement evaluate(const Word& w) const {
    Mat3 m = Mat3::Identity();
    for (int letter : w) m = m * letter_matrix(letter);
    return GroupElement(m, w);
  }

  const Mat3& letter_matrix(int letter) const {
    if (letter == 0 || std::abs(letter) > static_cast<int>(size())) {
      throw Error(ErrorCode::InvalidArgument, "letter out of range");
    }
    return letter > 0 ? generators_[letter - 1].matrix() : inverses_[-letter - 1];
  }

  /// "A B^-1 A", or "e" for the empty word.
  std::string spell(const Word& w) const {
    if (w.empty()) return "e";
    std::string out;
    for (int letter : w) {
      if (!out.empty()) out += ' ';
      out += labels_.at(std::abs(letter) - 1);
      if (letter < 0) out += "^-1";
    }
    return out;
  }

 private:
  std::vector<GroupElement> generators_;
  std::vector<std::string> labels_;
  std::vector<Mat3> inverses_;
};

/// The group of the worked example: A = diag(1/2, 1, 2) and the cyclic
/// permutation B sending e1 -> e2 -> e3 -> e1.
inline GroupPresentation example_group(double a11 = 0.5) {
  Mat3 a = Mat3::Zero();
  a.diagonal() << a11, 1.0, 2.0;
  Mat3 b = Mat3::Zero();
  b(1, 0) = 1.0;
  b(2, 1) = 1.0;
  b(0, 2) = 1.0;
  return GroupPresentation({a, b}, {"A", "B"});
}

struct WordBall {
  int radius = 0;
  /// Breadth-first order; elements[0] is the identity.
  std::vector<GroupElement> elements;
  /// A nontrivial word whose value lies within tol::kIdentity of the
  /// identity without being equal to it up to rounding.
  std::optional<Word> near_identity;
};

namespace detail {

struct GridKey {
  std::array<std::int64_t, 18> v;
  bool operator==(const GridKey&) const = default;
};

struct GridKeyHash {
  std::size_t operator()(const GridKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t x : k.v) {
      h ^= static_cast<std::uint64_t>(x);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

inline GridKey grid_key(const Mat3& normalized) {
  GridKey key;
  for (int k = 0; k < 9; ++k) {
    const Complex z = normalized(k / 3, k % 3);
    key.v[2 * k] = std::llround(z.real() / tol::kIdentity);
    key.v[2 * k + 1] = std::llround(z.imag() / tol::kIdentity);
  }
  return key;
}

}  // namespace detail

/// All elements of word length <= radius, each with a shortest word.
/// max_frontier caps the number of new elements at any one radius; the
/// check runs while a level is being filled, so the cap bounds memory too.
inline WordBall enumerate_ball(const GroupPresentation& g, int radius,
                               std::size_t max_frontier = kMaxFrontier) {
  if (radius < 0 || radius > kMaxRadius) {
    throw Error(ErrorCode::InvalidArgument, "radius must lie in [0, 12]");
  }
  if (g.size() == 0) throw Error(ErrorCode::InvalidArgument, "no generators");
  if (g.size() > kMaxGenerators) {
    throw Error(ErrorCode::InvalidArgument, "at most 6 generators");
  }
  std::vector<int> letters;
  for (int k = 1; k <= static_cast<int>(g.size()); ++k) {
    letters.push_back(k);
    letters.push_back(-k);
  }

  WordBall ball;
  ball.radius = radius;
  std::vector<Mat3> normalized;
  std::unordered_map<detail::GridKey, std::vector<std::size_t>, detail::GridKeyHash>
      index;

  auto insert = [&](GroupElement&& e) {
    Mat3 n = projective_normalize(e.matrix());
    auto& bucket = index[detail::grid_key(n)];
    for (std::size_t i : bucket) {
      if (sup_norm(normalized[i] - n) <= tol::kIdentity) return false;
    }
    bucket.push_back(ball.elements.size());
    normalized.push_back(std::move(n));
    ball.elements.push_back(std::move(e));
    return true;
  };

  insert(GroupElement::identity());
  std::size_t level_begin = 0, level_end = 1;
  constexpr std::size_t kBlock = 1 << 15;
  for (int r = 1; r <= radius; ++r) {
    for (std::size_t block = level_begin; block < level_end; block += kBlock) {
      const std::size_t block_end = std::min(level_end, block + kBlock);
      const std::size_t count = (block_end - block) * letters.size();
      std::vector<std::optional<GroupElement>> candidates(count);
      parallel_for(count, [&](std::size_t c) {
        const GroupElement& parent = ball.elements[block + c / letters.size()];
        const int letter = letters[c % letters.size()];
        if (!parent.word().empty() && parent.word().back() == -letter) return;
        Word w = parent.word();
        w.push_back(letter);
        candidates[c].emplace(parent.matrix() * g.letter_matrix(letter), std::move(w));
      });
      for (auto& c : candidates) {
        if (!c) continue;
        if (!ball.near_identity) {
          const double d = distance_to_identity(*c);
          if (d > kRoundingIdentity && d <= tol::kIdentity) ball.near_identity = c->word();
        }
        insert(std::move(*c));
        if (ball.elements.size() - level_end > max_frontier) {
          throw Error(ErrorCode::BallTooLarge, "frontier at radius " + std::to_string(r) +
                                                   " exceeds " + std::to_string(max_frontier));
        }
      }
    }
    level_begin = level_end;
    level_end = ball.elements.size();
  }
  return ball;
}

struct DualAccumulation {
  std::vector<ProjLine> lines;
  std::vector<Word> line_witnesses;
  std::vector<ProjPoint> isolated_points;
  std::vector<Word> point_witnesses;
  // Elements still ambiguous after the retry ladder; they contribute nothing.
  std::vector<Word> unclassified;
  double cluster_radius = kClusterRadius;
};

struct DiscretenessVerdict {
  bool witness_found = false;
  Word witness;
  std::string reason;
};

struct GroupDiagnostics {
  DiscretenessVerdict discreteness;
  std::optional<ProjPoint> global_fixed_point;
  std::optional<ProjLine> invariant_line;
  bool gp3 = false;
  bool gp4 = false;
};

struct KulkarniEstimate {
  LimitSetDesc limit;
  bool hypothesis_verified = false;
  int radius = 0;
  std::string provenance;
};

/// Everything derived from one word ball.
struct GroupAnalysis {
  WordBall ball;
  DualAccumulation accumulation;
  GroupDiagnostics diagnostics;
};

namespace detail {

/// Classification with a short retry ladder when the default tolerance
/// lands in a dead band.
/// Orthonormal basis of the intersection of column spans.
inline Eigen::MatrixXcd intersect(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& w) {
  const Mat3 pu = Mat3::Identity() - u * u.adjoint();
  const Mat3 pw = Mat3::Identity() - w * w.adjoint();
  Eigen::Matrix<Complex, 6, 3> stacked;
  stacked << pu, pw;
  Eigen::JacobiSVD<Eigen::Matrix<Complex, 6, 3>> svd(stacked, Eigen::ComputeFullV);
  int dim = 0;
  for (int i = 2; i >= 0 && svd.singularValues()[i] <= 1e-7; --i) ++dim;
  return svd.matrixV().rightCols(dim);
}

inline Eigen::MatrixXcd orthonormal(const std::vector<Vec3>& vs) {
  Eigen::MatrixXcd m(3, vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(i) = vs[i];
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return Eigen::MatrixXcd(qr.householderQ()).leftCols(vs.size());
}

/// Eigenspaces of g (dual = false) or of its transpose (dual = true).
inline std::vector<Eigen::MatrixXcd> eigenspace_bases(const GroupElement& g, bool dual) {
  std::vector<Eigen::MatrixXcd> out;
  try {
    for (const Eigenspace& e : classify_with_retry(g).eigenspaces) {
      std::vector<Vec3> vs;
      if (dual) {
        for (const ProjLine& l : e.lines) vs.push_back(l.coords());
      } else {
        for (const ProjPoint& p : e.points) vs.push_back(p.coords());
      }
      out.push_back(orthonormal(vs));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Ambiguous) throw;
    const EigenFrame f = eigen_frame(g);
    for (std::size_t i = 0; i < f.fixed_points.size(); ++i) {
      out.push_back(orthonormal(
          {dual ? f.invariant_lines[i].coords() : f.fixed_points[i].coords()}));
    }
  }
  return out;
}

/// A nonzero vector lying in some eigenspace of every generator.
inline std::optional<Vec3> common_eigenvector(const GroupPresentation& g, bool dual) {
  std::vector<Eigen::MatrixXcd> common = {Eigen::MatrixXcd(Mat3::Identity())};
  for (const GroupElement& gen : g.generators()) {
    std::vector<Eigen::MatrixXcd> next;
    for (const auto& e : eigenspace_bases(gen, dual)) {
      for (const auto& c : common) {
        Eigen::MatrixXcd x = intersect(c, e);
        if (x.cols() > 0) next.push_back(std::move(x));
      }
    }
    common = std::move(next);
    if (common.empty()) return std::nullopt;
  }
  return canonical_basis(common.front()).front();
}

}  // namespace detail

/// Adds Λ(γ) for each ball element, in ball order, so the first witness of a
/// line is a shortest word.
inline DualAccumulation accumulate(const WordBall& ball) {
  const std::size_t n = ball.elements.size();
  std::vector<std::optional<LimitSetDesc>> limits(n);
  std::vector<std::optional<Error>> errors(n);
  parallel_for(n, [&](std::size_t i) {
    try {
      limits[i] = limit_set_from_class(detail::classify_with_retry(ball.elements[i]));
    } catch (const Error& e) {
      errors[i] = e;
    }
  });

  DualAccumulation acc;
  for (std::size_t i = 0; i < n; ++i) {
    const Word& w = ball.elements[i].word();
    if (errors[i]) {
      if (errors[i]->code() != ErrorCode::Ambiguous) throw *errors[i];
      acc.unclassified.push_back(w);
      continue;
    }
    for (const ProjLine& l : limits[i]->lines) {
      const bool seen = std::any_of(acc.lines.begin(), acc.lines.end(), [&](const ProjLine& m) {
        return chordal_dist(l, m) <= acc.cluster_radius;
      });
      if (!seen) {
        acc.lines.push_back(l);
        acc.line_witnesses.push_back(w);
      }
    }
    for (const ProjPoint& p : limits[i]->isolated_points) {
      const bool seen = std::any_of(
          acc.isolated_points.begin(), acc.isolated_points.end(),
          [&](const ProjPoint& q) { return chordal_dist(p, q) <= acc.cluster_radius; });
      if (!seen) {
        acc.isolated_points.push_back(p);
        acc.point_witnesses.push_back(w);
      }
    }
  }
  // A point on a collected line adds nothing to the union.
  std::vector<ProjPoint> points;
  std::vector<Word> witnesses;
  for (std::size_t i = 0; i < acc.isolated_points.size(); ++i) {
    const ProjPoint& p = acc.isolated_points[i];
    const bool on_line = std::any_of(acc.lines.begin(), acc.lines.end(), [&](const ProjLine& l) {
      return incidence_residual(p, l) <= acc.cluster_radius;
    });
    if (!on_line) {
      points.push_back(p);
      witnesses.push_back(acc.point_witnesses[i]);
    }
  }
  acc.isolated_points = std::move(points);
  acc.point_witnesses = std::move(witnesses);
  return acc;
}

/// Ball, accumulation and diagnostics in one pass. A discreteness witness
/// is recorded in the diagnostics and leaves the accumulation empty.
inline GroupAnalysis analyze(const GroupPresentation& g, int radius) {
  GroupAnalysis out;
  out.ball = enumerate_ball(g, radius);
  DiscretenessVerdict& verdict = out.diagnostics.discreteness;
  if (out.ball.near_identity) {
    verdict.witness_found = true;
    verdict.witness = *out.ball.near_identity;
    verdict.reason = "nontrivial element within 1e-8 of the identity";
  } else {
    try {
      out.accumulation = accumulate(out.ball);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonDiscreteWitness) throw;
      // Locate the first offending element for the report.
      for (const GroupElement& el : out.ball.elements) {
        if (detail::classify_with_retry(el).kind == ElementKind::EllipticInfiniteOrSuspect) {
          verdict.witness = el.word();
          break;
        }
      }
      verdict.witness_found = true;
      verdict.reason = "elliptic element with no finite order up to 1000";
    }
  }

  if (auto v = detail::common_eigenvector(g, false)) {
    const ProjPoint p(*v);
    const bool fixed = std::all_of(g.generators().begin(), g.generators().end(),
                                   [&](const GroupElement& gen) {
                                     return chordal_dist(apply_point(gen, p), p) <= 1e-7;
                                   });
    if (fixed) out.diagnostics.global_fixed_point = p;
  }
  if (auto v = detail::common_eigenvector(g, true)) {
    const ProjLine l(*v);
    const bool invariant = std::all_of(g.generators().begin(), g.generators().end(),
                                       [&](const GroupElement& gen) {
                                         return chordal_dist(apply_line(gen, l), l) <= 1e-7;
                                       });
    if (invariant) out.diagnostics.invariant_line = l;
  }
  const auto& lines = out.accumulation.lines;
  out.diagnostics.gp3 = count_general_position(lines, 3);
  out.diagnostics.gp4 = out.diagnostics.gp3 && count_general_position(lines, 4);
  return out;
}

/// Union of the cyclic limit sets over the ball.
inline DualAccumulation c_gamma(const GroupPresentation& g, int radius) {
  const WordBall ball = enumerate_ball(g, radius);
  try {
    return accumulate(ball);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonDiscreteWitness) throw;
    for (const GroupElement& el : ball.elements) {
      if (detail::classify_with_retry(el).kind == ElementKind::EllipticInfiniteOrSuspect) {
        throw Error(ErrorCode::NonDiscreteWitness,
                    "elliptic element of infinite order: " + g.spell(el.word()));
      }
    }
    throw;
  }
}

inline GroupDiagnostics diagnostics(const GroupPresentation& g, int radius) {
  return analyze(g, radius).diagnostics;
}

inline KulkarniEstimate kulkarni_estimate_from(const GroupPresentation& g,
                                               const GroupAnalysis& a) {
  const DiscretenessVerdict& v = a.diagnostics.discreteness;
  if (v.witness_found) {
    throw Error(ErrorCode::NonDiscreteWitness, v.reason + ": " + g.spell(v.witness));
  }
  KulkarniEstimate out;
  out.radius = a.ball.radius;
  out.hypothesis_verified = a.diagnostics.gp3;
  const std::string r = std::to_string(out.radius);
  if (out.hypothesis_verified) {
    // With three lines in general position the limit set is exactly the
    // union of lines, so isolated points are dropped.
    out.limit.kind = LimitSetDesc::Kind::Lines;
    out.limit.lines = a.accumulation.lines;
    out.provenance =
        "hypothesis verified: three lines in general position at radius " + r +
        ", limit set equals the closure of the union of cyclic limit sets";
  } else {
    out.limit.lines = a.accumulation.lines;
    out.limit.isolated_points = a.accumulation.isolated_points;
    out.limit.kind = out.limit.lines.empty() && out.limit.isolated_points.empty()
                         ? LimitSetDesc::Kind::Empty
                         : LimitSetDesc::Kind::Lines;
    out.provenance = "lower bound only - hypothesis not verified at this radius (" + r + ")";
  }
  return out;
}

inline KulkarniEstimate kulkarni_estimate(const GroupPresentation& g, int radius) {
  return kulkarni_estimate_from(g, analyze(g, radius));
}

/// Fraction of accumulation lines that the orbit of l over the ball comes
/// within 1e-3 of.
inline double minimality_probe(const GroupPresentation& g, const ProjLine& l, int radius) {
  const WordBall ball = enumerate_ball(g, radius);
  const DualAccumulation acc = accumulate(ball);
  const bool member = std::any_of(acc.lines.begin(), acc.lines.end(), [&](const ProjLine& m) {
    return chordal_dist(l, m) <= acc.cluster_radius;
  });
  if (!member) {
    throw Error(ErrorCode::LineNotInAccumulation, "line is not an accumulation line");
  }
  std::vector<ProjLine> orbit(ball.elements.size());
  parallel_for(orbit.size(), [&](std::size_t i) { orbit[i] = apply_line(ball.elements[i], l); });
  std::size_t covered = 0;
  for (const ProjLine& m : acc.lines) {
    if (std::any_of(orbit.begin(), orbit.end(),
                    [&](const ProjLine& o) { return chordal_dist(o, m) <= 1e-3; })) {
      ++covered;
    }
  }
  return static_cast<double>(covered) / static_cast<double>(acc.lines.size());
}

struct AttractingLines {
  std::optional<ProjLine> forward;
  std::optional<ProjLine> backward;
  /// Some returned limit is a line of Λ(g) within 1e-7.
  bool hits_limit_set = false;
};

inline constexpr long long kDefaultProbeSteps = 1LL << 60;

namespace detail {

/// Limit of the row vectors l * P(n) along n = 2^k <= n_max, where P(n)
/// returns m^n for the element whose lift is m (the inverse of the element
/// acting on lines). Returns nullopt if the line is invariant (no sequence of
/// distinct lines), the representative collapses to zero, or the tail never
/// settles.
template <class Powers>
std::optional<ProjLine> dyadic_line_limit(Powers&& power, const ProjLine& l, long long n_max) {
  constexpr double kSettle = 1e-7;
  std::vector<ProjLine> samples;
  try {
    for (long long n = 1; n <= n_max; n *= 2) {
      samples.emplace_back(Vec3(power(n).transpose() * l.coords()));
      const std::size_t k = samples.size();
      if (k >= 3) {
        const bool settled = chordal_dist(samples[k - 1], samples[k - 2]) <= kSettle &&
                             chordal_dist(samples[k - 1], samples[k - 3]) <= kSettle &&
                             chordal_dist(samples[k - 2], samples[k - 3]) <= kSettle;
        if (settled) {
          if (k == 3 && chordal_dist(samples[0], l) <= kSettle) return std::nullopt;
          return samples.back();
        }
      }
      if (n > n_max / 2) break;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVector) throw;
  }
  return std::nullopt;
}

/// m^(2^k) by repeated squaring; must be called with n = 1, 2, 4, ...
class SquaringPowers {
 public:
  explicit SquaringPowers(const Mat3& m) : p_(projective_normalize(m)) {}
  Mat3 operator()(long long n) {
    if (n > 1) p_ = projective_normalize(p_ * p_);
    return p_;
  }

 private:
  Mat3 p_;
};

}  // namespace detail

/// Limits of g^n(l) and g^-n(l), sampled along the powers n = 2^k <= n_max.
inline AttractingLines attracting_line_probe(const GroupElement& g, const ProjLine& l,
                                             long long n_max = kDefaultProbeSteps) {
  if (n_max < 4) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 4");
  const ElementClass c = detail::classify_with_retry(g);
  if (is_elliptic(c.kind)) throw Error(ErrorCode::EllipticInput, "element is elliptic");
  const LimitSetDesc lambda = limit_set_from_class(c);
  auto in_lambda = [&](const ProjLine& m) {
    return std::any_of(lambda.lines.begin(), lambda.lines.end(),
                       [&](const ProjLine& x) { return chordal_dist(x, m) <= 1e-7; });
  };
  if (in_lambda(l)) throw Error(ErrorCode::InvalidArgument, "line lies in the limit set");
  AttractingLines out;
  // g(l) = l g^-1 as a row vector, so the forward orbit uses the inverse.
  if (is_defective(c.kind)) {
    const Complex zeta = c.eigenvalues[0], xi = c.eigenvalues[2];
    out.forward = detail::dyadic_line_limit(
        detail::DefectivePowers(adjugate(g.matrix()), c.kind, 1.0 / zeta, 1.0 / xi), l, n_max);
    out.backward =
        detail::dyadic_line_limit(detail::DefectivePowers(g.matrix(), c.kind, zeta, xi), l, n_max);
  } else {
    out.forward = detail::dyadic_line_limit(detail::SquaringPowers(adjugate(g.matrix())), l, n_max);
    out.backward = detail::dyadic_line_limit(detail::SquaringPowers(g.matrix()), l, n_max);
  }
  out.hits_limit_set = (out.forward && in_lambda(*out.forward)) ||
                       (out.backward && in_lambda(*out.backward));
  return out;
}

}  // namespace kleinian
