#pragma once

// Numerical Jordan-type classification of elements of PSL(3,C).
//
// Multiplicities are read off the characteristic polynomial
//   p(x) = x^3 - t x^2 + s x - 1,   t = tr g,  s = tr adj g,
// rather than from clustered eigenvalues: a defective eigenvalue of
// multiplicity m is only resolved to eps^(1/m) by an eigensolver, while t
// and s keep full precision. Diagonalizability comes from the numerical
// rank of (g - mu I).
//
// Each decision compares a residual against max(tol, kNoiseFactor * noise),
// where noise is a first-order bound on what rounding the entries of g alone
// can do to that residual. For badly conditioned conjugates the rounding of
// the stored matrix moves t and s by far more than tol, and only the noise
// term keeps repeated roots recognizable. Values within a factor two of the
// threshold raise Ambiguous.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kleinian/projective.hpp"

namespace kleinian {

enum class ElementKind {
  EllipticFinite,
  EllipticInfiniteOrSuspect,
  ParabolicUnipotentRank1,
  ParabolicUnipotentRank2,
  ParabolicEllipto,
  ComplexHomothety,
  Screw,
  Loxoparabolic,
  StronglyLoxodromic,
};

inline const char* to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::EllipticFinite: return "EllipticFinite";
    case ElementKind::EllipticInfiniteOrSuspect:
      return "EllipticInfiniteOrSuspect";
    case ElementKind::ParabolicUnipotentRank1: return "ParabolicUnipotentRank1";
    case ElementKind::ParabolicUnipotentRank2: return "ParabolicUnipotentRank2";
    case ElementKind::ParabolicEllipto: return "ParabolicEllipto";
    case ElementKind::ComplexHomothety: return "ComplexHomothety";
    case ElementKind::Screw: return "Screw";
    case ElementKind::Loxoparabolic: return "Loxoparabolic";
    case ElementKind::StronglyLoxodromic: return "StronglyLoxodromic";
  }
  return "Unknown";
}

inline bool is_elliptic(ElementKind k) {
  return k == ElementKind::EllipticFinite ||
         k == ElementKind::EllipticInfiniteOrSuspect;
}

inline bool is_parabolic(ElementKind k) {
  return k == ElementKind::ParabolicUnipotentRank1 ||
         k == ElementKind::ParabolicUnipotentRank2 ||
         k == ElementKind::ParabolicEllipto;
}

/// One distinct eigenvalue with bases of its eigenvectors (points) and of
/// the eigenvectors of the transpose (invariant lines).
struct Eigenspace {
  Complex value;
  int algebraic_multiplicity = 1;
  std::vector<ProjPoint> points;
  std::vector<ProjLine> lines;
};

struct ElementClass {
  ElementKind kind = ElementKind::EllipticFinite;
  std::optional<int> order;
  /// Ascending modulus, then ascending phase.
  std::array<Complex, 3> eigenvalues;
  std::vector<Eigenspace> eigenspaces;
  std::vector<ProjPoint> fixed_points;
  std::vector<ProjLine> invariant_lines;
};

inline constexpr int kDefaultMaxOrder = 1000;

namespace detail {

enum class Side { Below, Above };

inline Side decide(double value, double tolerance, const char* what) {
  if (value <= 0.5 * tolerance) return Side::Below;
  if (value >= 2.0 * tolerance) return Side::Above;
  throw Error(ErrorCode::Ambiguous,
              std::string(what) + " falls in the classification dead band");
}

inline constexpr double kNoiseFactor = 1e4;

inline Side decide(double value, double tolerance, double noise,
                   const char* what) {
  return decide(value, std::max(tolerance, kNoiseFactor * noise), what);
}

/// Componentwise first-order bounds on the change of tr g, tr adj g and
/// det g when every entry of g moves by one rounding unit.
struct PolyNoise {
  double t = 0.0, s = 0.0, d = 0.0;
};

inline PolyNoise char_poly_noise(const Mat3& g) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const Mat3 a = adjugate(g);
  const Mat3 shifted = g.trace() * Mat3::Identity() - g;
  PolyNoise n;
  for (int r = 0; r < 3; ++r) {
    n.t += std::abs(g(r, r));
    for (int c = 0; c < 3; ++c) {
      n.s += std::abs(shifted(c, r)) * std::abs(g(r, c));
      n.d += std::abs(a(c, r)) * std::abs(g(r, c));
    }
  }
  n.t *= eps;
  n.s *= eps;
  n.d *= eps;
  return n;
}

/// Rounding sensitivity of a simple eigenvalue: its condition number
/// 1/|y^H x| times the size of an entrywise rounding perturbation.
inline double eigenvalue_noise(const Mat3& g, Complex lambda) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  Eigen::JacobiSVD<Mat3> svd(g - lambda * Mat3::Identity(),
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double overlap = std::abs(svd.matrixU().col(2).dot(svd.matrixV().col(2)));
  const double cond = 1.0 / std::max(overlap, eps);
  return cond * eps * g.norm();
}

inline Eigen::Vector3d singular_values(const Mat3& m) {
  return Eigen::JacobiSVD<Mat3>(m).singularValues();
}

/// Canonical orthonormal-ish basis of a subspace given by orthonormal
/// columns: project coordinate vectors in order of decreasing projected
/// norm. Depends only on the subspace, not on the columns chosen.
inline std::vector<Vec3> canonical_basis(const Eigen::MatrixXcd& q) {
  std::vector<Vec3> out;
  const int k = static_cast<int>(q.cols());
  if (k >= 3) {
    for (int i = 0; i < 3; ++i) out.push_back(Vec3::Unit(i));
    return out;
  }
  Mat3 proj = q * q.adjoint();
  for (int step = 0; step < k; ++step) {
    Eigen::Vector3d norms;
    for (int j = 0; j < 3; ++j) norms[j] = proj.col(j).norm();
    const double best = norms.maxCoeff();
    int pick = 0;
    for (int j = 0; j < 3; ++j) {
      if (norms[j] >= best * (1.0 - 1e-9)) {
        pick = j;
        break;
      }
    }
    Vec3 b = proj.col(pick).normalized();
    out.push_back(b);
    proj -= b * b.adjoint();
  }
  return out;
}

/// Orthonormal basis (as columns) of the dim-dimensional space of smallest
/// right singular vectors of a.
inline Eigen::MatrixXcd null_space(const Mat3& a, int dim) {
  Eigen::JacobiSVD<Mat3> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(dim);
}

/// Smallest n <= max_order with g^n within tol::kIdentity of the identity
/// class, for a diagonalizable g with eigenvalues ev. g^n is scalar exactly
/// when the powers ev_i^n agree, so the distance is their spread
/// max |ev_i^n - ev_j^n|. Repeated matrix products would amplify rounding
/// by the cube of the eigenvector condition number instead, and the common
/// phase drift left by an inexact determinant does not enter the spread.
inline std::optional<int> probe_order(const std::array<Complex, 3>& ev,
                                      double noise, int max_order) {
  constexpr double kProbeNoiseFactor = 100.0;
  std::array<Complex, 3> p{1.0, 1.0, 1.0};
  for (int n = 1; n <= max_order; ++n) {
    for (int i = 0; i < 3; ++i) p[i] *= ev[i];
    const double spread = std::max({std::abs(p[0] - p[1]), std::abs(p[0] - p[2]),
                                    std::abs(p[1] - p[2])});
    if (spread < std::max(tol::kIdentity, kProbeNoiseFactor * n * noise)) return n;
  }
  return std::nullopt;
}

inline void sort_eigenvalues(std::array<Complex, 3>& ev, double tolerance) {
  auto less = [tolerance](Complex a, Complex b) {
    const double la = std::log(std::abs(a)), lb = std::log(std::abs(b));
    if (std::abs(la - lb) > tolerance) return la < lb;
    return std::arg(a) < std::arg(b);
  };
  for (int i = 1; i < 3; ++i) {
    for (int j = i; j > 0 && less(ev[j], ev[j - 1]); --j) {
      std::swap(ev[j], ev[j - 1]);
    }
  }
}

inline Eigenspace make_eigenspace(const Mat3& g, Complex mu, int algebraic,
                                  int geometric) {
  Eigenspace e;
  e.value = mu;
  e.algebraic_multiplicity = algebraic;
  const Mat3 shifted = g - mu * Mat3::Identity();
  for (const Vec3& v : canonical_basis(null_space(shifted, geometric))) {
    e.points.emplace_back(v);
  }
  for (const Vec3& v :
       canonical_basis(null_space(shifted.transpose(), geometric))) {
    e.lines.emplace_back(v);
  }
  return e;
}

/// Numerical rank of g - mu I relative to the scale of g.
inline int shifted_rank(const Mat3& g, Complex mu, double scale,
                        double tolerance) {
  const Eigen::Vector3d sv = singular_values(g - mu * Mat3::Identity());
  int rank = 0;
  for (int i = 0; i < 3; ++i) {
    if (decide(sv[i] / scale, tolerance, "singular value of g - mu I") ==
        Side::Above) {
      ++rank;
    }
  }
  return rank;
}

}  // namespace detail

/// Classifies g as elliptic, parabolic (three Jordan types) or loxodromic
/// (four types). Elliptic elements are probed for finite order up to
/// max_order; if none is found the kind is EllipticInfiniteOrSuspect.
inline ElementClass classify(const GroupElement& g,
                             double tolerance = tol::kClassify,
                             int max_order = kDefaultMaxOrder) {
  using detail::decide;
  using detail::Side;
  if (!(tolerance > 0.0 && tolerance <= 1e-3)) {
    throw Error(ErrorCode::InvalidArgument, "tol must lie in (0, 1e-3]");
  }
  const Mat3& m = g.matrix();
  if (std::abs(m.determinant()) < tolerance) {
    throw Error(ErrorCode::NotInvertible, "matrix is not invertible");
  }
  const double scale = detail::singular_values(m)[0];
  const Complex t = m.trace();
  const Complex s = adjugate(m).trace();

  Eigen::ComplexEigenSolver<Mat3> solver(m, false);
  std::array<Complex, 3> raw{solver.eigenvalues()[0], solver.eigenvalues()[1],
                             solver.eigenvalues()[2]};
  double big = 0.0;
  for (Complex z : raw) big = std::max(big, std::abs(z));

  ElementClass out;
  double eigen_noise = 0.0;

  const detail::PolyNoise pn = detail::char_poly_noise(m);
  // Undoing the det-one rescaling feeds the determinant noise into t and s.
  const double noise_t = pn.t + std::abs(t) * pn.d / 3.0;
  const double noise_s = pn.s + 2.0 * std::abs(s) * pn.d / 3.0;

  // (x - w)^3 with w a cube root of unity, from t = 3w and s = 3w^2.
  double triple_residual = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const Complex w = cube_root_of_unity(k);
    triple_residual = std::min(
        triple_residual,
        std::max(std::abs(t - 3.0 * w), std::abs(s - 3.0 * w * w)) / 3.0);
  }

  // Solver eigenvalues separated far beyond their own rounding sensitivity
  // are simple, whatever the characteristic-polynomial bounds say; those
  // bounds grow with the cube of the norm of g and swamp the test for
  // long words.
  std::array<double, 3> raw_noise;
  for (int i = 0; i < 3; ++i) raw_noise[i] = detail::eigenvalue_noise(m, raw[i]);
  bool separated = true;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double gap = std::abs(raw[i] - raw[j]);
      const double size = std::max(std::abs(raw[i]), std::abs(raw[j]));
      separated = separated &&
                  gap > detail::kNoiseFactor * (raw_noise[i] + raw_noise[j]) &&
                  gap > 2.0 * tolerance * size;
    }
  }

  if (!separated &&
      decide(triple_residual, tolerance, std::max(noise_t, noise_s) / 3.0,
             "triple-root residual") == Side::Below) {
    // t/3 rather than the exact root: it carries the same common scale as
    // the entries of m when det m is only 1 up to rounding.
    const Complex mu = t / 3.0;
    const int rank = detail::shifted_rank(m, mu, scale, tolerance);
    if (rank == 3) {
      throw Error(ErrorCode::Ambiguous, "triple root with no eigenvector");
    }
    out.eigenvalues = {mu, mu, mu};
    eigen_noise = std::max(noise_t, noise_s);
    out.eigenspaces.push_back(detail::make_eigenspace(m, mu, 3, 3 - rank));
    if (rank == 0) {
      out.kind = ElementKind::EllipticFinite;
    } else {
      out.kind = rank == 1 ? ElementKind::ParabolicUnipotentRank1
                           : ElementKind::ParabolicUnipotentRank2;
    }
  } else {
    bool double_root = false;
    if (!separated) {
      const Complex disc = t * t * s * s - 4.0 * s * s * s - 4.0 * t * t * t +
                           18.0 * t * s - 27.0;
      const double disc_noise =
          std::abs(2.0 * t * s * s - 12.0 * t * t + 18.0 * s) * noise_t +
          std::abs(2.0 * t * t * s - 12.0 * s * s + 18.0 * t) * noise_s;
      const double norm6 = std::pow(big, 6);
      double_root = decide(std::abs(disc) / norm6, tolerance, disc_noise / norm6,
                           "discriminant") == Side::Below;
    }
    if (double_root) {
      // The simple eigenvalue is the solver output farthest from the others.
      int lone = 0;
      double spread = -1.0;
      for (int i = 0; i < 3; ++i) {
        const double d = std::min(std::abs(raw[i] - raw[(i + 1) % 3]),
                                  std::abs(raw[i] - raw[(i + 2) % 3]));
        if (d > spread) {
          spread = d;
          lone = i;
        }
      }
      const Complex nu = raw[lone];
      // A defective pair is split by the solver to sqrt of the rounding
      // level, but its mean (t - nu)/2 stays accurate.
      const Complex mu = 0.5 * (t - nu);
      const int rank = detail::shifted_rank(m, mu, scale, tolerance);
      if (rank == 3) {
        throw Error(ErrorCode::Ambiguous, "double root with no eigenvector");
      }
      const bool diagonalizable = rank <= 1;
      out.eigenvalues = {mu, mu, nu};
      out.eigenspaces.push_back(
          detail::make_eigenspace(m, mu, 2, diagonalizable ? 2 : 1));
      out.eigenspaces.push_back(detail::make_eigenspace(m, nu, 1, 1));
      const double nu_noise = detail::eigenvalue_noise(m, nu) / std::abs(nu);
      eigen_noise = nu_noise;
      const bool unit_moduli =
          decide(std::abs(std::log(std::abs(mu))), tolerance, 0.5 * nu_noise,
                 "eigenvalue modulus") == Side::Below;
      if (unit_moduli) {
        out.kind = diagonalizable ? ElementKind::EllipticFinite
                                  : ElementKind::ParabolicEllipto;
      } else {
        out.kind = diagonalizable ? ElementKind::ComplexHomothety
                                  : ElementKind::Loxoparabolic;
      }
    } else {
      out.eigenvalues = raw;
      detail::sort_eigenvalues(out.eigenvalues, tolerance);
      std::array<double, 3> logs, noise;
      for (int i = 0; i < 3; ++i) {
        logs[i] = std::log(std::abs(out.eigenvalues[i]));
        noise[i] = detail::eigenvalue_noise(m, out.eigenvalues[i]) /
                   std::abs(out.eigenvalues[i]);
      }
      eigen_noise = std::max({noise[0], noise[1], noise[2]});
      int unit = 0;
      for (int i = 0; i < 3; ++i) {
        if (decide(std::abs(logs[i]), tolerance, noise[i], "eigenvalue modulus") ==
            Side::Below) {
          ++unit;
        }
      }
      int equal_pairs = 0;
      for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
          if (decide(std::abs(logs[i] - logs[j]), tolerance, noise[i] + noise[j],
                     "eigenvalue modulus gap") == Side::Below) {
            ++equal_pairs;
          }
        }
      }
      if (unit == 3) {
        out.kind = ElementKind::EllipticFinite;
      } else if (equal_pairs > 0) {
        out.kind = ElementKind::Screw;
      } else {
        out.kind = ElementKind::StronglyLoxodromic;
      }
      for (Complex z : out.eigenvalues) {
        out.eigenspaces.push_back(detail::make_eigenspace(m, z, 1, 1));
      }
    }
  }

  if (out.kind == ElementKind::EllipticFinite) {
    out.order = detail::probe_order(out.eigenvalues, eigen_noise, max_order);
    if (!out.order) out.kind = ElementKind::EllipticInfiniteOrSuspect;
  }

  for (const Eigenspace& e : out.eigenspaces) {
    out.fixed_points.insert(out.fixed_points.end(), e.points.begin(),
                            e.points.end());
    out.invariant_lines.insert(out.invariant_lines.end(), e.lines.begin(),
                               e.lines.end());
  }
  return out;
}

/// Order of an elliptic element, or nullopt if no n <= max_order brings g^n
/// within tol::kIdentity of the identity class.
inline std::optional<int> order_if_finite(const GroupElement& g,
                                          int max_order = kDefaultMaxOrder) {
  if (max_order < 1 || max_order > 10000) {
    throw Error(ErrorCode::InvalidArgument, "max_order must lie in [1, 1e4]");
  }
  const ElementClass c = classify(g, tol::kClassify, max_order);
  if (!is_elliptic(c.kind)) {
    throw Error(ErrorCode::NotElliptic, "element is not elliptic");
  }
  return c.order;
}

struct EigenFrame {
  std::vector<ProjPoint> fixed_points;
  std::vector<ProjLine> invariant_lines;
};

/// Projectivized eigenvectors of g and of its transpose. Defective
/// eigenvalues contribute fewer than three of each.
inline EigenFrame eigen_frame(const GroupElement& g) {
  try {
    const ElementClass c = classify(g, tol::kClassify, 1);
    return {c.fixed_points, c.invariant_lines};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Ambiguous) throw;
  }
  // Near a case boundary: one eigenvector per solver eigenvalue.
  EigenFrame frame;
  Eigen::ComplexEigenSolver<Mat3> solver(g.matrix(), false);
  for (int i = 0; i < 3; ++i) {
    const Eigenspace e =
        detail::make_eigenspace(g.matrix(), solver.eigenvalues()[i], 1, 1);
    frame.fixed_points.push_back(e.points.front());
    frame.invariant_lines.push_back(e.lines.front());
  }
  return frame;
}

/// Kinds whose lift is not diagonalizable.
inline bool is_defective(ElementKind k) {
  return k == ElementKind::ParabolicUnipotentRank1 || k == ElementKind::ParabolicUnipotentRank2 ||
         k == ElementKind::ParabolicEllipto || k == ElementKind::Loxoparabolic;
}

namespace detail {

inline ElementClass classify_with_retry(const GroupElement& g) {
  constexpr std::array<double, 3> ladder{tol::kClassify, 1e-6, 1e-5};
  for (std::size_t i = 0;; ++i) {
    try {
      return classify(g, ladder[i]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Ambiguous || i + 1 == ladder.size()) throw;
    }
  }
}

/// Closed-form powers of a non-diagonalizable element from its Jordan data.
/// Repeated squaring would amplify the rounding in the nilpotent part: N^2
/// is zero in exact arithmetic but of size eps * n^2 after n steps.
class DefectivePowers {
 public:
  /// m has the double or triple eigenvalue zeta; xi is the simple one (unused
  /// for unipotent kinds).
  DefectivePowers(const Mat3& m, ElementKind kind, Complex zeta, Complex xi)
      : zeta_(zeta), ratio_(xi / zeta) {
    const Mat3 shifted = m - zeta * Mat3::Identity();
    if (kind == ElementKind::ParabolicEllipto || kind == ElementKind::Loxoparabolic) {
      p2_ = shifted * shifted / ((xi - zeta) * (xi - zeta));
      p1_ = Mat3::Identity() - p2_;
      nil_ = shifted * p1_;
      nil2_ = Mat3::Zero();
    } else {
      p1_ = Mat3::Identity();
      p2_ = Mat3::Zero();
      nil_ = shifted;
      nil2_ = kind == ElementKind::ParabolicUnipotentRank2 ? Mat3(nil_ * nil_) : Mat3::Zero();
    }
  }

  /// m^n up to a scalar, normalized. The scalar is zeta^n or xi^n,
  /// whichever is larger, so nothing overflows.
  Mat3 operator()(double x) const {
    const double growth = x * std::log(std::abs(ratio_));
    const Complex phase = std::polar(1.0, x * std::arg(ratio_));
    const Mat3 block =
        p1_ + (x / zeta_) * nil_ + (0.5 * x * (x - 1.0) / (zeta_ * zeta_)) * nil2_;
    if (growth <= 0.0) return projective_normalize(Mat3(block + std::exp(growth) * phase * p2_));
    const double damp = std::exp(-growth);
    Mat3 out = p2_;
    if (damp * x > 0.0) out += (damp / phase) * block;
    return projective_normalize(out);
  }

 private:
  Complex zeta_, ratio_;
  Mat3 p1_, p2_, nil_, nil2_;
};

}  // namespace detail

}  // namespace kleinian
