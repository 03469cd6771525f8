#pragma once

// Shared numeric types, error reporting and small helpers used by every
// kleinian module.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace kleinian {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3cd;

enum class ErrorCode {
  ZeroVector,
  CoincidentPoints,
  CoincidentLines,
  NotInvertible,
  Ambiguous,
  NotElliptic,
  NonDiscreteWitness,
  UnsupportedShape,
  ZeroMatrix,
  InKernel,
  EmptySequence,
  ImagePointOnLine,
  FullRankMember,
  BallTooLarge,
  LineNotInAccumulation,
  EllipticInput,
  InvalidArgument,
  Parse,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::CoincidentLines: return "CoincidentLines";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::NonDiscreteWitness: return "NonDiscreteWitness";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::InKernel: return "InKernel";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::ImagePointOnLine: return "ImagePointOnLine";
    case ErrorCode::FullRankMember: return "FullRankMember";
    case ErrorCode::BallTooLarge: return "BallTooLarge";
    case ErrorCode::LineNotInAccumulation: return "LineNotInAccumulation";
    case ErrorCode::EllipticInput: return "EllipticInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Signed 1-based generator indices; -k denotes the inverse of generator k.
using Word = std::vector<int>;

inline Word inverse_word(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& letter : out) letter = -letter;
  return out;
}

namespace tol {
inline constexpr double kUnitNorm = 1e-12;
inline constexpr double kZeroVector = 1e-300;
inline constexpr double kCoincidence = 1e-9;
inline constexpr double kIncidence = 1e-10;
inline constexpr double kDeterminant = 1e-10;
inline constexpr double kGeneralPosition = 1e-9;
inline constexpr double kFixedResidual = 1e-7;
inline constexpr double kClassify = 1e-7;
inline constexpr double kIdentity = 1e-8;
inline constexpr double kRank = 1e-9;
// Relative slack for "largest modulus" comparisons so that entries equal
// up to rounding resolve to the lowest index.
inline constexpr double kTie = 1e-9;
}  // namespace tol

inline const Complex kOmega{-0.5, std::numbers::sqrt3 / 2.0};

inline Complex cube_root_of_unity(int k) {
  switch (((k % 3) + 3) % 3) {
    case 0: return {1.0, 0.0};
    case 1: return kOmega;
    default: return std::conj(kOmega);
  }
}

/// max |m_ij|
inline double sup_norm(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

/// Index of the largest-modulus coordinate; near-ties go to the lowest index.
inline int dominant_index(const Vec3& v) {
  double best = 0.0;
  for (int i = 0; i < 3; ++i) best = std::max(best, std::abs(v[i]));
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) >= best * (1.0 - tol::kTie)) return i;
  }
  return 0;
}

/// Row-major index of the largest-modulus entry; near-ties go to the lowest.
inline int dominant_entry(const Mat3& m) {
  const double best = sup_norm(m);
  for (int k = 0; k < 9; ++k) {
    if (std::abs(m(k / 3, k % 3)) >= best * (1.0 - tol::kTie)) return k;
  }
  return 0;
}

/// Sup-norm normalized, with the dominant entry rotated onto the positive
/// real axis. Canonical representative of the class of m in (M3 \ 0)/C*.
inline Mat3 projective_normalize(const Mat3& m) {
  const double s = sup_norm(m);
  if (!(s > 0.0)) throw Error(ErrorCode::ZeroMatrix, "zero matrix");
  const int k = dominant_entry(m);
  const Complex e = m(k / 3, k % 3);
  return m * (std::abs(e) / e) / s;
}

/// Classical adjoint; adj(m) * m = det(m) I.
inline Mat3 adjugate(const Mat3& m) {
  Mat3 a;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      a(i, j) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    }
  }
  return a;
}

/// Bilinear cross product (no conjugation): (a x b) . a = 0.
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return Vec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
              a[0] * b[1] - a[1] * b[0]);
}

/// Bilinear dot product sum a_i b_i.
inline Complex bilinear_dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// Number of worker threads: KLEINIAN_THREADS if set and positive,
/// otherwise the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("KLEINIAN_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) over contiguous chunks. fn must only write to
/// slots owned by index i, so the result is independent of scheduling. If
/// any call throws, the exception raised at the lowest index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n / 64));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([begin, end, w, &fn, &failures] {
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace kleinian
