#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace affrec {

inline constexpr const char* kVersion = "0.1.0";

// Relative tolerance used by the closed-form solvers to decide that a
// coefficient vanished. Applied relative to the largest coefficient magnitude.
inline constexpr double kDefaultEps = 1e-12;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by least_squares when the system matrix does not have full column rank.
class RankDeficientError : public NumericalError {
 public:
  RankDeficientError(const std::string& what, int estimated_rank)
      : NumericalError(what), estimated_rank(estimated_rank) {}
  int estimated_rank;
};

// Thrown by null_vector_3x3 when the matrix is numerically full-rank.
class FullRankError : public NumericalError {
 public:
  FullRankError(const std::string& what, double smallest_singular_value)
      : NumericalError(what), smallest_singular_value(smallest_singular_value) {}
  double smallest_singular_value;
};

// Thrown by the minimal solvers on degenerate samples (collinear points,
// rank-deficient design matrices, points at infinity, ...).
class DegenerateInputError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct QuadraticRoots {
  std::array<double, 2> roots{};  // ascending; only the first `count` entries are valid
  int count = 0;
  bool degenerate_linear = false;       // |a| vanished, single root of the linear part
  bool identically_degenerate = false;  // all coefficients vanished, nothing to solve
};

// Real roots of a*x^2 + b*x + c = 0. `eps` is relative to max(|a|,|b|,|c|).
// Uses the q = -(b + sign(b)*sqrt(disc))/2 form to avoid cancellation.
QuadraticRoots solve_quadratic(double a, double b, double c, double eps = kDefaultEps);

struct LeastSquaresSolution {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
};

// Minimizes ||m*x - rhs||_2 for m with full column rank (m rows >= cols).
// Throws RankDeficientError (carrying the estimated rank) otherwise;
// `condition_cap` bounds the accepted singular value ratio.
LeastSquaresSolution least_squares(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs,
                                   double condition_cap = 1e12);

struct Normalization {
  Eigen::Matrix3d transform;            // similarity mapping input to normalized points
  std::vector<Eigen::Vector2d> points;  // centroid at origin, RMS distance sqrt(2)
};

// Hartley point normalization. Requires at least two distinct points.
Normalization hartley_normalize(std::span<const Eigen::Vector2d> points);

// Unit-norm v with m*v ~= 0 for a numerically rank<=2 matrix.
// Throws FullRankError (carrying the smallest singular value) for full-rank input.
Eigen::Vector3d null_vector_3x3(const Eigen::Matrix3d& m, double rank_tol = 1e-8);

// Deterministic RNG contract: every stochastic operation takes an explicit
// 64-bit seed and derives independent streams through derive_seed.
using Rng = std::mt19937_64;

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace affrec
