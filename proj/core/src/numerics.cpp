#include "affrec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace affrec {

QuadraticRoots solve_quadratic(double a, double b, double c, double eps) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw std::invalid_argument("solve_quadratic: non-finite coefficient");
  }
  QuadraticRoots out;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) {
    out.identically_degenerate = true;
    return out;
  }
  const double tol = eps * scale;

  if (std::abs(a) <= tol) {
    if (std::abs(b) <= tol) {
      out.identically_degenerate = true;
      return out;
    }
    out.degenerate_linear = true;
    out.roots[0] = static_cast<double>(-static_cast<long double>(c) / b);
    out.count = 1;
    return out;
  }

  const long double la = a, lb = b, lc = c;
  const long double disc = lb * lb - 4.0L * la * lc;
  if (disc < 0.0L) {
    return out;
  }
  const long double sq = std::sqrt(disc);
  const long double q = -(lb + std::copysign(sq, lb)) / 2.0L;
  if (disc == 0.0L) {
    out.roots[0] = static_cast<double>(q / la);
    out.count = 1;
    return out;
  }
  double r1 = static_cast<double>(q / la);
  double r2 = q != 0.0L ? static_cast<double>(lc / q) : 0.0;
  if (r1 > r2) std::swap(r1, r2);
  out.roots = {r1, r2};
  out.count = 2;
  return out;
}

LeastSquaresSolution least_squares(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs,
                                   double condition_cap) {
  if (m.rows() < m.cols()) {
    throw std::invalid_argument("least_squares: underdetermined system");
  }
  if (m.rows() != rhs.size()) {
    throw std::invalid_argument("least_squares: rhs size does not match matrix rows");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double sv_max = sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > sv_max / condition_cap) ++rank;
  }
  if (rank < m.cols()) {
    throw RankDeficientError("least_squares: rank-deficient system matrix", rank);
  }
  LeastSquaresSolution sol;
  sol.x = svd.solve(rhs);
  sol.residual_norm = (m * sol.x - rhs).norm();
  return sol;
}

Normalization hartley_normalize(std::span<const Eigen::Vector2d> points) {
  if (points.size() < 2) {
    throw std::invalid_argument("hartley_normalize: need at least 2 points");
  }
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  double rms = 0.0;
  for (const auto& p : points) rms += (p - centroid).squaredNorm();
  rms = std::sqrt(rms / static_cast<double>(points.size()));
  if (rms <= 0.0) {
    throw DegenerateInputError("hartley_normalize: all points identical");
  }
  const double s = std::sqrt(2.0) / rms;

  Normalization out;
  out.transform << s, 0, -s * centroid.x(), 0, s, -s * centroid.y(), 0, 0, 1;
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(s * (p - centroid));
  return out;
}

Eigen::Vector3d null_vector_3x3(const Eigen::Matrix3d& m, double rank_tol) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(2) > rank_tol * sv(0)) {
    throw FullRankError("null_vector_3x3: matrix is numerically full-rank", sv(2));
  }
  Eigen::Vector3d v = svd.matrixV().col(2);
  // fix the sign on the largest component for reproducibility
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0) v = -v;
  return v;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 round over the combined state
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace affrec
