#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "affrec/numerics.hpp"

namespace affrec {

struct AffineCorrespondence;  // affine.hpp

struct PointPair {
  Eigen::Vector2d p1;
  Eigen::Vector2d p2;
};

struct Epipole {
  double u = 0.0;
  double v = 0.0;
  bool at_infinity = false;
};

// Rank-2 epipolar constraint matrix, p2^T F p1 = 0, stored row-major so that
// element f_i (1-based) matches the usual f1..f9 naming. Construction enforces
// rank 2 and unit Frobenius norm.
class FundamentalMatrix {
 public:
  explicit FundamentalMatrix(const Eigen::Matrix3d& m);

  static FundamentalMatrix from_row_major(const std::array<double, 9>& f);

  const Eigen::Matrix3d& matrix() const { return f_; }
  double operator()(int row, int col) const { return f_(row, col); }

  // 1-based row-major element access, i in [1, 9].
  double f(int i) const { return f_((i - 1) / 3, (i - 1) % 3); }

  Epipole epipole_first() const;   // F e = 0
  Epipole epipole_second() const;  // F^T e' = 0
  Eigen::Vector3d epipole_first_homogeneous() const;
  Eigen::Vector3d epipole_second_homogeneous() const;

 private:
  Eigen::Matrix3d f_;
};

struct EpipolarNormals {
  Eigen::Vector2d n1;  // (F^T p2)_(1:2), epipolar line normal in image 1
  Eigen::Vector2d n2;  // (F p1)_(1:2), epipolar line normal in image 2
};

EpipolarNormals epipolar_normals(const FundamentalMatrix& f, const Eigen::Vector2d& p1,
                                 const Eigen::Vector2d& p2);

// ||A^{-T} n1 + n2|| / max(||n1||, ||n2||, 1); zero iff the affine
// correspondence is exactly consistent with F. Throws on singular A.
double af_consistency_residual(const FundamentalMatrix& f, const AffineCorrespondence& ac);

// First-order geometric residual of the epipolar constraint, in pixels.
// If all four partial derivatives vanish the algebraic residual is returned
// and *degenerate is set.
double sampson_distance(const FundamentalMatrix& f, const Eigen::Vector2d& p1,
                        const Eigen::Vector2d& p2, bool* degenerate = nullptr);

// Normalized eight-point algorithm, n >= 8. Throws DegenerateInputError when
// the design matrix has rank < 8 (e.g. all points on one plane).
FundamentalMatrix estimate_f_8pt(std::span<const PointPair> corrs);

// Seven-point minimal solver, exactly 7 pairs, 1-3 candidates.
std::vector<FundamentalMatrix> estimate_f_7pt(std::span<const PointPair> corrs);

}  // namespace affrec
