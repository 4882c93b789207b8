#pragma once

#include <Eigen/Dense>

#include <span>

#include "affrec/affine.hpp"
#include "affrec/epipolar.hpp"

namespace affrec {

// 3x3 projective mapping with a fixed gauge: unit Frobenius norm and the
// first nonzero entry positive. Comparisons should still tolerate global sign.
class Homography {
 public:
  explicit Homography(const Eigen::Matrix3d& m);

  const Eigen::Matrix3d& matrix() const { return h_; }
  double operator()(int row, int col) const { return h_(row, col); }

  // 1-based row-major element access, i in [1, 9].
  double h(int i) const { return h_((i - 1) / 3, (i - 1) % 3); }

 private:
  Eigen::Matrix3d h_;
};

struct HafSystem {
  Eigen::Matrix<double, 6, 3> c;
  Eigen::Matrix<double, 6, 1> b;
};

// The 6x3 inhomogeneous system C x = b with x = (h7, h8, h9) for the
// homography-from-one-affine-correspondence solver; exposed for transcription
// cross-checks.
HafSystem haf_system(const FundamentalMatrix& f, const AffineCorrespondence& ac);

// Homography from a single affine correspondence and a known fundamental
// matrix: least-squares solve for the last row, back-substitution for the
// rest. Requires a finite second epipole.
Homography haf_from_ac(const FundamentalMatrix& f, const AffineCorrespondence& ac);

// Normalized DLT for n >= 4 point pairs.
Homography h_dlt(std::span<const PointPair> corrs);

// Normalized DLT restricted to a minimal sample of exactly 4 pairs.
Homography h_4pt(std::span<const PointPair> corrs);

// F-compatible least squares H = [e']x F + e' v^T over n >= 3 pairs.
Homography h_fcompat_ls(const FundamentalMatrix& f, std::span<const PointPair> corrs);

// Minimal F-compatible solver on exactly 3 pairs.
Homography h_3pt(const FundamentalMatrix& f, std::span<const PointPair> corrs);

// Distance in image 2 between h*p1 and p2. Points mapped to infinity return
// +inf and set *at_infinity.
double reprojection_error(const Homography& h, const PointPair& corr,
                          bool* at_infinity = nullptr);

// Average of the forward and backward transfer distances; not used by the
// experiment harness, provided behind its own name.
double symmetric_reprojection_error(const Homography& h, const PointPair& corr,
                                    bool* at_infinity = nullptr);

}  // namespace affrec
