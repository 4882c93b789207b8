#pragma once

#include <vector>

#include "affrec/affine.hpp"
#include "affrec/epipolar.hpp"

namespace affrec {

// Constants of the linear system relating the affine components to the
// epipolar geometry at one correspondence. The coefficient the source
// material calls H is named p_c here to avoid colliding with the homography
// symbol.
struct RecoveryCoefficients {
  double b_c = 0.0;  // u1 f1 + v1 f2 + f3
  double c_c = 0.0;  // u1 f4 + v1 f5 + f6
  double d_c = 0.0;  // -u2 f1 - v2 f4 - f7
  double e_c = 0.0;  // -u2 f2 - v2 f5 - f8
  double g_c = 0.0;  // q_u coefficient of the first equation
  double p_c = 0.0;  // q_v coefficient of the first equation
  double i_c = 0.0;  // w coefficient of the first equation
  double j_c = 0.0;  // q_u coefficient of the second equation, equals -i_c
  double k_c = 0.0;  // q_v coefficient of the second equation
};

enum class RecoveryDegeneracy {
  kNone,
  kShearUnobservable,       // shear direction unconstrained; w reported as 0
  kNoRealRoot,              // the scale polynomial has no admissible real root
  kCoefficientsDegenerate,  // all coefficient magnitudes vanished
};

const char* to_string(RecoveryDegeneracy d);

struct RecoveryCandidate {
  AffineCorrespondence ac;
  AffineComponents components;
};

struct RecoveryResult {
  std::vector<RecoveryCandidate> candidates;  // at most 2, most isotropic first
  RecoveryDegeneracy degeneracy = RecoveryDegeneracy::kNone;
};

RecoveryCoefficients recovery_coefficients(const FundamentalMatrix& f,
                                           const SiftCorrespondence& corr);

// Closed-form recovery of the local affine transformation from the feature
// scales/orientations and a known fundamental matrix.
RecoveryResult recover_affine(const FundamentalMatrix& f, const SiftCorrespondence& corr);

// Drops candidates with extreme anisotropy (q_u/q_v outside
// [1/max_scale, max_scale]) or extreme shear (|w|/sqrt(|q_u q_v|) > max_shear).
RecoveryResult filter_candidates(const RecoveryResult& r, double max_scale = 10.0,
                                 double max_shear = 5.0);

}  // namespace affrec
