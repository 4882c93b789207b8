#pragma once

#include <Eigen/Dense>

#include <vector>

#include "affrec/numerics.hpp"

namespace affrec {

class Homography;  // homography.hpp

// wraps an angle to [0, 2*pi)
double wrap_angle(double radians);

// counter-clockwise 2D rotation, R = ((cos, -sin), (sin, cos))
Eigen::Matrix2d rotation2d(double radians);

struct SiftFeature {
  double u = 0.0;           // px
  double v = 0.0;           // px
  double scale = 1.0;       // q_i, strictly positive
  double orientation = 0.0; // alpha_i, radians in [0, 2*pi)

  Eigen::Vector2d position() const { return {u, v}; }
};

struct SiftCorrespondence {
  SiftFeature first;
  SiftFeature second;

  Eigen::Vector2d p1() const { return first.position(); }
  Eigen::Vector2d p2() const { return second.position(); }
  // q = q2 / q1
  double relative_scale() const { return second.scale / first.scale; }
};

// Parameters of A = R_{alpha2} * U(q_u, w, q_v) * R_{-alpha1}.
struct AffineComponents {
  double alpha1 = 0.0;  // radians
  double alpha2 = 0.0;  // radians
  double q_u = 1.0;     // scale along x
  double q_v = 1.0;     // scale along y
  double w = 0.0;       // shear
};

struct AffineCorrespondence {
  Eigen::Vector2d p1;
  Eigen::Vector2d p2;
  Eigen::Matrix2d a;  // (a1 a2; a3 a4), local affine transformation
};

// One solution of A = R_gamma * U * R_delta for a fixed gamma.
struct Decomposition {
  double gamma = 0.0;
  double delta = 0.0;
  double q_u = 1.0;
  double q_v = 1.0;
  double w = 0.0;
  double residual = 0.0;  // spectral norm of A - R_gamma U R_delta
};

// A = R_{alpha2} * U * R_{-alpha1}, evaluated as an explicit matrix product.
Eigen::Matrix2d compose_affine(const AffineComponents& c);

// Projects p1 through h and returns the correspondence together with the
// first-order approximation of the mapping (the Jacobian of the projective
// map at p1). Throws DegenerateInputError when the projective depth vanishes.
AffineCorrespondence affine_from_homography(const Homography& h, const Eigen::Vector2d& p1);

// Both decompositions for the fixed gamma (delta and delta+pi), best first;
// positive q_v is preferred when residuals tie. Throws on singular input.
std::vector<Decomposition> decompose_affine(const Eigen::Matrix2d& a, double gamma);

// Simulates a scale- and orientation-invariant detector output from a full
// affine correspondence: alpha2 = beta, alpha1 from the decomposition, scale
// of image 1 fixed to 1 so that q2/q1 = det(A).
SiftCorrespondence simulate_sift_from_affine(const AffineCorrespondence& ac, double beta);

}  // namespace affrec
