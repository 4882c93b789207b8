#include "affrec/affine.hpp"

#include <algorithm>
#include <cmath>

#include "affrec/homography.hpp"

namespace affrec {

double wrap_angle(double radians) {
  const double two_pi = 2.0 * M_PI;
  double a = std::fmod(radians, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  return a;
}

Eigen::Matrix2d rotation2d(double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Matrix2d compose_affine(const AffineComponents& c) {
  Eigen::Matrix2d u;
  u << c.q_u, c.w, 0.0, c.q_v;
  return rotation2d(c.alpha2) * u * rotation2d(-c.alpha1);
}

AffineCorrespondence affine_from_homography(const Homography& h, const Eigen::Vector2d& p1) {
  const Eigen::Matrix3d& m = h.matrix();
  const double s = p1.x() * m(2, 0) + p1.y() * m(2, 1) + m(2, 2);
  if (std::abs(s) <= 1e-12 * m.norm()) {
    throw DegenerateInputError("affine_from_homography: point maps to infinity");
  }
  AffineCorrespondence out;
  out.p1 = p1;
  const Eigen::Vector3d q = m * p1.homogeneous();
  out.p2 = q.head<2>() / s;
  out.a << (m(0, 0) - m(2, 0) * out.p2.x()) / s, (m(0, 1) - m(2, 1) * out.p2.x()) / s,
      (m(1, 0) - m(2, 0) * out.p2.y()) / s, (m(1, 1) - m(2, 1) * out.p2.y()) / s;
  return out;
}

namespace {

double spectral_norm_2x2(const Eigen::Matrix2d& m) {
  return m.jacobiSvd().singularValues()(0);
}

Decomposition solve_for_delta(const Eigen::Matrix2d& a, double gamma, double delta) {
  // With M = R_gamma^T A = U R_delta the bottom row gives q_v, the top row
  // rotates to (q_u, w).
  const Eigen::Matrix2d m = rotation2d(gamma).transpose() * a;
  const double sd = std::sin(delta), cd = std::cos(delta);
  Decomposition d;
  d.gamma = gamma;
  d.delta = delta;
  d.q_v = m(1, 0) * sd + m(1, 1) * cd;
  d.q_u = m(0, 0) * cd - m(0, 1) * sd;
  d.w = m(0, 0) * sd + m(0, 1) * cd;
  Eigen::Matrix2d u;
  u << d.q_u, d.w, 0.0, d.q_v;
  d.residual = spectral_norm_2x2(a - rotation2d(gamma) * u * rotation2d(delta));
  return d;
}

}  // namespace

std::vector<Decomposition> decompose_affine(const Eigen::Matrix2d& a, double gamma) {
  if (std::abs(a.determinant()) <= 1e-14 * a.squaredNorm() || !a.allFinite()) {
    throw DegenerateInputError("decompose_affine: degenerate affinity");
  }
  const Eigen::Matrix2d m = rotation2d(gamma).transpose() * a;
  const double delta = std::atan2(m(1, 0), m(1, 1));

  std::vector<Decomposition> out;
  out.push_back(solve_for_delta(a, gamma, delta));
  out.push_back(solve_for_delta(a, gamma, delta + M_PI));

  const double tie = 1e-12 * (1.0 + a.norm());
  std::stable_sort(out.begin(), out.end(), [tie](const Decomposition& x, const Decomposition& y) {
    if (std::abs(x.residual - y.residual) > tie) return x.residual < y.residual;
    return (x.q_v > 0.0) && !(y.q_v > 0.0);
  });
  return out;
}

SiftCorrespondence simulate_sift_from_affine(const AffineCorrespondence& ac, double beta) {
  const double q = ac.a.determinant();
  if (!(q > 0.0)) {
    throw DegenerateInputError(
        "simulate_sift_from_affine: determinant must be positive to model a scale ratio");
  }
  const std::vector<Decomposition> decs = decompose_affine(ac.a, beta);
  const Decomposition& d = decs.front();

  SiftCorrespondence out;
  out.first.u = ac.p1.x();
  out.first.v = ac.p1.y();
  out.first.scale = 1.0;
  out.first.orientation = wrap_angle(-d.delta);  // R_delta = R_{-alpha1}
  out.second.u = ac.p2.x();
  out.second.v = ac.p2.y();
  out.second.scale = q;
  out.second.orientation = wrap_angle(beta);
  return out;
}

}  // namespace affrec
