#include "affrec/epipolar.hpp"

#include <algorithm>
#include <cmath>

#include "affrec/affine.hpp"

namespace affrec {

namespace {

Epipole to_epipole(const Eigen::Vector3d& e) {
  Epipole out;
  if (std::abs(e(2)) < 1e-10) {  // e is unit-norm
    out.at_infinity = true;
    return out;
  }
  out.u = e(0) / e(2);
  out.v = e(1) / e(2);
  return out;
}

// Row of the linear epipolar system for p2^T F p1 = 0, coefficients of f1..f9.
Eigen::Matrix<double, 1, 9> epipolar_row(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2) {
  Eigen::Matrix<double, 1, 9> row;
  row << p2.x() * p1.x(), p2.x() * p1.y(), p2.x(), p2.y() * p1.x(), p2.y() * p1.y(), p2.y(),
      p1.x(), p1.y(), 1.0;
  return row;
}

Eigen::Matrix3d reshape_row_major(const Eigen::Matrix<double, 9, 1>& v) {
  Eigen::Matrix3d m;
  m << v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8);
  return m;
}

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 via the companion matrix,
// Newton-polished in extended precision.
std::vector<double> cubic_real_roots(long double c3, long double c2, long double c1,
                                     long double c0) {
  const long double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  if (scale == 0.0L) return {};
  if (std::abs(c3) <= 1e-13L * scale) {
    const QuadraticRoots qr = solve_quadratic(static_cast<double>(c2), static_cast<double>(c1),
                                              static_cast<double>(c0));
    return {qr.roots.begin(), qr.roots.begin() + qr.count};
  }
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(0, 2) = static_cast<double>(-c0 / c3);
  companion(1, 2) = static_cast<double>(-c1 / c3);
  companion(2, 2) = static_cast<double>(-c2 / c3);
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(companion, false);
  std::vector<double> roots;
  for (int i = 0; i < 3; ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) > 1e-8 * (1.0 + std::abs(ev.real()))) continue;
    long double x = ev.real();
    for (int it = 0; it < 40; ++it) {
      const long double p = ((c3 * x + c2) * x + c1) * x + c0;
      const long double dp = (3.0L * c3 * x + 2.0L * c2) * x + c1;
      if (dp == 0.0L) break;
      const long double step = p / dp;
      x -= step;
      if (std::abs(step) <= 1e-18L * (1.0L + std::abs(x))) break;
    }
    roots.push_back(static_cast<double>(x));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

long double det3_ld(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b, long double l) {
  // det(a + l*b) evaluated in extended precision
  long double m[3][3];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = static_cast<long double>(a(r, c)) + l * b(r, c);
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

FundamentalMatrix::FundamentalMatrix(const Eigen::Matrix3d& m) {
  const double norm = m.norm();
  if (!(norm > 0.0) || !m.allFinite()) {
    throw std::invalid_argument("FundamentalMatrix: invalid matrix");
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d sv = svd.singularValues();
  sv(2) = 0.0;  // rank-2 projection
  f_ = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
  f_ /= f_.norm();
}

FundamentalMatrix FundamentalMatrix::from_row_major(const std::array<double, 9>& f) {
  Eigen::Matrix3d m;
  m << f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8];
  return FundamentalMatrix(m);
}

Eigen::Vector3d FundamentalMatrix::epipole_first_homogeneous() const {
  return null_vector_3x3(f_);
}

Eigen::Vector3d FundamentalMatrix::epipole_second_homogeneous() const {
  return null_vector_3x3(f_.transpose());
}

Epipole FundamentalMatrix::epipole_first() const { return to_epipole(epipole_first_homogeneous()); }

Epipole FundamentalMatrix::epipole_second() const {
  return to_epipole(epipole_second_homogeneous());
}

EpipolarNormals epipolar_normals(const FundamentalMatrix& f, const Eigen::Vector2d& p1,
                                 const Eigen::Vector2d& p2) {
  EpipolarNormals out;
  out.n1 = (f.matrix().transpose() * p2.homogeneous()).head<2>();
  out.n2 = (f.matrix() * p1.homogeneous()).head<2>();
  return out;
}

double af_consistency_residual(const FundamentalMatrix& f, const AffineCorrespondence& ac) {
  const double det = ac.a.determinant();
  if (std::abs(det) <= 1e-14 * ac.a.squaredNorm()) {
    throw DegenerateInputError("af_consistency_residual: singular affine transformation");
  }
  const EpipolarNormals n = epipolar_normals(f, ac.p1, ac.p2);
  // A^{-T} for a 2x2 via the adjugate
  Eigen::Matrix2d a_inv_t;
  a_inv_t << ac.a(1, 1), -ac.a(1, 0), -ac.a(0, 1), ac.a(0, 0);
  a_inv_t /= det;
  const double num = (a_inv_t * n.n1 + n.n2).norm();
  return num / std::max({n.n1.norm(), n.n2.norm(), 1.0});
}

double sampson_distance(const FundamentalMatrix& f, const Eigen::Vector2d& p1,
                        const Eigen::Vector2d& p2, bool* degenerate) {
  if (degenerate) *degenerate = false;
  const Eigen::Vector3d fp1 = f.matrix() * p1.homogeneous();
  const Eigen::Vector3d ftp2 = f.matrix().transpose() * p2.homogeneous();
  const double err = p2.homogeneous().dot(fp1);
  const double den2 =
      fp1(0) * fp1(0) + fp1(1) * fp1(1) + ftp2(0) * ftp2(0) + ftp2(1) * ftp2(1);
  if (den2 <= 0.0) {
    if (degenerate) *degenerate = true;
    return std::abs(err);
  }
  return std::abs(err) / std::sqrt(den2);
}

FundamentalMatrix estimate_f_8pt(std::span<const PointPair> corrs) {
  if (corrs.size() < 8) {
    throw std::invalid_argument("estimate_f_8pt: need at least 8 correspondences");
  }
  std::vector<Eigen::Vector2d> pts1, pts2;
  pts1.reserve(corrs.size());
  pts2.reserve(corrs.size());
  for (const auto& c : corrs) {
    pts1.push_back(c.p1);
    pts2.push_back(c.p2);
  }
  const Normalization n1 = hartley_normalize(pts1);
  const Normalization n2 = hartley_normalize(pts2);

  Eigen::MatrixXd design(corrs.size(), 9);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    design.row(static_cast<Eigen::Index>(i)) = epipolar_row(n1.points[i], n2.points[i]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(7) <= 1e-9 * sv(0)) {
    throw DegenerateInputError(
        "estimate_f_8pt: degenerate configuration (design matrix rank < 8)");
  }
  const Eigen::Matrix3d fn = reshape_row_major(svd.matrixV().col(8));
  // rank-2 projection in the normalized frame, then denormalize
  Eigen::JacobiSVD<Eigen::Matrix3d> fsvd(fn, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d s = fsvd.singularValues();
  s(2) = 0.0;
  const Eigen::Matrix3d fr2 = fsvd.matrixU() * s.asDiagonal() * fsvd.matrixV().transpose();
  return FundamentalMatrix(n2.transform.transpose() * fr2 * n1.transform);
}

std::vector<FundamentalMatrix> estimate_f_7pt(std::span<const PointPair> corrs) {
  if (corrs.size() != 7) {
    throw std::invalid_argument("estimate_f_7pt: need exactly 7 correspondences");
  }
  std::vector<Eigen::Vector2d> pts1, pts2;
  for (const auto& c : corrs) {
    pts1.push_back(c.p1);
    pts2.push_back(c.p2);
  }
  const Normalization n1 = hartley_normalize(pts1);
  const Normalization n2 = hartley_normalize(pts2);

  Eigen::Matrix<double, 7, 9> design;
  for (int i = 0; i < 7; ++i) {
    design.row(i) = epipolar_row(n1.points[static_cast<std::size_t>(i)],
                                 n2.points[static_cast<std::size_t>(i)]);
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 7, 9>> svd(design, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(6) <= 1e-9 * sv(0)) {
    throw DegenerateInputError("estimate_f_7pt: degenerate sample (null space dimension != 2)");
  }
  const Eigen::Matrix3d f1 = reshape_row_major(svd.matrixV().col(7));
  const Eigen::Matrix3d f2 = reshape_row_major(svd.matrixV().col(8));

  // det(l*F1 + (1-l)*F2) = det(F2 + l*(F1-F2)) is cubic in l; recover its
  // coefficients by evaluating at four nodes.
  const Eigen::Matrix3d diff = f1 - f2;
  const long double d0 = det3_ld(f2, diff, 0.0L);
  const long double d1 = det3_ld(f2, diff, 1.0L);
  const long double dm1 = det3_ld(f2, diff, -1.0L);
  const long double d2 = det3_ld(f2, diff, 2.0L);
  const long double c2 = 0.5L * (d1 + dm1) - d0;
  const long double y = 0.5L * (d1 - dm1);    // c3 + c1
  const long double x = d2 - d0 - 4.0L * c2;  // 8 c3 + 2 c1
  const long double c3 = (x - 2.0L * y) / 6.0L;
  const long double c1 = y - c3;
  const long double c0 = d0;

  std::vector<FundamentalMatrix> out;
  for (double l : cubic_real_roots(c3, c2, c1, c0)) {
    const Eigen::Matrix3d fn = l * f1 + (1.0 - l) * f2;
    if (fn.norm() <= 1e-12) continue;
    out.emplace_back(n2.transform.transpose() * fn * n1.transform);
  }
  return out;
}

}  // namespace affrec
