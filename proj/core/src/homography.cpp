#include "affrec/homography.hpp"

#include <cmath>
#include <vector>

namespace affrec {

namespace {

// Solves min ||m x - b|| after rescaling columns to unit norm.
Eigen::VectorXd equilibrated_least_squares(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
  Eigen::VectorXd col_scale(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double n = m.col(j).norm();
    col_scale(j) = n > 0.0 ? 1.0 / n : 1.0;
  }
  const Eigen::MatrixXd ms = m * col_scale.asDiagonal();
  const LeastSquaresSolution sol = least_squares(ms, b);
  return col_scale.asDiagonal() * sol.x;
}

Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v(2), v(1), v(2), 0, -v(0), -v(1), v(0), 0;
  return m;
}

void check_no_collinear_triple(std::span<const PointPair> corrs, bool second_image) {
  double scale = 0.0;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    for (std::size_t j = i + 1; j < corrs.size(); ++j) {
      const Eigen::Vector2d a = second_image ? corrs[i].p2 : corrs[i].p1;
      const Eigen::Vector2d b = second_image ? corrs[j].p2 : corrs[j].p1;
      scale = std::max(scale, (a - b).norm());
    }
  }
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    for (std::size_t j = i + 1; j < corrs.size(); ++j) {
      for (std::size_t k = j + 1; k < corrs.size(); ++k) {
        const Eigen::Vector2d a = second_image ? corrs[i].p2 : corrs[i].p1;
        const Eigen::Vector2d b = second_image ? corrs[j].p2 : corrs[j].p1;
        const Eigen::Vector2d c = second_image ? corrs[k].p2 : corrs[k].p1;
        const Eigen::Vector2d ab = b - a, ac = c - a;
        const double cross = ab.x() * ac.y() - ab.y() * ac.x();
        if (std::abs(cross) <= 1e-9 * scale * scale) {
          throw DegenerateInputError("h_4pt: degenerate sample (collinear points)");
        }
      }
    }
  }
}

}  // namespace

Homography::Homography(const Eigen::Matrix3d& m) {
  const double norm = m.norm();
  if (!(norm > 0.0) || !m.allFinite()) {
    throw std::invalid_argument("Homography: invalid matrix");
  }
  h_ = m / norm;
  for (int i = 0; i < 9; ++i) {
    const double v = h_(i / 3, i % 3);
    if (std::abs(v) > 1e-15) {
      if (v < 0.0) h_ = -h_;
      break;
    }
  }
}

HafSystem haf_system(const FundamentalMatrix& f, const AffineCorrespondence& ac) {
  const Epipole e = f.epipole_second();
  if (e.at_infinity) {
    throw DegenerateInputError("haf_system: second epipole at infinity");
  }
  const double u1 = ac.p1.x(), v1 = ac.p1.y();
  const double u2 = ac.p2.x(), v2 = ac.p2.y();
  const double a1 = ac.a(0, 0), a2 = ac.a(0, 1), a3 = ac.a(1, 0), a4 = ac.a(1, 1);
  const double eu = e.u, ev = e.v;

  HafSystem s;
  s.c << a1 * u1 + u2 - eu, a1 * v1, a1,
      a2 * u1, a2 * v1 + u2 - eu, a2,
      a3 * u1 + v2 - ev, a3 * v1, a3,
      a4 * u1, a4 * v1 + v2 - ev, a4,
      u1 * eu - u1 * u2, v1 * eu - v1 * u2, eu - u2,
      u1 * ev - u1 * v2, v1 * ev - v1 * v2, ev - v2;
  // The last entry carries +f3; the symmetric form is what makes the
  // noise-free case exact.
  s.b << f.f(4), f.f(5), -f.f(1), -f.f(2), -u1 * f.f(4) - v1 * f.f(5) - f.f(6),
      u1 * f.f(1) + v1 * f.f(2) + f.f(3);
  return s;
}

Homography haf_from_ac(const FundamentalMatrix& f, const AffineCorrespondence& ac) {
  const HafSystem sys = haf_system(f, ac);
  const Eigen::VectorXd x = equilibrated_least_squares(sys.c, sys.b);
  const double h7 = x(0), h8 = x(1), h9 = x(2);

  const double u1 = ac.p1.x(), v1 = ac.p1.y();
  const double u2 = ac.p2.x(), v2 = ac.p2.y();
  const double s = u1 * h7 + v1 * h8 + h9;
  if (std::abs(s) <= 1e-12 * x.norm() * (std::abs(u1) + std::abs(v1) + 1.0)) {
    throw DegenerateInputError("haf_from_ac: projective depth vanished");
  }
  const double h1 = ac.a(0, 0) * s + h7 * u2;
  const double h2 = ac.a(0, 1) * s + h8 * u2;
  const double h4 = ac.a(1, 0) * s + h7 * v2;
  const double h5 = ac.a(1, 1) * s + h8 * v2;
  const double h3 = s * u2 - h1 * u1 - h2 * v1;
  const double h6 = s * v2 - h4 * u1 - h5 * v1;

  Eigen::Matrix3d h;
  h << h1, h2, h3, h4, h5, h6, h7, h8, h9;
  return Homography(h);
}

Homography h_dlt(std::span<const PointPair> corrs) {
  if (corrs.size() < 4) {
    throw std::invalid_argument("h_dlt: need at least 4 correspondences");
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

  Eigen::MatrixXd design(2 * corrs.size(), 9);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const Eigen::Vector2d& p = n1.points[i];
    const Eigen::Vector2d& q = n2.points[i];
    const Eigen::Index r = 2 * static_cast<Eigen::Index>(i);
    design.row(r) << p.x(), p.y(), 1, 0, 0, 0, -q.x() * p.x(), -q.x() * p.y(), -q.x();
    design.row(r + 1) << 0, 0, 0, p.x(), p.y(), 1, -q.y() * p.x(), -q.y() * p.y(), -q.y();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(7) <= 1e-10 * sv(0)) {
    throw DegenerateInputError("h_dlt: degenerate sample (design matrix rank < 8)");
  }
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography(n2.transform.inverse() * hn * n1.transform);
}

Homography h_4pt(std::span<const PointPair> corrs) {
  if (corrs.size() != 4) {
    throw std::invalid_argument("h_4pt: need exactly 4 correspondences");
  }
  check_no_collinear_triple(corrs, false);
  check_no_collinear_triple(corrs, true);
  return h_dlt(corrs);
}

Homography h_fcompat_ls(const FundamentalMatrix& f, std::span<const PointPair> corrs) {
  if (corrs.size() < 3) {
    throw std::invalid_argument("h_fcompat_ls: need at least 3 correspondences");
  }
  if (f.epipole_second().at_infinity) {
    throw DegenerateInputError("h_fcompat_ls: second epipole at infinity");
  }
  const Eigen::Vector3d e2 = f.epipole_second_homogeneous();
  const Eigen::Matrix3d h0 = cross_matrix(e2) * f.matrix();

  // p2 x (H0 + e2 v^T) p1 = 0 is linear in v; the first two cross-product
  // rows are independent for finite p2.
  Eigen::MatrixXd design(2 * corrs.size(), 3);
  Eigen::VectorXd rhs(2 * corrs.size());
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const Eigen::Vector3d p1 = corrs[i].p1.homogeneous();
    const Eigen::Vector3d p2 = corrs[i].p2.homogeneous();
    const Eigen::Vector3d g = p2.cross(e2);
    const Eigen::Vector3d r = -p2.cross(h0 * p1);
    const Eigen::Index row = 2 * static_cast<Eigen::Index>(i);
    design.row(row) = g(0) * p1.transpose();
    design.row(row + 1) = g(1) * p1.transpose();
    rhs(row) = r(0);
    rhs(row + 1) = r(1);
  }
  Eigen::VectorXd v;
  try {
    v = equilibrated_least_squares(design, rhs);
  } catch (const RankDeficientError&) {
    throw DegenerateInputError("h_fcompat_ls: degenerate sample (rank-deficient system)");
  }
  return Homography(h0 + e2 * v.transpose());
}

Homography h_3pt(const FundamentalMatrix& f, std::span<const PointPair> corrs) {
  if (corrs.size() != 3) {
    throw std::invalid_argument("h_3pt: need exactly 3 correspondences");
  }
  return h_fcompat_ls(f, corrs);
}

double reprojection_error(const Homography& h, const PointPair& corr, bool* at_infinity) {
  if (at_infinity) *at_infinity = false;
  const Eigen::Vector3d q = h.matrix() * corr.p1.homogeneous();
  if (std::abs(q(2)) <= 1e-12) {
    if (at_infinity) *at_infinity = true;
    return std::numeric_limits<double>::infinity();
  }
  return (q.head<2>() / q(2) - corr.p2).norm();
}

double symmetric_reprojection_error(const Homography& h, const PointPair& corr,
                                    bool* at_infinity) {
  bool fwd_inf = false, bwd_inf = false;
  const double fwd = reprojection_error(h, corr, &fwd_inf);
  const Homography inv(h.matrix().inverse());
  const double bwd = reprojection_error(inv, PointPair{corr.p2, corr.p1}, &bwd_inf);
  if (at_infinity) *at_infinity = fwd_inf || bwd_inf;
  return 0.5 * (fwd + bwd);
}

}  // namespace affrec
