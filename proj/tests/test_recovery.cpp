#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <affrec/recovery.hpp>
#include <affrec/synthbench.hpp>

#include <chrono>
#include <cmath>

using namespace affrec;

namespace {

FundamentalMatrix rectified_f() {
  return FundamentalMatrix::from_row_major({0, 0, 0, 0, 0, -1, 0, 1, 0});
}

SiftCorrespondence make_corr(double u1, double v1, double u2, double v2, double q1, double q2,
                             double a1, double a2) {
  SiftCorrespondence c;
  c.first = {u1, v1, q1, a1};
  c.second = {u2, v2, q2, a2};
  return c;
}

// residual of the second linear equation with q_u and w back-substituted
double second_equation_residual(const RecoveryCoefficients& c, double q, double q_v) {
  const double q_u = q / q_v;
  const double w = (c.d_c - c.g_c * q_u - c.p_c * q_v) / c.i_c;
  return c.j_c * q_u + c.k_c * q_v + c.g_c * w - c.e_c;
}

}  // namespace

TEST_CASE("recovery_coefficients: rectified hand-evaluated example") {
  // the unit-Frobenius gauge scales the hand values by 1/sqrt(2)
  const double s = 1.0 / std::sqrt(2.0);
  const RecoveryCoefficients c =
      recovery_coefficients(rectified_f(), make_corr(3, 8, 9, 8, 1, 2, 0, 0));
  CHECK(c.b_c == doctest::Approx(0.0));
  CHECK(c.c_c == doctest::Approx(-s));
  CHECK(c.d_c == doctest::Approx(0.0));
  CHECK(c.e_c == doctest::Approx(-s));
  CHECK(c.g_c == doctest::Approx(0.0));
  CHECK(c.p_c == doctest::Approx(0.0));
  CHECK(c.i_c == doctest::Approx(0.0));
  CHECK(c.j_c == doctest::Approx(0.0));
  CHECK(c.k_c == doctest::Approx(-s));
}

TEST_CASE("recovery_coefficients: J + I vanishes identically") {
  Rng rng(derive_seed(41, 0));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> px(-200.0, 1000.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (int t = 0; t < 200; ++t) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) m(r, col) = u(rng);
    const FundamentalMatrix f(m);
    const RecoveryCoefficients c = recovery_coefficients(
        f, make_corr(px(rng), px(rng), px(rng), px(rng), 1, 2, ang(rng), ang(rng)));
    CHECK(c.j_c + c.i_c == 0.0);
  }
}

TEST_CASE("recovery_coefficients: collected terms match composed-model probes") {
  // substitute the composed affine model into B a1 + C a3 = D and
  // B a2 + C a4 = E at random (q_u, q_v, w) probes and compare with the
  // linear form G q_u + P q_v + I w (and J, K, G for the second equation)
  Rng rng(derive_seed(42, 0));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> px(-200.0, 1000.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> sc(0.3, 2.5);
  for (int t = 0; t < 100; ++t) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) m(r, col) = u(rng);
    const FundamentalMatrix f(m);
    const SiftCorrespondence corr =
        make_corr(px(rng), px(rng), px(rng), px(rng), 1, 2, ang(rng), ang(rng));
    const RecoveryCoefficients c = recovery_coefficients(f, corr);
    for (int probe = 0; probe < 5; ++probe) {
      AffineComponents comp;
      comp.alpha1 = corr.first.orientation;
      comp.alpha2 = corr.second.orientation;
      comp.q_u = sc(rng);
      comp.q_v = sc(rng);
      comp.w = 2.0 * u(rng);
      const Eigen::Matrix2d a = compose_affine(comp);
      const double lhs1 = c.b_c * a(0, 0) + c.c_c * a(1, 0);
      const double lin1 = c.g_c * comp.q_u + c.p_c * comp.q_v + c.i_c * comp.w;
      CHECK(lhs1 == doctest::Approx(lin1).epsilon(1e-10));
      const double lhs2 = c.b_c * a(0, 1) + c.c_c * a(1, 1);
      const double lin2 = c.j_c * comp.q_u + c.k_c * comp.q_v + c.g_c * comp.w;
      CHECK(lhs2 == doctest::Approx(lin2).epsilon(1e-10));
    }
  }
}

TEST_CASE("recover_affine: rectified shear-unobservable example") {
  const RecoveryResult r =
      recover_affine(rectified_f(), make_corr(3, 8, 9, 8, 1, 2, 0, 0));
  CHECK(r.degeneracy == RecoveryDegeneracy::kShearUnobservable);
  REQUIRE(r.candidates.size() == 1);
  Eigen::Matrix2d expected;
  expected << 2, 0, 0, 1;
  CHECK((r.candidates[0].ac.a - expected).norm() < 1e-12);
  CHECK(r.candidates[0].components.q_u == doctest::Approx(2.0));
  CHECK(r.candidates[0].components.q_v == doctest::Approx(1.0));
  CHECK(r.candidates[0].components.w == doctest::Approx(0.0));
}

TEST_CASE("recover_affine: noise-free synthetic scenes are exact") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SyntheticScene scene = generate_scene(seed, 0.0);
    for (std::size_t i = 0; i < scene.sift.size(); ++i) {
      const RecoveryResult r = recover_affine(scene.gt_f, scene.sift[i]);
      REQUIRE(!r.candidates.empty());
      double best = 1e30;
      for (const RecoveryCandidate& cand : r.candidates) {
        best = std::min(best, (cand.ac.a - scene.points[i].a).norm());
      }
      CHECK(best < 1e-8);
    }
  }
}

TEST_CASE("recover_affine: candidates satisfy the linear constraints and det identity") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const SyntheticScene scene = generate_scene(seed + 500, 0.5);
    for (const SiftCorrespondence& s : scene.sift) {
      const RecoveryCoefficients c = recovery_coefficients(scene.gt_f, s);
      const RecoveryResult r = recover_affine(scene.gt_f, s);
      for (const RecoveryCandidate& cand : r.candidates) {
        const Eigen::Matrix2d& a = cand.ac.a;
        const double r1 = c.b_c * a(0, 0) + c.c_c * a(1, 0) - c.d_c;
        const double r2 = c.b_c * a(0, 1) + c.c_c * a(1, 1) - c.e_c;
        const double scale1 = std::max(
            {1.0, std::abs(c.b_c * a(0, 0)), std::abs(c.c_c * a(1, 0)), std::abs(c.d_c)});
        const double scale2 = std::max(
            {1.0, std::abs(c.b_c * a(0, 1)), std::abs(c.c_c * a(1, 1)), std::abs(c.e_c)});
        CHECK(std::abs(r1) <= 1e-8 * scale1);
        CHECK(std::abs(r2) <= 1e-8 * scale2);
        CHECK(a.determinant() == doctest::Approx(s.relative_scale()).epsilon(1e-9));
        CHECK(af_consistency_residual(scene.gt_f, cand.ac) < 1e-8);
      }
    }
  }
}

TEST_CASE("recover_affine: roots coincide with grid sign changes") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SyntheticScene scene = generate_scene(seed + 900, 0.3);
    for (const SiftCorrespondence& s : scene.sift) {
      const RecoveryCoefficients c = recovery_coefficients(scene.gt_f, s);
      const double eps = 1e-10 * std::max({std::abs(c.b_c), std::abs(c.c_c), 1.0});
      if (std::abs(c.i_c) <= 1e3 * eps) continue;  // generic branch only
      const double q = s.relative_scale();
      const RecoveryResult r = recover_affine(scene.gt_f, s);

      // log-spaced grid over [1e-3, 1e3]; bisect each bracketed sign change
      const int n = 100000;
      std::vector<double> oracle_roots;
      double prev_x = 1e-3, prev_g = second_equation_residual(c, q, prev_x);
      for (int i = 1; i <= n; ++i) {
        const double x = 1e-3 * std::pow(1e6, static_cast<double>(i) / n);
        const double g = second_equation_residual(c, q, x);
        if ((prev_g < 0) != (g < 0)) {
          double lo = prev_x, hi = x;
          for (int it = 0; it < 100; ++it) {
            const double mid = std::sqrt(lo * hi);
            if ((second_equation_residual(c, q, lo) < 0) !=
                (second_equation_residual(c, q, mid) < 0)) {
              hi = mid;
            } else {
              lo = mid;
            }
          }
          oracle_roots.push_back(std::sqrt(lo * hi));
        }
        prev_x = x;
        prev_g = g;
      }
      for (const RecoveryCandidate& cand : r.candidates) {
        const double q_v = cand.components.q_v;
        if (q_v < 1e-3 * 1.001 || q_v > 1e3 * 0.999) continue;
        double best = 1e30;
        for (double o : oracle_roots) best = std::min(best, std::abs(o - q_v) / q_v);
        CHECK(best < 1e-6);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("recover_affine: angular equivariance under frame rotations") {
  Rng rng(derive_seed(43, 0));
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SyntheticScene scene = generate_scene(seed + 60, 0.0);
    const double rho1 = ang(rng), rho2 = ang(rng);
    Eigen::Matrix3d g1 = Eigen::Matrix3d::Identity(), g2 = Eigen::Matrix3d::Identity();
    g1.topLeftCorner<2, 2>() = rotation2d(rho1);
    g2.topLeftCorner<2, 2>() = rotation2d(rho2);
    const FundamentalMatrix f_rot(g2 * scene.gt_f.matrix() * g1.transpose());

    for (std::size_t i = 0; i < scene.sift.size(); ++i) {
      const SiftCorrespondence& s = scene.sift[i];
      SiftCorrespondence rotated = s;
      const Eigen::Vector2d p1r = rotation2d(rho1) * s.p1();
      const Eigen::Vector2d p2r = rotation2d(rho2) * s.p2();
      rotated.first.u = p1r.x();
      rotated.first.v = p1r.y();
      rotated.second.u = p2r.x();
      rotated.second.v = p2r.y();
      rotated.first.orientation = wrap_angle(s.first.orientation + rho1);
      rotated.second.orientation = wrap_angle(s.second.orientation + rho2);

      const RecoveryResult base = recover_affine(scene.gt_f, s);
      const RecoveryResult rot = recover_affine(f_rot, rotated);
      REQUIRE(!base.candidates.empty());
      REQUIRE(!rot.candidates.empty());
      for (const RecoveryCandidate& cand : base.candidates) {
        const Eigen::Matrix2d conj = rotation2d(rho2) * cand.ac.a * rotation2d(-rho1);
        double best = 1e30;
        for (const RecoveryCandidate& rc : rot.candidates) {
          best = std::min(best, (rc.ac.a - conj).norm());
        }
        CHECK(best <= 1e-8 * (1.0 + conj.norm()));
      }
    }
  }
}

TEST_CASE("filter_candidates: extreme candidates removed, sane ones kept") {
  RecoveryResult r;
  RecoveryCandidate extreme;
  extreme.components = {0.0, 0.0, 100.0, 0.02, 0.0};
  extreme.ac.a = compose_affine(extreme.components);
  RecoveryCandidate sane;
  sane.components = {0.1, 0.2, 1.2, 0.9, 0.3};
  sane.ac.a = compose_affine(sane.components);
  r.candidates = {extreme, sane};

  const RecoveryResult filtered = filter_candidates(r);
  REQUIRE(filtered.candidates.size() == 1);
  CHECK(filtered.candidates[0].components.q_u == doctest::Approx(1.2));

  CHECK_THROWS_AS(filter_candidates(r, 0.5, 5.0), std::invalid_argument);
}

TEST_CASE("filter_candidates: defaults never drop the ground-truth candidate") {
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SyntheticScene scene = generate_scene(seed + 2000, 0.0);
    for (std::size_t i = 0; i < scene.sift.size(); ++i) {
      const RecoveryResult r = recover_affine(scene.gt_f, scene.sift[i]);
      const RecoveryResult filtered = filter_candidates(r);
      double best = 1e30;
      for (const RecoveryCandidate& cand : filtered.candidates) {
        best = std::min(best, (cand.ac.a - scene.points[i].a).norm());
      }
      REQUIRE(best < 1e-8);
      ++total;
    }
  }
  CHECK(total == 2000);
}

TEST_CASE("recover_affine: inconsistent degenerate input reports no real root") {
  // rectified F, first orientation 0, second pi/2: the first equation forces
  // q_u = 0, which contradicts q_u * q_v = q > 0
  const RecoveryResult r =
      recover_affine(rectified_f(), make_corr(3, 8, 9, 8, 1, 2, 0, M_PI / 2));
  CHECK(r.candidates.empty());
  CHECK(r.degeneracy == RecoveryDegeneracy::kNoRealRoot);
}

TEST_CASE("recover_affine: the first epipole degenerates every coefficient") {
  const SyntheticScene scene = generate_scene(12, 0.0);
  const Epipole e = scene.gt_f.epipole_first();
  REQUIRE_FALSE(e.at_infinity);
  const RecoveryResult r =
      recover_affine(scene.gt_f, make_corr(e.u, e.v, 500, 500, 1, 2, 0.3, 1.1));
  CHECK(r.candidates.empty());
  CHECK(r.degeneracy == RecoveryDegeneracy::kCoefficientsDegenerate);
}

TEST_CASE("recover_affine: per-call latency stays under a millisecond") {
  const SyntheticScene scene = generate_scene(1234, 0.2);
  std::vector<double> times;
  for (int rep = 0; rep < 1000; ++rep) {
    const SiftCorrespondence& s = scene.sift[static_cast<std::size_t>(rep) % scene.sift.size()];
    const auto t0 = std::chrono::steady_clock::now();
    const RecoveryResult r = recover_affine(scene.gt_f, s);
    const auto t1 = std::chrono::steady_clock::now();
    CHECK(!r.candidates.empty());
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  CHECK(times[times.size() / 2] < 1.0);
}
