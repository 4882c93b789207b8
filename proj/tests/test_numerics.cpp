#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <affrec/numerics.hpp>

#include <cmath>
#include <random>

using namespace affrec;

TEST_CASE("quadratic: simple factorizations") {
  const QuadraticRoots r = solve_quadratic(1.0, -3.0, 2.0);
  REQUIRE(r.count == 2);
  CHECK(r.roots[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.roots[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(r.degenerate_linear);
}

TEST_CASE("quadratic: linear fallback when the leading coefficient vanishes") {
  const QuadraticRoots r = solve_quadratic(0.0, 2.0, -4.0);
  REQUIRE(r.count == 1);
  CHECK(r.roots[0] == doctest::Approx(2.0));
  CHECK(r.degenerate_linear);
}

TEST_CASE("quadratic: negative discriminant has no real roots") {
  const QuadraticRoots r = solve_quadratic(1.0, 0.0, 1.0);
  CHECK(r.count == 0);
  CHECK_FALSE(r.identically_degenerate);
}

TEST_CASE("quadratic: identically degenerate input") {
  const QuadraticRoots r = solve_quadratic(0.0, 0.0, 0.0);
  CHECK(r.count == 0);
  CHECK(r.identically_degenerate);
  // eps is relative: uniformly tiny coefficients still form a real quadratic
  const QuadraticRoots r2 = solve_quadratic(1e-300, -3e-300, 2e-300);
  REQUIRE(r2.count == 2);
  CHECK(r2.roots[0] == doctest::Approx(1.0));
  CHECK(r2.roots[1] == doctest::Approx(2.0));
}

TEST_CASE("quadratic: residual bound over a million random triples") {
  Rng rng(derive_seed(42, 0));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const QuadraticRoots r = solve_quadratic(a, b, c);
    if (r.count == 2) CHECK(r.roots[0] <= r.roots[1]);
    const double bound = 1e-9 * std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
    for (int k = 0; k < r.count; ++k) {
      const long double x = r.roots[static_cast<std::size_t>(k)];
      const long double res =
          r.degenerate_linear ? std::abs(static_cast<long double>(b) * x + c)
                              : std::abs((static_cast<long double>(a) * x + b) * x + c);
      worst = std::max(worst, static_cast<double>(res));
      REQUIRE(static_cast<double>(res) <= bound);
    }
  }
  MESSAGE("worst residual: ", worst);
}

TEST_CASE("least_squares: identity system") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  Eigen::Vector3d b(1, 2, 3);
  const LeastSquaresSolution s = least_squares(m, b);
  CHECK((s.x - b).norm() < 1e-14);
  CHECK(s.residual_norm < 1e-14);
}

TEST_CASE("least_squares: consistent overdetermined system is exact") {
  Eigen::MatrixXd m(6, 3);
  m << Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd b(6);
  b << 1, 2, 3, 1, 2, 3;
  const LeastSquaresSolution s = least_squares(m, b);
  CHECK((s.x - Eigen::Vector3d(1, 2, 3)).norm() < 1e-13);
  CHECK(s.residual_norm < 1e-13);
}

TEST_CASE("least_squares: matches the normal-equations oracle") {
  Rng rng(derive_seed(7, 1));
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd m(6, 3);
    Eigen::VectorXd b(6);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
      b(i) = u(rng);
    }
    const LeastSquaresSolution s = least_squares(m, b);
    const Eigen::Vector3d oracle =
        (m.transpose() * m).inverse() * (m.transpose() * b);
    CHECK((s.x - oracle).norm() <= 1e-8 * std::max(1.0, oracle.norm()));
  }
}

TEST_CASE("least_squares: perturbations never improve the objective") {
  Rng rng(derive_seed(7, 2));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(8, 4);
  Eigen::VectorXd b(8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = u(rng);
    b(i) = u(rng);
  }
  const LeastSquaresSolution s = least_squares(m, b);
  const double base = (m * s.x - b).squaredNorm();
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd d(4);
    for (int j = 0; j < 4; ++j) d(j) = u(rng);
    const double perturbed = (m * (s.x + 1e-4 * d) - b).squaredNorm();
    CHECK(perturbed >= base - 1e-12);
  }
}

TEST_CASE("least_squares: rank-deficient input reports the estimated rank") {
  Eigen::MatrixXd m(5, 3);
  for (int i = 0; i < 5; ++i) {
    m(i, 0) = i + 1.0;
    m(i, 1) = 2.0 * (i + 1.0);  // column 2 = 2 * column 1
    m(i, 2) = 1.0;
  }
  Eigen::VectorXd b = Eigen::VectorXd::Ones(5);
  CHECK_THROWS_AS(least_squares(m, b), RankDeficientError);
  try {
    least_squares(m, b);
  } catch (const RankDeficientError& e) {
    CHECK(e.estimated_rank == 2);
  }
}

TEST_CASE("hartley_normalize: symmetric square") {
  const std::vector<Eigen::Vector2d> pts = {{0, 0}, {2, 0}, {0, 2}, {2, 2}};
  const Normalization n = hartley_normalize(pts);
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  double rms = 0.0;
  for (const auto& p : n.points) {
    centroid += p;
    rms += p.squaredNorm();
  }
  centroid /= 4.0;
  rms = std::sqrt(rms / 4.0);
  CHECK(centroid.norm() < 1e-14);
  CHECK(rms == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(n.transform.determinant()) > 1e-12);
}

TEST_CASE("hartley_normalize: already-normalized points give a unit transform") {
  const double r = std::sqrt(2.0);
  const std::vector<Eigen::Vector2d> pts = {{r, 0}, {-r, 0}, {0, r}, {0, -r}};
  const Normalization n = hartley_normalize(pts);
  CHECK((n.transform - Eigen::Matrix3d::Identity()).norm() < 1e-12);
}

TEST_CASE("hartley_normalize: random cloud invariants and involution") {
  Rng rng(derive_seed(9, 0));
  std::uniform_real_distribution<double> u(-100.0, 900.0);
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < 20; ++i) pts.emplace_back(u(rng), u(rng));
  const Normalization n = hartley_normalize(pts);
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  double rms = 0.0;
  for (const auto& p : n.points) {
    centroid += p;
    rms += p.squaredNorm();
  }
  centroid /= 20.0;
  rms = std::sqrt(rms / 20.0);
  CHECK(centroid.norm() < 1e-10);
  CHECK(rms == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // applying the normalization twice must be the identity
  const Normalization n2 = hartley_normalize(n.points);
  CHECK((n2.transform - Eigen::Matrix3d::Identity()).norm() < 1e-10);
}

TEST_CASE("hartley_normalize: identical points rejected") {
  const std::vector<Eigen::Vector2d> pts = {{1, 1}, {1, 1}, {1, 1}};
  CHECK_THROWS_AS(hartley_normalize(pts), DegenerateInputError);
}

TEST_CASE("null_vector_3x3: diagonal rank-2 matrix") {
  const Eigen::Vector3d v = null_vector_3x3(Eigen::Vector3d(1, 1, 0).asDiagonal());
  CHECK(std::abs(std::abs(v(2)) - 1.0) < 1e-12);
  CHECK(std::abs(v(0)) < 1e-12);
}

TEST_CASE("null_vector_3x3: rank-1 and random rank-2 residuals") {
  Rng rng(derive_seed(11, 0));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
    const Eigen::Matrix3d rank1 = a * b.transpose();
    if (rank1.norm() < 1e-3) continue;
    const Eigen::Vector3d v1 = null_vector_3x3(rank1);
    CHECK((rank1 * v1).norm() <= 1e-8 * rank1.norm());

    const Eigen::Vector3d c(u(rng), u(rng), u(rng)), d(u(rng), u(rng), u(rng));
    const Eigen::Matrix3d rank2 = a * b.transpose() + c * d.transpose();
    if (rank2.norm() < 1e-3) continue;
    const Eigen::Vector3d v2 = null_vector_3x3(rank2);
    CHECK(std::abs(v2.norm() - 1.0) < 1e-12);
    CHECK((rank2 * v2).norm() <= 1e-8 * rank2.norm());
  }
}

TEST_CASE("null_vector_3x3: full-rank input rejected with the smallest singular value") {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  CHECK_THROWS_AS(null_vector_3x3(m), FullRankError);
  try {
    null_vector_3x3(m);
  } catch (const FullRankError& e) {
    CHECK(e.smallest_singular_value == doctest::Approx(1.0));
  }
}

TEST_CASE("derive_seed: deterministic and stream-separated") {
  CHECK(derive_seed(123, 0) == derive_seed(123, 0));
  CHECK(derive_seed(123, 0) != derive_seed(123, 1));
  CHECK(derive_seed(123, 0) != derive_seed(124, 0));
}
