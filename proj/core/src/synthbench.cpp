#include "affrec/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <thread>

namespace affrec {

namespace {

constexpr double kFocal = 1000.0;
constexpr double kPrincipal = 500.0;
constexpr double kSphereRadius = 10.0;
constexpr double kPlaneExtent = 2.0;
constexpr std::size_t kScenePoints = 10;

Eigen::Vector3d random_unit(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

Eigen::Matrix<double, 3, 4> make_camera(const Eigen::Vector3d& center) {
  Eigen::Matrix3d k;
  k << kFocal, 0, kPrincipal, 0, kFocal, kPrincipal, 0, 0, 1;
  const Eigen::Vector3d z = (-center).normalized();
  Eigen::Vector3d up(0, 1, 0);
  if (std::abs(up.dot(z)) > 0.95) up = Eigen::Vector3d(1, 0, 0);
  const Eigen::Vector3d x = up.cross(z).normalized();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.row(0) = x;
  r.row(1) = y;
  r.row(2) = z;
  Eigen::Matrix<double, 3, 4> p;
  p.leftCols<3>() = r;
  p.col(3) = -r * center;
  return k * p;
}

// Projects and requires positive depth.
std::optional<Eigen::Vector2d> project(const Eigen::Matrix<double, 3, 4>& p,
                                       const Eigen::Vector3d& x) {
  const Eigen::Vector3d h = p * x.homogeneous();
  if (h(2) <= 1e-9) return std::nullopt;
  return Eigen::Vector2d(h.head<2>() / h(2));
}

using Matrix3ld = Eigen::Matrix<long double, 3, 3>;

// Four-point DLT in extended precision; the ground-truth homography and the
// plane-compatible F derived from it have to agree far below the recovery
// tolerances even in poorly conditioned draws.
Matrix3ld dlt4_extended(const std::vector<PointPair>& pairs) {
  Eigen::Vector2d c1 = Eigen::Vector2d::Zero(), c2 = Eigen::Vector2d::Zero();
  for (const PointPair& pp : pairs) {
    c1 += pp.p1;
    c2 += pp.p2;
  }
  c1 /= 4.0;
  c2 /= 4.0;
  long double rms1 = 0.0L, rms2 = 0.0L;
  for (const PointPair& pp : pairs) {
    rms1 += (pp.p1 - c1).squaredNorm();
    rms2 += (pp.p2 - c2).squaredNorm();
  }
  const long double s1 = std::sqrt(2.0L / (rms1 / 4.0L));
  const long double s2 = std::sqrt(2.0L / (rms2 / 4.0L));

  Eigen::Matrix<long double, 8, 9> design;
  for (int i = 0; i < 4; ++i) {
    const long double u = s1 * (pairs[static_cast<std::size_t>(i)].p1.x() - c1.x());
    const long double v = s1 * (pairs[static_cast<std::size_t>(i)].p1.y() - c1.y());
    const long double x = s2 * (pairs[static_cast<std::size_t>(i)].p2.x() - c2.x());
    const long double y = s2 * (pairs[static_cast<std::size_t>(i)].p2.y() - c2.y());
    design.row(2 * i) << u, v, 1.0L, 0.0L, 0.0L, 0.0L, -x * u, -x * v, -x;
    design.row(2 * i + 1) << 0.0L, 0.0L, 0.0L, u, v, 1.0L, -y * u, -y * v, -y;
  }
  Eigen::JacobiSVD<Eigen::Matrix<long double, 8, 9>> svd(design, Eigen::ComputeFullV);
  const Eigen::Matrix<long double, 9, 1> h = svd.matrixV().col(8);
  Matrix3ld hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Matrix3ld t1 = Matrix3ld::Identity(), t2_inv = Matrix3ld::Identity();
  t1(0, 0) = s1;
  t1(1, 1) = s1;
  t1(0, 2) = -s1 * c1.x();
  t1(1, 2) = -s1 * c1.y();
  t2_inv(0, 0) = 1.0L / s2;
  t2_inv(1, 1) = 1.0L / s2;
  t2_inv(0, 2) = c2.x();
  t2_inv(1, 2) = c2.y();
  Matrix3ld out = t2_inv * hn * t1;
  return out / out.norm();
}

int thread_count() {
  const char* env = std::getenv("AFFREC_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return std::clamp(n, 1, 64);
}

// Deterministic regardless of the thread count: every trial writes only its
// own slot.
void for_each_trial(std::size_t trials, const std::function<void(std::size_t)>& body) {
  const int threads = thread_count();
  if (threads <= 1 || trials < 2) {
    for (std::size_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (trials + static_cast<std::size_t>(threads) - 1) /
                            static_cast<std::size_t>(threads);
  for (int w = 0; w < threads; ++w) {
    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
    const std::size_t hi = std::min(trials, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t t = lo; t < hi; ++t) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

struct Stats {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;
};

Stats summarize(const std::vector<double>& values) {
  Stats s;
  std::vector<double> valid;
  valid.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) valid.push_back(v);
  }
  s.count = valid.size();
  if (valid.empty()) return s;
  double sum = 0.0;
  for (double v : valid) sum += v;
  s.mean = sum / static_cast<double>(valid.size());
  if (valid.size() > 1) {
    double ss = 0.0;
    for (double v : valid) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(valid.size() - 1)) /
                  std::sqrt(static_cast<double>(valid.size()));
  } else {
    s.std_error = 0.0;
  }
  return s;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

FundamentalMatrix fundamental_from_cameras(const Eigen::Matrix<double, 3, 4>& p1,
                                           const Eigen::Matrix<double, 3, 4>& p2) {
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(p1, Eigen::ComputeFullV);
  const Eigen::Vector4d c1 = svd.matrixV().col(3);
  const Eigen::Vector3d e2 = p2 * c1;
  Eigen::Matrix3d ex;
  ex << 0, -e2(2), e2(1), e2(2), 0, -e2(0), -e2(1), e2(0), 0;
  const Eigen::Matrix<double, 4, 3> p1_pinv =
      p1.completeOrthogonalDecomposition().pseudoInverse();
  return FundamentalMatrix(ex * p2 * p1_pinv);
}

SyntheticScene generate_scene(std::uint64_t seed, double noise_sigma,
                              std::optional<double> baseline_ratio_percent) {
  if (noise_sigma < 0.0) {
    throw std::invalid_argument("generate_scene: noise_sigma must be >= 0");
  }
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    Rng geom(derive_seed(seed, 101 + attempt));
    std::uniform_real_distribution<double> uv(-kPlaneExtent, kPlaneExtent);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);

    const Eigen::Vector3d c1 = random_unit(geom) * kSphereRadius;
    Eigen::Vector3d c2;
    if (baseline_ratio_percent) {
      // chord of the requested length, staying on the sphere
      const double d = *baseline_ratio_percent / 100.0 * kSphereRadius;
      const double half = std::clamp(d / (2.0 * kSphereRadius), 0.0, 1.0);
      const double theta = 2.0 * std::asin(half);
      Eigen::Vector3d axis = random_unit(geom);
      axis = (axis - axis.dot(c1.normalized()) * c1.normalized()).normalized();
      c2 = Eigen::AngleAxisd(theta, axis) * c1;
    } else {
      c2 = random_unit(geom) * kSphereRadius;
    }
    const Eigen::Vector3d n = random_unit(geom);
    // clearance from grazing views: keeps the ground-truth affinities away
    // from the extreme-scale/shear regime and the recovery well conditioned
    if (std::abs(n.dot(c1)) < 3.5 || std::abs(n.dot(c2)) < 3.5) continue;
    if (n.dot(c1) * n.dot(c2) < 0.0) continue;  // same side keeps det(A) > 0
    if ((c1 - c2).norm() < 0.05) continue;

    const Eigen::Matrix<double, 3, 4> p1 = make_camera(c1);
    const Eigen::Matrix<double, 3, 4> p2 = make_camera(c2);
    const Eigen::Vector3d b1 = n.unitOrthogonal();
    const Eigen::Vector3d b2 = n.cross(b1);

    const auto plane_pair = [&](double s, double t) -> std::optional<PointPair> {
      const Eigen::Vector3d x = s * b1 + t * b2;
      const auto q1 = project(p1, x);
      const auto q2 = project(p2, x);
      if (!q1 || !q2) return std::nullopt;
      return PointPair{*q1, *q2};
    };

    // The defining quad spans a slightly wider patch than the
    // correspondences and is rejection-sampled to stay well conditioned,
    // otherwise the indirect noising through the four projections blows up.
    std::uniform_real_distribution<double> uv_def(-1.5 * kPlaneExtent, 1.5 * kPlaneExtent);
    bool bad = false;
    std::vector<PointPair> defining;
    {
      bool spread_ok = false;
      for (int redraw = 0; redraw < 100 && !spread_ok; ++redraw) {
        Eigen::Vector2d quad[4];
        for (auto& q : quad) q = {uv_def(geom), uv_def(geom)};
        spread_ok = true;
        for (int i = 0; i < 4 && spread_ok; ++i) {
          for (int j = i + 1; j < 4 && spread_ok; ++j) {
            if ((quad[i] - quad[j]).norm() < 0.75 * kPlaneExtent) spread_ok = false;
            for (int k = j + 1; k < 4 && spread_ok; ++k) {
              const Eigen::Vector2d ab = quad[j] - quad[i], ac = quad[k] - quad[i];
              if (std::abs(ab.x() * ac.y() - ab.y() * ac.x()) < 0.5 * kPlaneExtent * kPlaneExtent) {
                spread_ok = false;
              }
            }
          }
        }
        if (!spread_ok) continue;
        defining.clear();
        for (const auto& q : quad) {
          const auto pp = plane_pair(q.x(), q.y());
          if (!pp) {
            spread_ok = false;
            break;
          }
          defining.push_back(*pp);
        }
      }
      if (!spread_ok) continue;
    }
    std::vector<PointPair> exact;
    for (std::size_t i = 0; i < kScenePoints && !bad; ++i) {
      const auto pp = plane_pair(uv(geom), uv(geom));
      if (!pp) bad = true; else exact.push_back(*pp);
    }
    if (bad) continue;

    // Fixed noise layout, independent of sigma, so equal seeds stay
    // comparable across noise levels.
    Rng noise(derive_seed(seed, 501 + attempt));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::Vector4d> def_noise(4), corr_noise(kScenePoints);
    for (auto& v : def_noise) v = Eigen::Vector4d(gauss(noise), gauss(noise), gauss(noise), gauss(noise));
    for (auto& v : corr_noise) v = Eigen::Vector4d(gauss(noise), gauss(noise), gauss(noise), gauss(noise));
    std::vector<double> betas(kScenePoints);
    for (auto& b : betas) b = angle(noise);

    try {
      const Matrix3ld h_ld = dlt4_extended(defining);
      const Homography gt_h(h_ld.cast<double>());

      // ground-truth affinities from the extended-precision homography
      std::vector<AffineCorrespondence> gt_points;
      for (const PointPair& pp : exact) {
        const long double u1 = pp.p1.x(), v1 = pp.p1.y();
        const long double s = u1 * h_ld(2, 0) + v1 * h_ld(2, 1) + h_ld(2, 2);
        if (std::abs(static_cast<double>(s)) <= 1e-12) {
          throw DegenerateInputError("generate_scene: defining plane point at infinity");
        }
        const long double u2 = (u1 * h_ld(0, 0) + v1 * h_ld(0, 1) + h_ld(0, 2)) / s;
        const long double v2 = (u1 * h_ld(1, 0) + v1 * h_ld(1, 1) + h_ld(1, 2)) / s;
        AffineCorrespondence ac;
        ac.p1 = pp.p1;
        ac.p2 = pp.p2;  // keep the projected point; h maps onto it within numerics
        ac.a << static_cast<double>((h_ld(0, 0) - h_ld(2, 0) * u2) / s),
            static_cast<double>((h_ld(0, 1) - h_ld(2, 1) * u2) / s),
            static_cast<double>((h_ld(1, 0) - h_ld(2, 0) * v2) / s),
            static_cast<double>((h_ld(1, 1) - h_ld(2, 1) * v2) / s);
        gt_points.push_back(ac);
      }

      // the plane-compatible fundamental matrix [e2']x H; building it from
      // the same extended-precision homography keeps F and H consistent to
      // machine precision
      const Eigen::Matrix<long double, 3, 4> p2_ld = p2.cast<long double>();
      const Eigen::Matrix<long double, 3, 1> e2_ld =
          p2_ld * Eigen::Matrix<long double, 4, 1>(c1(0), c1(1), c1(2), 1.0L);
      Matrix3ld ex_ld;
      ex_ld << 0.0L, -e2_ld(2), e2_ld(1), e2_ld(2), 0.0L, -e2_ld(0), -e2_ld(1), e2_ld(0), 0.0L;
      Matrix3ld f_ld = ex_ld * h_ld;
      f_ld /= f_ld.norm();
      const FundamentalMatrix gt_f(f_ld.cast<double>());
      for (const PointPair& pp : exact) {
        const double r = std::abs(pp.p2.homogeneous().dot(gt_f.matrix() * pp.p1.homogeneous()));
        if (r > 1e-6) throw NumericalError("generate_scene: epipolar consistency violated");
      }

      Homography noisy_h = gt_h;
      if (noise_sigma > 0.0) {
        std::vector<PointPair> noisy_defining = defining;
        for (int i = 0; i < 4; ++i) {
          noisy_defining[static_cast<std::size_t>(i)].p1 += noise_sigma * def_noise[static_cast<std::size_t>(i)].head<2>();
          noisy_defining[static_cast<std::size_t>(i)].p2 += noise_sigma * def_noise[static_cast<std::size_t>(i)].tail<2>();
        }
        noisy_h = h_dlt(noisy_defining);
      }

      std::vector<SiftCorrespondence> sift;
      for (std::size_t i = 0; i < kScenePoints; ++i) {
        AffineCorrespondence observed =
            affine_from_homography(noisy_h, exact[i].p1 + noise_sigma * corr_noise[i].head<2>());
        observed.p2 = exact[i].p2 + noise_sigma * corr_noise[i].tail<2>();
        if (!(observed.a.determinant() > 0.0)) {
          throw DegenerateInputError("generate_scene: noise flipped the affine orientation");
        }
        // a feature orientation nearly aligned with the epipolar line makes
        // the shear unobservable (the recovery system loses rank); such
        // draws are degenerate and resampled
        const Eigen::Vector2d n2 =
            (gt_f.matrix() * observed.p1.homogeneous()).head<2>();
        double beta = betas[i];
        for (int redraw = 0; redraw < 64; ++redraw) {
          const double aligned =
              std::abs(n2.x() * std::cos(beta) + n2.y() * std::sin(beta));
          if (aligned >= 0.2 * n2.norm()) break;
          beta = angle(noise);
        }
        sift.push_back(simulate_sift_from_affine(observed, beta));
      }

      return SyntheticScene{p1,
                            p2,
                            Eigen::Vector4d(n(0), n(1), n(2), 0.0),
                            b1,
                            b2,
                            gt_h,
                            noisy_h,
                            gt_f,
                            std::move(gt_points),
                            std::move(sift),
                            noise_sigma};
    } catch (const NumericalError&) {
      continue;
    }
  }
  throw NumericalError("generate_scene: no non-degenerate draw within the retry budget");
}

std::vector<PointPair> sample_eval_points(const SyntheticScene& scene, std::size_t count,
                                          Rng& rng) {
  std::uniform_real_distribution<double> uv(-kPlaneExtent, kPlaneExtent);
  std::vector<PointPair> out;
  while (out.size() < count) {
    const Eigen::Vector3d x = uv(rng) * scene.plane_basis1 + uv(rng) * scene.plane_basis2;
    const auto q1 = project(scene.camera1, x);
    const auto q2 = project(scene.camera2, x);
    if (!q1 || !q2) continue;
    out.push_back({*q1, *q2});
  }
  return out;
}

Eigen::Matrix2d approx_affine(double alpha1, double alpha2, ApproximationVariant variant,
                              double q) {
  if (!(q > 0.0)) {
    throw std::invalid_argument("approx_affine: q must be positive");
  }
  const Eigen::Matrix2d d = q * Eigen::Matrix2d::Identity();
  switch (variant) {
    case ApproximationVariant::kRotTimesScale:
      return rotation2d(alpha2 - alpha1) * d;
    case ApproximationVariant::kRotScaleRot:
      return rotation2d(alpha2) * d * rotation2d(-alpha1);
  }
  throw std::invalid_argument("approx_affine: unknown variant");
}

std::vector<CurveRow> run_affine_error_experiment(std::span<const double> sigmas,
                                                  std::size_t trials, std::uint64_t seed) {
  if (trials < 1) {
    throw std::invalid_argument("run_affine_error_experiment: trials must be >= 1");
  }
  std::vector<CurveRow> rows;
  for (double sigma : sigmas) {
    std::vector<double> err_proposed(trials), err_rs(trials), err_rsr(trials);
    for_each_trial(trials, [&](std::size_t t) {
      const SyntheticScene scene = generate_scene(derive_seed(seed, t), sigma);
      double sum_p = 0.0, sum_rs = 0.0, sum_rsr = 0.0;
      std::size_t n_p = 0;
      for (std::size_t i = 0; i < scene.sift.size(); ++i) {
        const Eigen::Matrix2d& gt = scene.points[i].a;
        const SiftCorrespondence& s = scene.sift[i];
        // extreme-scale/shear candidates are discarded, as in the estimator
        const RecoveryResult rec = filter_candidates(recover_affine(scene.gt_f, s));
        if (!rec.candidates.empty()) {
          double best = std::numeric_limits<double>::infinity();
          for (const RecoveryCandidate& cand : rec.candidates) {
            best = std::min(best, (cand.ac.a - gt).norm());
          }
          sum_p += best;
          ++n_p;
        }
        const double a1 = s.first.orientation, a2 = s.second.orientation;
        const double q = s.relative_scale();
        sum_rs += (approx_affine(a1, a2, ApproximationVariant::kRotTimesScale, q) - gt).norm();
        sum_rsr += (approx_affine(a1, a2, ApproximationVariant::kRotScaleRot, q) - gt).norm();
      }
      const double n = static_cast<double>(scene.sift.size());
      err_proposed[t] = n_p > 0 ? sum_p / static_cast<double>(n_p)
                                : std::numeric_limits<double>::quiet_NaN();
      err_rs[t] = sum_rs / n;
      err_rsr[t] = sum_rsr / n;
    });
    const Stats sp = summarize(err_proposed);
    const Stats srs = summarize(err_rs);
    const Stats srsr = summarize(err_rsr);
    rows.push_back({sigma, "proposed", sp.mean, sp.std_error, sp.count});
    rows.push_back({sigma, "approx_rot_scale", srs.mean, srs.std_error, srs.count});
    rows.push_back({sigma, "approx_rot_scale_rot", srsr.mean, srsr.std_error, srsr.count});
  }
  return rows;
}

std::vector<HomographyCurveRow> run_homography_experiment(std::span<const double> sigmas,
                                                          std::size_t trials,
                                                          FEstimationMode f_mode,
                                                          std::span<const double> baseline_sweep,
                                                          std::uint64_t seed) {
  if (trials < 1) {
    throw std::invalid_argument("run_homography_experiment: trials must be >= 1");
  }
  struct Config {
    double sigma;
    std::optional<double> baseline;
  };
  std::vector<Config> configs;
  if (baseline_sweep.empty()) {
    for (double s : sigmas) configs.push_back({s, std::nullopt});
  } else {
    for (double b : baseline_sweep) configs.push_back({0.5, b});
  }

  std::vector<HomographyCurveRow> rows;
  for (const Config& cfg : configs) {
    std::vector<double> err_haf(trials, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> err_4pt(trials, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> err_3pt(trials, std::numeric_limits<double>::quiet_NaN());
    for_each_trial(trials, [&](std::size_t t) {
      const std::uint64_t trial_seed = derive_seed(seed, t);
      SyntheticScene scene = generate_scene(trial_seed, cfg.sigma, cfg.baseline);
      Rng rng(derive_seed(trial_seed, 31));

      std::optional<FundamentalMatrix> f_used;
      if (f_mode == FEstimationMode::kGroundTruth) {
        f_used = scene.gt_f;
      } else {
        std::vector<PointPair> noisy;
        for (const SiftCorrespondence& s : scene.sift) noisy.push_back({s.p1(), s.p2()});
        try {
          f_used = estimate_f_8pt(noisy);
        } catch (const NumericalError&) {
          return;  // skip the trial, F not estimable
        }
      }

      const std::vector<PointPair> eval_pts = sample_eval_points(scene, 10, rng);
      const auto mean_reproj = [&](const Homography& h) {
        double sum = 0.0;
        for (const PointPair& pp : eval_pts) sum += reprojection_error(h, pp);
        return sum / static_cast<double>(eval_pts.size());
      };
      std::uniform_int_distribution<std::size_t> pick(0, scene.sift.size() - 1);

      for (int attempt = 0; attempt < 10; ++attempt) {
        const std::size_t idx = pick(rng);
        try {
          const RecoveryResult rec =
              filter_candidates(recover_affine(*f_used, scene.sift[idx]));
          if (rec.candidates.empty()) continue;
          const Eigen::Matrix2d& gt = scene.points[idx].a;
          const RecoveryCandidate* best = &rec.candidates.front();
          for (const RecoveryCandidate& cand : rec.candidates) {
            if ((cand.ac.a - gt).norm() < (best->ac.a - gt).norm()) best = &cand;
          }
          err_haf[t] = mean_reproj(haf_from_ac(*f_used, best->ac));
          break;
        } catch (const NumericalError&) {
        }
      }

      const auto draw_distinct = [&](std::size_t k) {
        std::vector<std::size_t> idx;
        while (idx.size() < k) {
          const std::size_t i = pick(rng);
          if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
        }
        std::vector<PointPair> out;
        for (std::size_t i : idx) out.push_back({scene.sift[i].p1(), scene.sift[i].p2()});
        return out;
      };
      for (int attempt = 0; attempt < 20; ++attempt) {
        try {
          err_4pt[t] = mean_reproj(h_4pt(draw_distinct(4)));
          break;
        } catch (const NumericalError&) {
        }
      }
      for (int attempt = 0; attempt < 20; ++attempt) {
        try {
          err_3pt[t] = mean_reproj(h_3pt(*f_used, draw_distinct(3)));
          break;
        } catch (const NumericalError&) {
        }
      }
    });

    const std::string baseline = cfg.baseline ? format_g(*cfg.baseline) : "random";
    const Stats sh = summarize(err_haf);
    const Stats s4 = summarize(err_4pt);
    const Stats s3 = summarize(err_3pt);
    rows.push_back({cfg.sigma, baseline, "haf", sh.mean, sh.std_error, sh.count});
    rows.push_back({cfg.sigma, baseline, "4pt", s4.mean, s4.std_error, s4.count});
    rows.push_back({cfg.sigma, baseline, "3pt", s3.mean, s3.std_error, s3.count});
  }
  return rows;
}

std::string to_csv(const std::vector<CurveRow>& rows) {
  std::string out = "sigma,method,mean_error,std_error,trials\n";
  for (const CurveRow& r : rows) {
    out += format_g(r.sigma) + "," + r.method + "," + format_g(r.mean_error) + "," +
           format_g(r.std_error) + "," + std::to_string(r.trials) + "\n";
  }
  return out;
}

std::string to_csv(const std::vector<HomographyCurveRow>& rows) {
  std::string out = "sigma,baseline,method,mean_error,std_error,trials\n";
  for (const HomographyCurveRow& r : rows) {
    out += format_g(r.sigma) + "," + r.baseline + "," + r.method + "," +
           format_g(r.mean_error) + "," + format_g(r.std_error) + "," +
           std::to_string(r.trials) + "\n";
  }
  return out;
}

LabeledMatches make_labeled_matches(const SyntheticScene& scene, std::size_t inliers,
                                    std::size_t outliers, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 9001));
  std::uniform_real_distribution<double> uv(-kPlaneExtent, kPlaneExtent);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::normal_distribution<double> gauss(0.0, 1.0);

  LabeledMatches out;
  Eigen::Vector2d lo1(1e30, 1e30), hi1(-1e30, -1e30), lo2 = lo1, hi2 = hi1;

  while (out.matches.size() < inliers) {
    const Eigen::Vector3d x = uv(rng) * scene.plane_basis1 + uv(rng) * scene.plane_basis2;
    const auto q1 = project(scene.camera1, x);
    const auto q2 = project(scene.camera2, x);
    if (!q1 || !q2) continue;
    try {
      AffineCorrespondence observed = affine_from_homography(
          scene.noisy_h,
          *q1 + scene.noise_sigma * Eigen::Vector2d(gauss(rng), gauss(rng)));
      observed.p2 = *q2 + scene.noise_sigma * Eigen::Vector2d(gauss(rng), gauss(rng));
      if (!(observed.a.determinant() > 0.0)) continue;
      out.matches.push_back(simulate_sift_from_affine(observed, angle(rng)));
    } catch (const NumericalError&) {
      continue;
    }
    out.labels.push_back(0);
    lo1 = lo1.cwiseMin(out.matches.back().p1());
    hi1 = hi1.cwiseMax(out.matches.back().p1());
    lo2 = lo2.cwiseMin(out.matches.back().p2());
    hi2 = hi2.cwiseMax(out.matches.back().p2());
  }

  std::uniform_real_distribution<double> bx1(lo1.x(), hi1.x()), by1(lo1.y(), hi1.y());
  std::uniform_real_distribution<double> bx2(lo2.x(), hi2.x()), by2(lo2.y(), hi2.y());
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  for (std::size_t i = 0; i < outliers; ++i) {
    SiftCorrespondence s;
    s.first = {bx1(rng), by1(rng), 1.0, angle(rng)};
    s.second = {bx2(rng), by2(rng), scale(rng), angle(rng)};
    out.matches.push_back(s);
    out.labels.push_back(-1);
  }

  // qualities: negated ground-truth residual plus noise
  out.qualities.reserve(out.matches.size());
  for (const SiftCorrespondence& s : out.matches) {
    const double r = reprojection_error(scene.gt_h, {s.p1(), s.p2()});
    out.qualities.push_back(-std::min(r, 1e3) + 0.1 * gauss(rng));
  }

  // deterministic shuffle so the labels are not grouped
  std::vector<std::size_t> perm(out.matches.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  LabeledMatches shuffled;
  for (std::size_t i : perm) {
    shuffled.matches.push_back(out.matches[i]);
    shuffled.labels.push_back(out.labels[i]);
    shuffled.qualities.push_back(out.qualities[i]);
  }
  return shuffled;
}

}  // namespace affrec
