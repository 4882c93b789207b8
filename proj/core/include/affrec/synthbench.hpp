#pragma once

#include <optional>
#include <string>
#include <vector>

#include "affrec/homography.hpp"
#include "affrec/recovery.hpp"

namespace affrec {

// Two pinhole cameras on a radius-10 sphere looking at the origin, a plane
// with random normal through the origin, ten in-plane correspondences with
// ground-truth local affine transformations, and simulated detector output.
struct SyntheticScene {
  Eigen::Matrix<double, 3, 4> camera1;
  Eigen::Matrix<double, 3, 4> camera2;
  Eigen::Vector4d plane;  // (unit normal, 0)
  Eigen::Vector3d plane_basis1;
  Eigen::Vector3d plane_basis2;
  Homography gt_h;
  Homography noisy_h;  // from the noised defining points; equals gt_h at sigma 0
  FundamentalMatrix gt_f;
  std::vector<AffineCorrespondence> points;  // noise-free ground truth
  std::vector<SiftCorrespondence> sift;      // observed features
  double noise_sigma = 0.0;
};

// Deterministic scene generator. Identical seeds give bitwise-identical
// scenes; the noise layout is drawn independently of sigma so scenes with the
// same seed stay comparable across noise levels. baseline_ratio_percent, when
// given, fixes |C1 - C2| / |C1| * 100 while keeping both centers on the
// sphere.
SyntheticScene generate_scene(std::uint64_t seed, double noise_sigma,
                              std::optional<double> baseline_ratio_percent = std::nullopt);

FundamentalMatrix fundamental_from_cameras(const Eigen::Matrix<double, 3, 4>& p1,
                                           const Eigen::Matrix<double, 3, 4>& p2);

// Fresh exact in-plane correspondences (evaluation points).
std::vector<PointPair> sample_eval_points(const SyntheticScene& scene, std::size_t count,
                                          Rng& rng);

enum class ApproximationVariant {
  kRotTimesScale,  // R_{alpha2 - alpha1} * diag(q, q)
  kRotScaleRot,    // R_{alpha2} * diag(q, q) * R_{-alpha1}
};

Eigen::Matrix2d approx_affine(double alpha1, double alpha2, ApproximationVariant variant,
                              double q);

struct CurveRow {
  double sigma = 0.0;
  std::string method;
  double mean_error = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

// Frobenius error of the recovered affinities vs the two approximations,
// averaged per noise level. Methods: "proposed", "approx_rot_scale",
// "approx_rot_scale_rot".
std::vector<CurveRow> run_affine_error_experiment(std::span<const double> sigmas,
                                                  std::size_t trials, std::uint64_t seed);

enum class FEstimationMode { kGroundTruth, kEstimatedEightPoint };

struct HomographyCurveRow {
  double sigma = 0.0;
  std::string baseline;  // "random" or the requested ratio in percent
  std::string method;    // "haf", "4pt", "3pt"
  double mean_error = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

// Mean reprojection error of HAF vs the four- and three-point solvers on
// held-out in-plane points. When baseline_sweep is non-empty the noise is
// fixed at 0.5 px and the camera baseline is swept instead.
std::vector<HomographyCurveRow> run_homography_experiment(std::span<const double> sigmas,
                                                          std::size_t trials,
                                                          FEstimationMode f_mode,
                                                          std::span<const double> baseline_sweep,
                                                          std::uint64_t seed);

std::string to_csv(const std::vector<CurveRow>& rows);
std::string to_csv(const std::vector<HomographyCurveRow>& rows);

// Labeled match set for robust-estimation experiments: fresh in-plane
// inliers (label 0) mixed with uniform random outliers (label -1), with
// PROSAC qualities derived from the ground-truth residual plus noise.
struct LabeledMatches {
  std::vector<SiftCorrespondence> matches;
  std::vector<int> labels;
  std::vector<double> qualities;
};

LabeledMatches make_labeled_matches(const SyntheticScene& scene, std::size_t inliers,
                                    std::size_t outliers, std::uint64_t seed);

}  // namespace affrec
