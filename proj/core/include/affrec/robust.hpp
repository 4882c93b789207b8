#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "affrec/homography.hpp"
#include "affrec/recovery.hpp"

namespace affrec {

enum class MinimalSolver { kOneSift, kFourPoint, kThreePoint };
enum class RefitSolver { kFourPoint, kThreePoint };

// One of the six minimal/least-squares pairings: 1S4P, 1S3P, 4P4P, 4P3P,
// 3P4P, 3P3P.
struct SolverCombo {
  MinimalSolver minimal = MinimalSolver::kOneSift;
  RefitSolver refit = RefitSolver::kFourPoint;

  static SolverCombo parse(std::string_view name);
  std::string name() const;
  int minimal_size() const;
  bool needs_fundamental() const;
};

struct RansacConfig {
  double threshold = 2.0;  // px
  double confidence = 0.99;
  std::size_t max_samples = 50000;
  std::uint64_t seed = 0;
  int lo_iterations = 4;  // refit rounds, threshold annealed from 3x to 1x
  SolverCombo combo{};
  bool score_all_candidates = true;  // score every real recovery candidate
  bool record_hypotheses = false;    // fill hypothesis_inlier_counts
};

struct RansacResult {
  std::optional<Homography> model;
  std::vector<std::size_t> inliers;  // ascending indices
  std::size_t samples_drawn = 0;
  double wall_time_ms = 0.0;
  std::size_t lo_runs = 0;
  std::vector<std::size_t> hypothesis_inlier_counts;  // only when recorded

  bool success() const { return model.has_value(); }
};

// ceil(log(1-confidence) / log(1 - inlier_ratio^sample_size)), capped.
std::size_t required_iterations(double confidence, double inlier_ratio, int sample_size,
                                std::size_t cap);

struct ProsacOrder {
  std::vector<std::size_t> order;   // indices sorted by descending quality (stable)
  bool qualities_missing = false;   // identity order, uniform-over-prefix semantics
};

ProsacOrder prosac_order(std::size_t n, std::span<const double> qualities);

// T'_n for n in [m, n_total]; entry k of the result is T'_{m+k}.
std::vector<std::size_t> prosac_schedule(std::size_t n_total, int m, std::size_t t_total);

// Locally optimized RANSAC over SIFT correspondences. `f` is required for
// combos that involve the one-correspondence or three-point solver.
RansacResult lo_ransac_homography(std::span<const SiftCorrespondence> corrs,
                                  const FundamentalMatrix* f, const RansacConfig& cfg,
                                  std::span<const double> qualities = {});

struct FundamentalRansacResult {
  std::optional<FundamentalMatrix> model;
  std::vector<std::size_t> inliers;
  std::size_t samples_drawn = 0;
  double wall_time_ms = 0.0;
  std::size_t lo_runs = 0;

  bool success() const { return model.has_value(); }
};

// Fundamental matrix by LO-RANSAC: seven-point minimal solver, normalized
// eight-point least-squares refit, Sampson distance residual.
FundamentalRansacResult lo_ransac_fundamental(std::span<const PointPair> corrs,
                                              const RansacConfig& cfg,
                                              std::span<const double> qualities = {});

}  // namespace affrec
