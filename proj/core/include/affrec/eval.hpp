#pragma once

#include <string>
#include <vector>

#include "affrec/match_io.hpp"
#include "affrec/robust.hpp"

namespace affrec {

// Per-plane evaluation protocol for labeled match files: a fundamental matrix
// is estimated from all matches, then each labeled plane is evaluated with
// the chosen solver combination against a ground-truth homography fit to its
// labeled inliers, averaging over seeded repeats.
struct EvalConfig {
  SolverCombo combo{};
  double confidence = 0.95;
  double threshold = 2.0;     // px, inlier-outlier
  double fn_threshold = 10.0; // px, "homography not found" rule
  std::size_t repeats = 100;
  std::uint64_t seed = 0;
  std::size_t max_samples = 50000;
  int lo_iterations = 4;
};

struct EvalPlaneRow {
  int label = 0;
  std::size_t n_inliers = 0;
  bool skipped = false;        // too few labeled inliers to evaluate
  double fn_percent = 0.0;     // repeats where the homography was not found, in %
  double mean_error_px = 0.0;  // mean reprojection error over found repeats
  double mean_samples = 0.0;
  double mean_time_ms = 0.0;   // reported through the manifest, not the CSV
};

struct EvalReport {
  std::vector<EvalPlaneRow> rows;
  double agg_fn_percent = 0.0;
  double agg_error_px = 0.0;
  double agg_samples = 0.0;
  double agg_time_ms = 0.0;
  std::size_t planes_evaluated = 0;
  std::size_t f_inliers = 0;
  std::size_t f_samples = 0;
};

EvalReport run_eval(const MatchFile& matches, const EvalConfig& cfg);

// Deterministic CSV rendering of the report (wall-clock timings excluded;
// identical seeds give identical bytes).
std::string eval_report_to_csv(const EvalReport& report);

}  // namespace affrec
