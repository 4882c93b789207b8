#include "affrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

namespace affrec {

namespace {

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct Bbox {
  Eigen::Vector2d lo{1e300, 1e300};
  Eigen::Vector2d hi{-1e300, -1e300};
  void add(const Eigen::Vector2d& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
};

}  // namespace

EvalReport run_eval(const MatchFile& matches, const EvalConfig& cfg) {
  if (!matches.has_labels) {
    throw DataError("run_eval: the match file carries no plane labels");
  }
  if (matches.records.size() < 7) {
    throw DataError("run_eval: need at least 7 matches to estimate the epipolar geometry");
  }
  if (cfg.repeats < 1) {
    throw std::invalid_argument("run_eval: repeats must be >= 1");
  }

  const std::vector<SiftCorrespondence> corrs = matches.correspondences();
  const std::vector<PointPair> pairs = matches.point_pairs();
  const std::vector<double> qualities = matches.qualities();
  const std::size_t n = corrs.size();

  // step 1: epipolar geometry from all matches
  RansacConfig f_cfg;
  f_cfg.threshold = cfg.threshold;
  f_cfg.confidence = cfg.confidence;
  f_cfg.max_samples = cfg.max_samples;
  f_cfg.lo_iterations = cfg.lo_iterations;
  f_cfg.seed = derive_seed(cfg.seed, 0xF);
  const FundamentalRansacResult f_res = lo_ransac_fundamental(pairs, f_cfg, qualities);
  if (!f_res.success()) {
    throw DataError("run_eval: fundamental matrix estimation failed");
  }
  const FundamentalMatrix f = *f_res.model;

  // observed coordinate/scale/quality ranges for outlier replacement
  Bbox box1, box2;
  double scale_lo = 1e300, scale_hi = -1e300;
  double qual_lo = 0.0, qual_hi = 0.0;
  if (matches.has_quality) {
    qual_lo = *std::min_element(qualities.begin(), qualities.end());
    qual_hi = *std::max_element(qualities.begin(), qualities.end());
  }
  for (const SiftCorrespondence& c : corrs) {
    box1.add(c.p1());
    box2.add(c.p2());
    scale_lo = std::min({scale_lo, c.first.scale, c.second.scale});
    scale_hi = std::max({scale_hi, c.first.scale, c.second.scale});
  }

  std::set<int> labels;
  for (const MatchRecord& r : matches.records) {
    if (r.label >= 0) labels.insert(r.label);
  }

  EvalReport report;
  std::size_t plane_index = 0;
  for (int label : labels) {
    std::vector<std::size_t> plane_idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (matches.records[i].label == label) plane_idx.push_back(i);
    }

    EvalPlaneRow row;
    row.label = label;
    row.n_inliers = plane_idx.size();

    const std::size_t min_needed =
        std::max<std::size_t>(4, static_cast<std::size_t>(cfg.combo.minimal_size()));
    std::optional<Homography> gt_h;
    if (plane_idx.size() >= min_needed) {
      std::vector<PointPair> plane_pairs;
      for (std::size_t i : plane_idx) plane_pairs.push_back(pairs[i]);
      try {
        gt_h = h_dlt(plane_pairs);
      } catch (const NumericalError&) {
      }
    }
    if (!gt_h) {
      row.skipped = true;
      report.rows.push_back(row);
      ++plane_index;
      continue;
    }

    std::size_t found = 0;
    double err_sum = 0.0, samples_sum = 0.0, time_sum = 0.0;
    const std::uint64_t plane_seed = derive_seed(cfg.seed, 1 + plane_index);
    for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
      const std::uint64_t rep_seed = derive_seed(plane_seed, rep);
      Rng rng(derive_seed(rep_seed, 1));
      std::uniform_real_distribution<double> ux1(box1.lo.x(), box1.hi.x());
      std::uniform_real_distribution<double> uy1(box1.lo.y(), box1.hi.y());
      std::uniform_real_distribution<double> ux2(box2.lo.x(), box2.hi.x());
      std::uniform_real_distribution<double> uy2(box2.lo.y(), box2.hi.y());
      std::uniform_real_distribution<double> uscale(scale_lo, scale_hi);
      std::uniform_real_distribution<double> uangle(0.0, 2.0 * M_PI);
      std::uniform_real_distribution<double> uqual(qual_lo, qual_hi);

      // step 2a: out-of-plane rows become completely random correspondences
      std::vector<SiftCorrespondence> test_set = corrs;
      std::vector<double> test_qualities = qualities;
      for (std::size_t i = 0; i < n; ++i) {
        if (matches.records[i].label == label) continue;
        test_set[i].first = {ux1(rng), uy1(rng), uscale(rng), uangle(rng)};
        test_set[i].second = {ux2(rng), uy2(rng), uscale(rng), uangle(rng)};
        if (matches.has_quality) test_qualities[i] = uqual(rng);
      }

      RansacConfig r_cfg;
      r_cfg.threshold = cfg.threshold;
      r_cfg.confidence = cfg.confidence;
      r_cfg.max_samples = cfg.max_samples;
      r_cfg.lo_iterations = cfg.lo_iterations;
      r_cfg.combo = cfg.combo;
      r_cfg.seed = derive_seed(rep_seed, 2);
      const RansacResult res = lo_ransac_homography(test_set, &f, r_cfg, test_qualities);

      samples_sum += static_cast<double>(res.samples_drawn);
      time_sum += res.wall_time_ms;
      if (res.success()) {
        // step 2c: compare against the annotation-fit homography
        double err = 0.0;
        for (std::size_t i : plane_idx) err += reprojection_error(*res.model, pairs[i]);
        err /= static_cast<double>(plane_idx.size());
        if (err <= cfg.fn_threshold) {
          ++found;
          err_sum += err;
        }
      }
    }

    row.fn_percent =
        100.0 * static_cast<double>(cfg.repeats - found) / static_cast<double>(cfg.repeats);
    row.mean_error_px =
        found > 0 ? err_sum / static_cast<double>(found) : std::numeric_limits<double>::quiet_NaN();
    row.mean_samples = samples_sum / static_cast<double>(cfg.repeats);
    row.mean_time_ms = time_sum / static_cast<double>(cfg.repeats);
    report.rows.push_back(row);
    ++plane_index;
  }

  double fn_sum = 0.0, err_sum = 0.0, samples_sum = 0.0, time_sum = 0.0;
  std::size_t evaluated = 0, with_error = 0;
  for (const EvalPlaneRow& row : report.rows) {
    if (row.skipped) continue;
    ++evaluated;
    fn_sum += row.fn_percent;
    samples_sum += row.mean_samples;
    time_sum += row.mean_time_ms;
    if (std::isfinite(row.mean_error_px)) {
      err_sum += row.mean_error_px;
      ++with_error;
    }
  }
  report.planes_evaluated = evaluated;
  report.agg_fn_percent = evaluated > 0 ? fn_sum / static_cast<double>(evaluated)
                                        : std::numeric_limits<double>::quiet_NaN();
  report.agg_error_px = with_error > 0 ? err_sum / static_cast<double>(with_error)
                                       : std::numeric_limits<double>::quiet_NaN();
  report.agg_samples = evaluated > 0 ? samples_sum / static_cast<double>(evaluated)
                                     : std::numeric_limits<double>::quiet_NaN();
  report.agg_time_ms = evaluated > 0 ? time_sum / static_cast<double>(evaluated)
                                     : std::numeric_limits<double>::quiet_NaN();
  report.f_inliers = f_res.inliers.size();
  report.f_samples = f_res.samples_drawn;
  return report;
}

std::string eval_report_to_csv(const EvalReport& report) {
  std::string out = "plane,label,n_inliers,status,fn_percent,mean_error_px,mean_samples\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const EvalPlaneRow& r = report.rows[i];
    out += std::to_string(i) + "," + std::to_string(r.label) + "," +
           std::to_string(r.n_inliers) + ",";
    if (r.skipped) {
      out += "skipped,,,\n";
      continue;
    }
    out += "ok," + format_g(r.fn_percent) + "," + format_g(r.mean_error_px) + "," +
           format_g(r.mean_samples) + "\n";
  }
  out += "aggregate,,,," + format_g(report.agg_fn_percent) + "," +
         format_g(report.agg_error_px) + "," + format_g(report.agg_samples) + "\n";
  return out;
}

}  // namespace affrec
