#include "affrec/robust.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace affrec {

SolverCombo SolverCombo::parse(std::string_view name) {
  SolverCombo c;
  if (name == "1S4P") {
    c = {MinimalSolver::kOneSift, RefitSolver::kFourPoint};
  } else if (name == "1S3P") {
    c = {MinimalSolver::kOneSift, RefitSolver::kThreePoint};
  } else if (name == "4P4P") {
    c = {MinimalSolver::kFourPoint, RefitSolver::kFourPoint};
  } else if (name == "4P3P") {
    c = {MinimalSolver::kFourPoint, RefitSolver::kThreePoint};
  } else if (name == "3P4P") {
    c = {MinimalSolver::kThreePoint, RefitSolver::kFourPoint};
  } else if (name == "3P3P") {
    c = {MinimalSolver::kThreePoint, RefitSolver::kThreePoint};
  } else {
    throw std::invalid_argument("unknown solver combo: " + std::string(name));
  }
  return c;
}

std::string SolverCombo::name() const {
  std::string out;
  switch (minimal) {
    case MinimalSolver::kOneSift: out = "1S"; break;
    case MinimalSolver::kFourPoint: out = "4P"; break;
    case MinimalSolver::kThreePoint: out = "3P"; break;
  }
  out += refit == RefitSolver::kFourPoint ? "4P" : "3P";
  return out;
}

int SolverCombo::minimal_size() const {
  switch (minimal) {
    case MinimalSolver::kOneSift: return 1;
    case MinimalSolver::kFourPoint: return 4;
    case MinimalSolver::kThreePoint: return 3;
  }
  return 0;
}

bool SolverCombo::needs_fundamental() const {
  return minimal == MinimalSolver::kOneSift || minimal == MinimalSolver::kThreePoint ||
         refit == RefitSolver::kThreePoint;
}

std::size_t required_iterations(double confidence, double inlier_ratio, int sample_size,
                                std::size_t cap) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("required_iterations: confidence must be in (0, 1)");
  }
  if (inlier_ratio < 0.0 || inlier_ratio > 1.0) {
    throw std::invalid_argument("required_iterations: inlier_ratio must be in [0, 1]");
  }
  if (inlier_ratio == 0.0) return cap;
  const double p_good = std::pow(inlier_ratio, sample_size);
  if (p_good >= 1.0) return 1;
  const double k = std::log1p(-confidence) / std::log1p(-p_good);
  if (!std::isfinite(k)) return cap;
  const double ck = std::ceil(k);
  if (ck <= 1.0) return 1;
  if (ck >= static_cast<double>(cap)) return cap;
  return static_cast<std::size_t>(ck);
}

ProsacOrder prosac_order(std::size_t n, std::span<const double> qualities) {
  ProsacOrder out;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  if (qualities.empty()) {
    out.qualities_missing = true;
    return out;
  }
  if (qualities.size() != n) {
    throw std::invalid_argument("prosac_order: qualities size mismatch");
  }
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return qualities[a] > qualities[b]; });
  return out;
}

std::vector<std::size_t> prosac_schedule(std::size_t n_total, int m, std::size_t t_total) {
  if (n_total < static_cast<std::size_t>(m) || m < 1) {
    throw std::invalid_argument("prosac_schedule: need n >= m >= 1");
  }
  // T_n = t_total * C(n, m) / C(n_total, m), via the standard recurrence
  // T_{n+1} = T_n * (n+1) / (n+1-m); T'_m = 1, T'_{n+1} = T'_n + ceil(T_{n+1} - T_n).
  double t_n = static_cast<double>(t_total);
  for (int i = 0; i < m; ++i) {
    t_n *= static_cast<double>(m - i) / static_cast<double>(n_total - static_cast<std::size_t>(i));
  }
  std::vector<std::size_t> schedule;
  schedule.reserve(n_total - static_cast<std::size_t>(m) + 1);
  schedule.push_back(1);
  double t_prev = t_n;
  for (std::size_t n = static_cast<std::size_t>(m); n < n_total; ++n) {
    const double t_next =
        t_prev * static_cast<double>(n + 1) / static_cast<double>(n + 1 - static_cast<std::size_t>(m));
    const double grow = std::ceil(t_next - t_prev);
    const double capped = std::min(grow, 1e18);
    schedule.push_back(schedule.back() + static_cast<std::size_t>(std::max(1.0, capped)));
    t_prev = t_next;
  }
  return schedule;
}

namespace {

// Progressive sampler: draws the newest point of the current prefix plus
// m-1 random earlier points; degrades to uniform sampling over all points
// once the schedule is exhausted.
class ProsacSampler {
 public:
  ProsacSampler(std::size_t n, int m, std::size_t t_total, std::vector<std::size_t> order)
      : n_(n), m_(static_cast<std::size_t>(m)), order_(std::move(order)),
        schedule_(prosac_schedule(n, m, t_total)), prefix_(m_) {}

  void next(Rng& rng, std::vector<std::size_t>& out) {
    ++t_;
    while (prefix_ < n_ && t_ > schedule_[prefix_ - m_]) ++prefix_;
    out.clear();
    const bool exhausted = prefix_ == n_ && t_ > schedule_[prefix_ - m_];
    const std::size_t pool = exhausted ? n_ : prefix_ - 1;
    if (!exhausted) out.push_back(order_[prefix_ - 1]);
    while (out.size() < m_) {
      std::uniform_int_distribution<std::size_t> dist(0, pool - 1);
      const std::size_t idx = order_[dist(rng)];
      if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
    }
  }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> schedule_;
  std::size_t prefix_;
  std::size_t t_ = 0;
};

double lo_threshold_multiplier(int round, int rounds) {
  if (rounds <= 1) return 1.0;
  return 3.0 - 2.0 * static_cast<double>(round) / static_cast<double>(rounds - 1);
}

template <typename Model, typename ResidualFn>
std::vector<std::size_t> inliers_of(const Model& model, std::size_t n, double threshold,
                                    const ResidualFn& residual) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (residual(model, i) <= threshold) out.push_back(i);
  }
  return out;
}

}  // namespace

RansacResult lo_ransac_homography(std::span<const SiftCorrespondence> corrs,
                                  const FundamentalMatrix* f, const RansacConfig& cfg,
                                  std::span<const double> qualities) {
  const int m = cfg.combo.minimal_size();
  if (corrs.size() < static_cast<std::size_t>(m)) {
    throw std::invalid_argument("lo_ransac_homography: fewer correspondences than sample size");
  }
  if (cfg.combo.needs_fundamental() && f == nullptr) {
    throw std::invalid_argument("lo_ransac_homography: combo requires a fundamental matrix");
  }
  const std::size_t n = corrs.size();

  std::vector<PointPair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) pairs[i] = {corrs[i].p1(), corrs[i].p2()};
  const auto residual = [&](const Homography& h, std::size_t i) {
    return reprojection_error(h, pairs[i]);
  };
  const auto collect_pairs = [&](std::span<const std::size_t> idx) {
    std::vector<PointPair> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(pairs[i]);
    return out;
  };
  const auto refit = [&](std::span<const std::size_t> idx) -> Homography {
    const std::vector<PointPair> sel = collect_pairs(idx);
    if (cfg.combo.refit == RefitSolver::kFourPoint) return h_dlt(sel);
    return h_fcompat_ls(*f, sel);
  };
  const std::size_t refit_min = cfg.combo.refit == RefitSolver::kFourPoint ? 4 : 3;

  RansacResult result;
  Rng rng(cfg.seed);
  ProsacSampler sampler(n, m, cfg.max_samples, prosac_order(n, qualities).order);

  std::size_t best_count = 0;
  std::size_t required = cfg.max_samples;
  // degenerate samples count toward samples_drawn but not toward the bound
  std::size_t valid_samples = 0;
  std::vector<std::size_t> sample;
  std::vector<Homography> hypotheses;

  const auto t0 = std::chrono::steady_clock::now();
  while (result.samples_drawn < cfg.max_samples && valid_samples < required) {
    sampler.next(rng, sample);
    ++result.samples_drawn;

    hypotheses.clear();
    try {
      switch (cfg.combo.minimal) {
        case MinimalSolver::kOneSift: {
          const RecoveryResult rec = recover_affine(*f, corrs[sample[0]]);
          for (const RecoveryCandidate& cand : rec.candidates) {
            try {
              hypotheses.push_back(haf_from_ac(*f, cand.ac));
            } catch (const NumericalError&) {
            }
            if (!cfg.score_all_candidates) break;
          }
          break;
        }
        case MinimalSolver::kFourPoint:
          hypotheses.push_back(h_4pt(collect_pairs(sample)));
          break;
        case MinimalSolver::kThreePoint:
          hypotheses.push_back(h_3pt(*f, collect_pairs(sample)));
          break;
      }
    } catch (const NumericalError&) {
      // degenerate sample: counts toward samples_drawn, produces no hypothesis
    }
    if (!hypotheses.empty()) ++valid_samples;

    bool improved = false;
    Homography* best_hypothesis = nullptr;
    std::size_t best_hyp_count = 0;
    for (Homography& h : hypotheses) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (residual(h, i) <= cfg.threshold) ++count;
      }
      if (cfg.record_hypotheses) result.hypothesis_inlier_counts.push_back(count);
      if (count > best_count && count > best_hyp_count) {
        best_hyp_count = count;
        best_hypothesis = &h;
        improved = true;
      }
    }

    if (improved) {
      best_count = best_hyp_count;
      result.model = *best_hypothesis;
      result.inliers = inliers_of(*best_hypothesis, n, cfg.threshold, residual);

      // local optimization: iterated refit with the threshold annealed 3x -> 1x
      ++result.lo_runs;
      Homography current = *best_hypothesis;
      for (int round = 0; round < cfg.lo_iterations; ++round) {
        const double mult = lo_threshold_multiplier(round, cfg.lo_iterations);
        const std::vector<std::size_t> in =
            inliers_of(current, n, cfg.threshold * mult, residual);
        if (in.size() < refit_min) break;
        try {
          current = refit(in);
        } catch (const NumericalError&) {
          break;
        }
        const std::vector<std::size_t> base_in =
            inliers_of(current, n, cfg.threshold, residual);
        if (cfg.record_hypotheses) result.hypothesis_inlier_counts.push_back(base_in.size());
        if (base_in.size() > best_count) {
          best_count = base_in.size();
          result.model = current;
          result.inliers = base_in;
        }
      }
    }

    if (best_count > 0) {
      const double ratio = static_cast<double>(best_count) / static_cast<double>(n);
      required = required_iterations(cfg.confidence, ratio, m, cfg.max_samples);
    }
  }
  result.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  if (best_count < static_cast<std::size_t>(m) + 1) {
    result.model.reset();
    result.inliers.clear();
  }
  return result;
}

FundamentalRansacResult lo_ransac_fundamental(std::span<const PointPair> corrs,
                                              const RansacConfig& cfg,
                                              std::span<const double> qualities) {
  constexpr int kSampleSize = 7;
  if (corrs.size() < kSampleSize) {
    throw std::invalid_argument("lo_ransac_fundamental: need at least 7 correspondences");
  }
  const std::size_t n = corrs.size();
  const auto residual = [&](const FundamentalMatrix& fm, std::size_t i) {
    return sampson_distance(fm, corrs[i].p1, corrs[i].p2);
  };
  const auto collect = [&](std::span<const std::size_t> idx) {
    std::vector<PointPair> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(corrs[i]);
    return out;
  };

  FundamentalRansacResult result;
  Rng rng(cfg.seed);
  ProsacSampler sampler(n, kSampleSize, cfg.max_samples, prosac_order(n, qualities).order);

  std::size_t best_count = 0;
  std::size_t required = cfg.max_samples;
  std::size_t valid_samples = 0;
  std::vector<std::size_t> sample;

  const auto t0 = std::chrono::steady_clock::now();
  while (result.samples_drawn < cfg.max_samples && valid_samples < required) {
    sampler.next(rng, sample);
    ++result.samples_drawn;

    std::vector<FundamentalMatrix> hypotheses;
    try {
      hypotheses = estimate_f_7pt(collect(sample));
    } catch (const NumericalError&) {
    }
    if (!hypotheses.empty()) ++valid_samples;

    for (const FundamentalMatrix& fm : hypotheses) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (residual(fm, i) <= cfg.threshold) ++count;
      }
      if (count <= best_count) continue;
      best_count = count;
      result.model = fm;
      result.inliers = inliers_of(fm, n, cfg.threshold, residual);

      ++result.lo_runs;
      FundamentalMatrix current = fm;
      for (int round = 0; round < cfg.lo_iterations; ++round) {
        const double mult = lo_threshold_multiplier(round, cfg.lo_iterations);
        const std::vector<std::size_t> in =
            inliers_of(current, n, cfg.threshold * mult, residual);
        if (in.size() < 8) break;
        try {
          current = estimate_f_8pt(collect(in));
        } catch (const NumericalError&) {
          break;
        }
        const std::vector<std::size_t> base_in =
            inliers_of(current, n, cfg.threshold, residual);
        if (base_in.size() > best_count) {
          best_count = base_in.size();
          result.model = current;
          result.inliers = base_in;
        }
      }
    }

    if (best_count > 0) {
      const double ratio = static_cast<double>(best_count) / static_cast<double>(n);
      required = required_iterations(cfg.confidence, ratio, kSampleSize, cfg.max_samples);
    }
  }
  result.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  if (best_count < kSampleSize + 1) {
    result.model.reset();
    result.inliers.clear();
  }
  return result;
}

}  // namespace affrec
