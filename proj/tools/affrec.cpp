// affrec: recover affine correspondences from scale/orientation features with
// a known fundamental matrix, estimate homographies from them, and drive the
// synthetic and labeled-data experiment protocols.

#include <CLI11.hpp>
#include <json.hpp>

#include <affrec/eval.hpp>
#include <affrec/match_io.hpp>
#include <affrec/robust.hpp>
#include <affrec/synthbench.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

using json = nlohmann::ordered_json;
using namespace affrec;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write: " + path);
  out << content;
}

void write_manifest(const std::string& out_path, const std::string& subcommand, json config,
                    json extra = json::object()) {
  json m;
  m["tool"] = "affrec";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["config"] = std::move(config);
  for (auto& [k, v] : extra.items()) m[k] = v;
  std::ofstream out(out_path + ".manifest.json");
  if (!out) throw DataError("cannot write manifest: " + out_path + ".manifest.json");
  out << m.dump(2) << "\n";
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

struct RecoverOptions {
  std::string matches_path;
  std::string f_path;
  std::string out_path;
  double max_scale = 10.0;
  double max_shear = 5.0;
  bool degrees = false;
  bool as_json = false;
  bool no_filter = false;
};

int run_recover(const RecoverOptions& opt) {
  const MatchFile mf = parse_match_file(opt.matches_path, opt.degrees);
  const FundamentalMatrix f = read_f_file(opt.f_path);

  std::vector<double> runtimes_ms;
  runtimes_ms.reserve(mf.records.size());

  json records = json::array();
  std::string csv = "row,candidate,a1,a2,a3,a4,q_u,q_v,w,consistency_residual,degeneracy\n";
  for (std::size_t row = 0; row < mf.records.size(); ++row) {
    const SiftCorrespondence& corr = mf.records[row].corr;
    const auto t0 = std::chrono::steady_clock::now();
    RecoveryResult rec = recover_affine(f, corr);
    if (!opt.no_filter) rec = filter_candidates(rec, opt.max_scale, opt.max_shear);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    runtimes_ms.push_back(ms);

    json jrec;
    jrec["row"] = row;
    jrec["degeneracy"] = to_string(rec.degeneracy);
    jrec["runtime_ms"] = ms;
    jrec["candidates"] = json::array();
    if (rec.candidates.empty()) {
      csv += std::to_string(row) + ",-1,,,,,,,,," + to_string(rec.degeneracy) + "\n";
    }
    for (std::size_t k = 0; k < rec.candidates.size(); ++k) {
      const RecoveryCandidate& cand = rec.candidates[k];
      const double residual = af_consistency_residual(f, cand.ac);
      csv += std::to_string(row) + "," + std::to_string(k) + "," +
             format_g(cand.ac.a(0, 0)) + "," + format_g(cand.ac.a(0, 1)) + "," +
             format_g(cand.ac.a(1, 0)) + "," + format_g(cand.ac.a(1, 1)) + "," +
             format_g(cand.components.q_u) + "," + format_g(cand.components.q_v) + "," +
             format_g(cand.components.w) + "," + format_g(residual) + "," +
             to_string(rec.degeneracy) + "\n";
      json jc;
      jc["a"] = {cand.ac.a(0, 0), cand.ac.a(0, 1), cand.ac.a(1, 0), cand.ac.a(1, 1)};
      jc["q_u"] = cand.components.q_u;
      jc["q_v"] = cand.components.q_v;
      jc["w"] = cand.components.w;
      jc["consistency_residual"] = residual;
      jrec["candidates"].push_back(jc);
    }
    records.push_back(jrec);
  }

  if (opt.as_json) {
    write_text(opt.out_path, json(records).dump(2) + "\n");
  } else {
    write_text(opt.out_path, csv);
  }

  json cfg;
  cfg["matches"] = opt.matches_path;
  cfg["f"] = opt.f_path;
  cfg["max_scale"] = opt.max_scale;
  cfg["max_shear"] = opt.max_shear;
  cfg["degrees"] = opt.degrees;
  cfg["json"] = opt.as_json;
  cfg["filter"] = !opt.no_filter;
  json timing;
  timing["rows"] = runtimes_ms.size();
  timing["row_runtime_ms_median"] = median(runtimes_ms);
  double total = 0.0;
  for (double t : runtimes_ms) total += t;
  timing["row_runtime_ms_mean"] = runtimes_ms.empty() ? 0.0 : total / runtimes_ms.size();
  write_manifest(opt.out_path, "recover", cfg, json{{"timing", timing}});
  return 0;
}

struct HomographyOptions {
  std::string matches_path;
  std::string f_path;
  std::string solver = "haf";
  std::string out_path;
  bool degrees = false;
};

int run_homography(const HomographyOptions& opt) {
  const MatchFile mf = parse_match_file(opt.matches_path, opt.degrees);
  const std::vector<PointPair> pairs = mf.point_pairs();
  std::string out;

  if (opt.solver == "4pt") {
    if (pairs.size() < 4) throw DataError("homography: need at least 4 rows for 4pt");
    const Homography h = h_4pt(std::span(pairs).subspan(0, 4));
    out = "# h (row-major)\n";
    for (int r = 0; r < 3; ++r)
      out += format_g(h(r, 0)) + " " + format_g(h(r, 1)) + " " + format_g(h(r, 2)) + "\n";
  } else if (opt.solver == "3pt" || opt.solver == "haf") {
    if (opt.f_path.empty()) throw CLI::ValidationError("--f is required for " + opt.solver);
    const FundamentalMatrix f = read_f_file(opt.f_path);
    if (opt.solver == "3pt") {
      if (pairs.size() < 3) throw DataError("homography: need at least 3 rows for 3pt");
      const Homography h = h_3pt(f, std::span(pairs).subspan(0, 3));
      out = "# h (row-major)\n";
      for (int r = 0; r < 3; ++r)
        out += format_g(h(r, 0)) + " " + format_g(h(r, 1)) + " " + format_g(h(r, 2)) + "\n";
    } else {
      if (mf.records.empty()) throw DataError("homography: empty match file");
      const RecoveryResult rec = recover_affine(f, mf.records[0].corr);
      if (rec.candidates.empty()) {
        throw NumericalError(std::string("homography: recovery failed (") +
                             to_string(rec.degeneracy) + ")");
      }
      for (std::size_t k = 0; k < rec.candidates.size(); ++k) {
        const Homography h = haf_from_ac(f, rec.candidates[k].ac);
        out += "# candidate " + std::to_string(k) + "\n";
        for (int r = 0; r < 3; ++r)
          out += format_g(h(r, 0)) + " " + format_g(h(r, 1)) + " " + format_g(h(r, 2)) + "\n";
      }
    }
  } else {
    throw CLI::ValidationError("unknown solver: " + opt.solver);
  }

  if (opt.out_path.empty()) {
    std::cout << out;
  } else {
    write_text(opt.out_path, out);
    json cfg;
    cfg["matches"] = opt.matches_path;
    cfg["solver"] = opt.solver;
    cfg["f"] = opt.f_path;
    cfg["degrees"] = opt.degrees;
    write_manifest(opt.out_path, "homography", cfg);
  }
  return 0;
}

struct FundamentalOptions {
  std::string matches_path;
  std::string method = "ransac";
  std::string out_path;
  double threshold = 2.0;
  double confidence = 0.99;
  std::uint64_t seed = 0;
  std::size_t max_samples = 50000;
  bool degrees = false;
};

int run_fundamental(const FundamentalOptions& opt) {
  const MatchFile mf = parse_match_file(opt.matches_path, opt.degrees);
  const std::vector<PointPair> pairs = mf.point_pairs();
  std::string out;
  json extra;

  if (opt.method == "8pt") {
    out = f_matrix_to_string(estimate_f_8pt(pairs));
  } else if (opt.method == "7pt") {
    const std::vector<FundamentalMatrix> cands = estimate_f_7pt(pairs);
    for (std::size_t k = 0; k < cands.size(); ++k) {
      out += "# candidate " + std::to_string(k) + "\n" + f_matrix_to_string(cands[k]);
    }
  } else if (opt.method == "ransac") {
    RansacConfig cfg;
    cfg.threshold = opt.threshold;
    cfg.confidence = opt.confidence;
    cfg.seed = opt.seed;
    cfg.max_samples = opt.max_samples;
    const FundamentalRansacResult res = lo_ransac_fundamental(pairs, cfg, mf.qualities());
    if (!res.success()) throw NumericalError("fundamental: no consensus model found");
    out = "# inliers " + std::to_string(res.inliers.size()) + " / " +
          std::to_string(pairs.size()) + ", samples " + std::to_string(res.samples_drawn) +
          "\n" + f_matrix_to_string(*res.model);
    extra["inliers"] = res.inliers.size();
    extra["samples"] = res.samples_drawn;
    extra["wall_time_ms"] = res.wall_time_ms;
  } else {
    throw CLI::ValidationError("unknown method: " + opt.method);
  }

  if (opt.out_path.empty()) {
    std::cout << out;
  } else {
    write_text(opt.out_path, out);
    json cfg;
    cfg["matches"] = opt.matches_path;
    cfg["method"] = opt.method;
    cfg["threshold"] = opt.threshold;
    cfg["confidence"] = opt.confidence;
    cfg["seed"] = opt.seed;
    cfg["max_samples"] = opt.max_samples;
    cfg["degrees"] = opt.degrees;
    write_manifest(opt.out_path, "fundamental", cfg, json{{"result", extra}});
  }
  return 0;
}

struct SynthOptions {
  std::string experiment = "affine";
  std::vector<double> sigmas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> baseline_sweep;
  std::size_t trials = 1000;
  std::string f_mode = "gt";
  std::uint64_t seed = 0;
  std::string out_path;
};

int run_synth(const SynthOptions& opt) {
  if (opt.trials == 0) throw CLI::ValidationError("--trials must be positive");
  std::string csv;
  const auto t0 = std::chrono::steady_clock::now();
  if (opt.experiment == "affine") {
    csv = to_csv(run_affine_error_experiment(opt.sigmas, opt.trials, opt.seed));
  } else if (opt.experiment == "homography") {
    FEstimationMode mode;
    if (opt.f_mode == "gt") {
      mode = FEstimationMode::kGroundTruth;
    } else if (opt.f_mode == "8pt") {
      mode = FEstimationMode::kEstimatedEightPoint;
    } else {
      throw CLI::ValidationError("unknown --f-mode: " + opt.f_mode);
    }
    csv = to_csv(
        run_homography_experiment(opt.sigmas, opt.trials, mode, opt.baseline_sweep, opt.seed));
  } else {
    throw CLI::ValidationError("unknown experiment: " + opt.experiment);
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  write_text(opt.out_path, csv);
  json cfg;
  cfg["experiment"] = opt.experiment;
  cfg["sigmas"] = opt.sigmas;
  cfg["baseline_sweep"] = opt.baseline_sweep;
  cfg["trials"] = opt.trials;
  cfg["f_mode"] = opt.f_mode;
  cfg["seed"] = opt.seed;
  write_manifest(opt.out_path, "synth", cfg, json{{"timing", {{"total_ms", ms}}}});
  return 0;
}

struct EvalOptions {
  std::string matches_path;
  std::string combo = "1S4P";
  double confidence = 0.95;
  double threshold = 2.0;
  double fn_threshold = 10.0;
  std::size_t repeats = 100;
  std::uint64_t seed = 0;
  std::size_t max_samples = 50000;
  std::string out_path;
  bool degrees = false;
};

int run_eval_cmd(const EvalOptions& opt) {
  const MatchFile mf = parse_match_file(opt.matches_path, opt.degrees);
  EvalConfig cfg;
  cfg.combo = SolverCombo::parse(opt.combo);
  cfg.confidence = opt.confidence;
  cfg.threshold = opt.threshold;
  cfg.fn_threshold = opt.fn_threshold;
  cfg.repeats = opt.repeats;
  cfg.seed = opt.seed;
  cfg.max_samples = opt.max_samples;

  const EvalReport report = run_eval(mf, cfg);
  write_text(opt.out_path, eval_report_to_csv(report));

  json jcfg;
  jcfg["matches"] = opt.matches_path;
  jcfg["combo"] = opt.combo;
  jcfg["confidence"] = opt.confidence;
  jcfg["threshold"] = opt.threshold;
  jcfg["fn_threshold"] = opt.fn_threshold;
  jcfg["repeats"] = opt.repeats;
  jcfg["seed"] = opt.seed;
  jcfg["max_samples"] = opt.max_samples;
  jcfg["degrees"] = opt.degrees;
  json timing = json::array();
  for (const EvalPlaneRow& row : report.rows) {
    timing.push_back({{"label", row.label},
                      {"skipped", row.skipped},
                      {"mean_time_ms", row.mean_time_ms}});
  }
  json extra;
  extra["timing"] = {{"per_plane", timing}, {"aggregate_mean_time_ms", report.agg_time_ms}};
  extra["f_inliers"] = report.f_inliers;
  extra["f_samples"] = report.f_samples;
  write_manifest(opt.out_path, "eval", jcfg, extra);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-view affine correspondence recovery and homography estimation"};
  app.require_subcommand(1);

  RecoverOptions rec;
  CLI::App* cmd_recover = app.add_subcommand(
      "recover", "recover affine correspondences from a match file and a known F");
  cmd_recover->add_option("matches", rec.matches_path, "match file")->required();
  cmd_recover->add_option("--f", rec.f_path, "fundamental matrix file")->required();
  cmd_recover->add_option("--out", rec.out_path, "output path (CSV, or JSON with --json)")
      ->required();
  cmd_recover->add_option("--max-scale", rec.max_scale, "anisotropy filter bound");
  cmd_recover->add_option("--max-shear", rec.max_shear, "shear filter bound");
  cmd_recover->add_flag("--degrees", rec.degrees, "orientations are in degrees");
  cmd_recover->add_flag("--json", rec.as_json, "write JSON records (includes per-row runtime)");
  cmd_recover->add_flag("--no-filter", rec.no_filter, "keep extreme candidates");

  HomographyOptions hom;
  CLI::App* cmd_homography =
      app.add_subcommand("homography", "single-shot homography solvers on a match file");
  cmd_homography->add_option("matches", hom.matches_path, "match file")->required();
  cmd_homography->add_option("--solver", hom.solver, "haf | 4pt | 3pt");
  cmd_homography->add_option("--f", hom.f_path, "fundamental matrix file (haf, 3pt)");
  cmd_homography->add_option("--out", hom.out_path, "output path (stdout when omitted)");
  cmd_homography->add_flag("--degrees", hom.degrees, "orientations are in degrees");

  FundamentalOptions fun;
  CLI::App* cmd_fundamental =
      app.add_subcommand("fundamental", "fundamental matrix estimation (8pt, 7pt, LO-RANSAC)");
  cmd_fundamental->add_option("matches", fun.matches_path, "match file")->required();
  cmd_fundamental->add_option("--method", fun.method, "8pt | 7pt | ransac");
  cmd_fundamental->add_option("--threshold", fun.threshold, "inlier threshold (px)");
  cmd_fundamental->add_option("--confidence", fun.confidence, "RANSAC confidence");
  cmd_fundamental->add_option("--seed", fun.seed, "RNG seed");
  cmd_fundamental->add_option("--max-samples", fun.max_samples, "sample cap");
  cmd_fundamental->add_option("--out", fun.out_path, "output path (stdout when omitted)");
  cmd_fundamental->add_flag("--degrees", fun.degrees, "orientations are in degrees");

  SynthOptions syn;
  CLI::App* cmd_synth = app.add_subcommand("synth", "synthetic two-view experiments");
  cmd_synth->add_option("--experiment", syn.experiment, "affine | homography");
  cmd_synth->add_option("--sigmas", syn.sigmas, "noise levels (px)")->delimiter(',');
  cmd_synth->add_option("--baseline-sweep", syn.baseline_sweep,
                        "baseline ratios in percent (homography experiment)")
      ->delimiter(',');
  cmd_synth->add_option("--trials", syn.trials, "trials per configuration");
  cmd_synth->add_option("--f-mode", syn.f_mode, "gt | 8pt");
  cmd_synth->add_option("--seed", syn.seed, "RNG seed");
  cmd_synth->add_option("--out", syn.out_path, "output CSV path")->required();

  EvalOptions ev;
  CLI::App* cmd_eval =
      app.add_subcommand("eval", "per-plane robust estimation protocol on labeled matches");
  cmd_eval->add_option("matches", ev.matches_path, "labeled match file")->required();
  cmd_eval->add_option("--combo", ev.combo, "1S4P | 1S3P | 4P4P | 4P3P | 3P4P | 3P3P");
  cmd_eval->add_option("--confidence", ev.confidence, "RANSAC confidence (0.95 or 0.99)");
  cmd_eval->add_option("--threshold", ev.threshold, "inlier threshold (px)");
  cmd_eval->add_option("--fn-threshold", ev.fn_threshold, "not-found reprojection bound (px)");
  cmd_eval->add_option("--repeats", ev.repeats, "repeats per plane");
  cmd_eval->add_option("--seed", ev.seed, "RNG seed");
  cmd_eval->add_option("--max-samples", ev.max_samples, "sample cap");
  cmd_eval->add_option("--out", ev.out_path, "output CSV path")->required();
  cmd_eval->add_flag("--degrees", ev.degrees, "orientations are in degrees");

  try {
    app.parse(argc, argv);
    if (cmd_recover->parsed()) return run_recover(rec);
    if (cmd_homography->parsed()) return run_homography(hom);
    if (cmd_fundamental->parsed()) return run_fundamental(fun);
    if (cmd_synth->parsed()) return run_synth(syn);
    if (cmd_eval->parsed()) return run_eval_cmd(ev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
