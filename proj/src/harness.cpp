#include "stereocal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "stereocal/essential.hpp"
#include "stereocal/rng.hpp"

namespace stereocal {

namespace {

void validate(const RunConfig& c, int n_images) {
  if (c.runs < 1) throw ConfigError("need at least one run");
  if (c.jobs < 1) throw ConfigError("need at least one job");
  if (c.calibration_images < 5) {
    throw ConfigError("calibration split needs at least 5 images");
  }
  if (c.validation_images < 1) {
    throw ConfigError("validation split needs at least 1 image");
  }
  if (c.calibration_images + c.validation_images > n_images) {
    throw ConfigError("split " + std::to_string(c.calibration_images) + ":" +
                      std::to_string(c.validation_images) + " does not fit a dataset of " +
                      std::to_string(n_images) + " images");
  }
}

std::string calibration_hash(const Dataset& dataset, std::span<const int> images,
                             Method method, const MonteCarloConfig& mc) {
  std::string text = serialize_dataset(dataset);
  text += "method," + method_name(method) + '\n';
  text += "mc," + std::to_string(mc.delta0) + ',' + std::to_string(mc.decay) + ',' +
          std::to_string(mc.acceptance_threshold) + ',' + std::to_string(mc.delta_min) + ',' +
          std::to_string(mc.min_level_iterations) + '\n';
  text += "images";
  for (const int i : images) text += ',' + std::to_string(i);
  text += '\n';
  return hex16(fnv1a64(text));
}

/// Shared essential stage: estimate on the selected correspondences and
/// decompose against the measured baseline.
ExtrinsicAngles essential_stage(const Dataset& dataset, const CorrespondenceSet2D& corr,
                                std::uint64_t seed) {
  EssentialEstimateOptions options;
  options.seed = seed;
  const EssentialMatrix e = estimate_essential(corr, dataset.k1, dataset.k2, options);
  const Extrinsics pose =
      decompose_essential(e, dataset.baseline, corr, dataset.k1, dataset.k2);
  ExtrinsicAngles angles = angles_from_pose(pose, GimbalPolicy::resolve);
  // |T| reproduces the baseline only up to rounding; pin the measured value
  // so every downstream path sees bit-identical angles.
  angles.baseline = dataset.baseline;
  return angles;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double percentile90(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = 0.9 * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

constexpr std::array<Method, 3> kMethods = {Method::essential, Method::min2d, Method::min3d};

/// Scores produced by one method in one run, already log-transformed.
struct RunScores {
  std::vector<double> residual_correct, residual_wrong;
  std::vector<double> reprojection_correct, reprojection_wrong;
  std::vector<double> pct;
};

struct RunOutput {
  bool failed = false;
  std::string failure;
  std::array<RunScores, 3> methods;
};

RunOutput evaluate_run(const Dataset& dataset, const RunConfig& config, int run) {
  RunOutput out;
  const std::uint64_t run_seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(run));
  const Split split = draw_split(dataset.n_images(), config.calibration_images,
                                 config.validation_images, derive_seed(run_seed, 0));

  std::array<CalibrationFile, 3> calibrations;
  try {
    calibrations = calibrate_all(dataset, split.calibration, config.mc, run_seed);
  } catch (const Error& e) {
    out.failed = true;
    out.failure = "run " + std::to_string(run) + ": " + e.what();
    return out;
  }

  const CorrespondenceSet2D correct = correspondences_2d(dataset, split.validation);
  const CorrespondenceSet2D wrong = build_wrong_set(dataset, split.validation);
  const CorrespondenceSet3D bars = correspondences_3d(dataset, split.validation);

  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    const Extrinsics pose = pose_from_angles(calibrations[m].angles);
    const EssentialMatrix e = calibrations[m].E;
    RunScores& scores = out.methods[m];

    const auto log_scores = [&](const CorrespondenceSet2D& corr, ScoreKind kind) {
      std::vector<double> raw =
          score_correspondences(corr, e, pose, dataset.k1, dataset.k2, kind);
      for (double& v : raw) v = log10_clamped(v);
      return raw;
    };
    scores.residual_correct = log_scores(correct, ScoreKind::residual);
    scores.residual_wrong = log_scores(wrong, ScoreKind::residual);
    scores.reprojection_correct = log_scores(correct, ScoreKind::reprojection);
    scores.reprojection_wrong = log_scores(wrong, ScoreKind::reprojection);
    scores.pct = percentage_errors(bars, pose, dataset.k1, dataset.k2);
  }
  return out;
}

}  // namespace

Split draw_split(int n_images, int calibration, int validation, std::uint64_t seed) {
  if (calibration + validation > n_images) {
    throw ConfigError("split does not fit the dataset");
  }
  std::vector<int> indices(static_cast<std::size_t>(n_images));
  std::iota(indices.begin(), indices.end(), 0);
  Rng rng(seed);
  for (int i = n_images - 1; i > 0; --i) {  // Fisher-Yates
    std::swap(indices[static_cast<std::size_t>(i)],
              indices[static_cast<std::size_t>(rng.next_index(i + 1))]);
  }
  Split split;
  split.calibration.assign(indices.begin(), indices.begin() + calibration);
  split.validation.assign(indices.begin() + calibration,
                          indices.begin() + calibration + validation);
  std::sort(split.calibration.begin(), split.calibration.end());
  std::sort(split.validation.begin(), split.validation.end());
  return split;
}

CalibrationFile calibrate_method(const Dataset& dataset, std::span<const int> images,
                                 Method method, const MonteCarloConfig& mc,
                                 std::uint64_t seed,
                                 const std::optional<ExtrinsicAngles>& init) {
  const CorrespondenceSet2D corr = correspondences_2d(dataset, images);

  ExtrinsicAngles angles;
  if (init) {
    if (method == Method::essential) {
      throw ConfigError("the essential method does not take an initial guess");
    }
    angles = *init;
    angles.baseline = dataset.baseline;  // the baseline is measured, not guessed
  } else {
    angles = essential_stage(dataset, corr, derive_seed(seed, 1));
  }

  if (method == Method::min2d) {
    MonteCarloConfig config = mc;
    config.seed = derive_seed(seed, 2);
    angles = minimize(
                 angles,
                 [&](const ExtrinsicAngles& a) {
                   return cost_reprojection(a, corr, dataset.k1, dataset.k2);
                 },
                 config)
                 .angles;
  } else if (method == Method::min3d) {
    const CorrespondenceSet3D bars = correspondences_3d(dataset, images);
    MonteCarloConfig config = mc;
    config.seed = derive_seed(seed, 3);
    angles = minimize(
                 angles,
                 [&](const ExtrinsicAngles& a) {
                   return cost_reconstruction(a, bars, dataset.k1, dataset.k2);
                 },
                 config)
                 .angles;
  }

  return make_calibration(method, angles, seed, calibration_hash(dataset, images, method, mc));
}

std::array<CalibrationFile, 3> calibrate_all(const Dataset& dataset,
                                             std::span<const int> images,
                                             const MonteCarloConfig& mc, std::uint64_t seed) {
  const CorrespondenceSet2D corr = correspondences_2d(dataset, images);
  const ExtrinsicAngles essential_angles =
      essential_stage(dataset, corr, derive_seed(seed, 1));

  std::array<CalibrationFile, 3> out;
  out[0] = make_calibration(Method::essential, essential_angles, seed,
                            calibration_hash(dataset, images, Method::essential, mc));
  // Seeding the refinements with the shared essential angles reproduces the
  // no-init calibrate_method path bit for bit: both derive the same MC seed.
  out[1] = calibrate_method(dataset, images, Method::min2d, mc, seed, essential_angles);
  out[2] = calibrate_method(dataset, images, Method::min3d, mc, seed, essential_angles);
  return out;
}

EvaluationReport run_evaluation(const Dataset& dataset, const RunConfig& config) {
  validate(config, dataset.n_images());

  std::vector<RunOutput> runs(static_cast<std::size_t>(config.runs));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (;;) {
      const int run = next.fetch_add(1);
      if (run >= config.runs) return;
      try {
        runs[static_cast<std::size_t>(run)] = evaluate_run(dataset, config, run);
      } catch (const std::exception& e) {
        runs[static_cast<std::size_t>(run)].failed = true;
        runs[static_cast<std::size_t>(run)].failure =
            "run " + std::to_string(run) + ": " + e.what();
      }
    }
  };
  if (config.jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(config.jobs));
    for (int j = 0; j < config.jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  EvaluationReport report;
  report.config = config;
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    report.methods[m].method = kMethods[m];
  }

  // Aggregate in run order so the report does not depend on scheduling.
  for (const RunOutput& run : runs) {
    if (run.failed) {
      ++report.runs_failed;
      report.failures.push_back(run.failure);
      continue;
    }
    ++report.runs_completed;
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
      MethodReport& agg = report.methods[m];
      const RunScores& scores = run.methods[m];
      const auto append = [](std::vector<double>& to, const std::vector<double>& from) {
        to.insert(to.end(), from.begin(), from.end());
      };
      append(agg.residual_scores.correct, scores.residual_correct);
      append(agg.residual_scores.wrong, scores.residual_wrong);
      append(agg.reprojection_scores.correct, scores.reprojection_correct);
      append(agg.reprojection_scores.wrong, scores.reprojection_wrong);
      append(agg.pct_errors, scores.pct);
    }
  }

  if (10 * report.runs_failed >= config.runs) {
    std::string detail = report.failures.empty() ? "" : ("; first: " + report.failures.front());
    throw TooManyFailures(std::to_string(report.runs_failed) + " of " +
                          std::to_string(config.runs) + " runs failed to calibrate" + detail);
  }

  for (MethodReport& m : report.methods) {
    m.fcp_residual = fcp(m.residual_scores);
    m.fcp_reprojection = fcp(m.reprojection_scores);
    m.pct_median = median(m.pct_errors);
    m.pct_p90 = percentile90(m.pct_errors);
  }

  double best_fcp = std::numeric_limits<double>::infinity();
  double best_pct = std::numeric_limits<double>::infinity();
  for (const MethodReport& m : report.methods) {
    if (m.fcp_residual < best_fcp) {
      best_fcp = m.fcp_residual;
      report.winner_matching = m.method;
      report.winner_matching_metric = ScoreKind::residual;
    }
    if (m.fcp_reprojection < best_fcp) {
      best_fcp = m.fcp_reprojection;
      report.winner_matching = m.method;
      report.winner_matching_metric = ScoreKind::reprojection;
    }
    if (m.pct_median < best_pct) {
      best_pct = m.pct_median;
      report.winner_reconstruction = m.method;
    }
  }
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_value_csv(const std::filesystem::path& path, const std::string& header,
                     const std::vector<double>& values) {
  std::string text = header + '\n';
  for (const double v : values) {
    text += fmt(v);
    text += '\n';
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
}

const char* kind_name(ScoreKind kind) {
  return kind == ScoreKind::residual ? "residual" : "reprojection";
}

}  // namespace

void write_report(const EvaluationReport& report, const std::string& dataset_label,
                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  std::string summary;
  summary += "stereocal evaluation summary\n";
  summary += "dataset," + dataset_label + '\n';
  summary += "runs_requested," + std::to_string(report.config.runs) + '\n';
  summary += "runs_completed," + std::to_string(report.runs_completed) + '\n';
  summary += "runs_failed," + std::to_string(report.runs_failed) + '\n';
  summary += "split," + std::to_string(report.config.calibration_images) + ':' +
             std::to_string(report.config.validation_images) + '\n';
  summary += "master_seed," + std::to_string(report.config.master_seed) + '\n';
  summary += "wrong_set,built per run; score samples pooled across runs\n";
  for (const MethodReport& m : report.methods) {
    summary += "fcp," + method_name(m.method) + ",residual," + fmt(m.fcp_residual) + '\n';
    summary +=
        "fcp," + method_name(m.method) + ",reprojection," + fmt(m.fcp_reprojection) + '\n';
  }
  for (const MethodReport& m : report.methods) {
    summary += "pct_median," + method_name(m.method) + ',' + fmt(m.pct_median) + '\n';
    summary += "pct_p90," + method_name(m.method) + ',' + fmt(m.pct_p90) + '\n';
  }
  summary += "winner_matching," + method_name(report.winner_matching) + ',' +
             kind_name(report.winner_matching_metric) + '\n';
  summary += "winner_reconstruction," + method_name(report.winner_reconstruction) + '\n';
  // The recommendation is the point of the exercise: one calibration tuned
  // for matching, a second one tuned for metric reconstruction.
  summary += "recommended_matching,min2d,calibration_min2d.txt\n";
  summary += "recommended_reconstruction,min3d,calibration_min3d.txt\n";
  for (const std::string& failure : report.failures) {
    summary += "failure," + failure + '\n';
  }
  {
    std::ofstream out(out_dir / "summary.txt", std::ios::binary);
    if (!out) throw Error("cannot write summary.txt");
    out << summary;
  }

  std::string table = "method,fcp_residual,fcp_reprojection\n";
  for (const MethodReport& m : report.methods) {
    table += method_name(m.method) + ',' + fmt(m.fcp_residual) + ',' +
             fmt(m.fcp_reprojection) + '\n';
  }
  {
    std::ofstream out(out_dir / "fcp_table.csv", std::ios::binary);
    if (!out) throw Error("cannot write fcp_table.csv");
    out << table;
  }

  for (const MethodReport& m : report.methods) {
    write_value_csv(out_dir / ("pct_errors_" + method_name(m.method) + ".csv"), "pct_error",
                    m.pct_errors);
    for (const ScoreKind kind : {ScoreKind::residual, ScoreKind::reprojection}) {
      const LabeledScores& scores =
          kind == ScoreKind::residual ? m.residual_scores : m.reprojection_scores;
      const std::string base =
          "scores_" + method_name(m.method) + "_" + kind_name(kind) + "_";
      write_value_csv(out_dir / (base + "correct.csv"), "log10_score", scores.correct);
      write_value_csv(out_dir / (base + "wrong.csv"), "log10_score", scores.wrong);
    }
  }
}

}  // namespace stereocal
