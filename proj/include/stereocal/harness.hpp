#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stereocal/evaluation.hpp"
#include "stereocal/io.hpp"
#include "stereocal/montecarlo.hpp"
#include "stereocal/scene.hpp"

namespace stereocal {

/// More than 10% of evaluation runs failed to calibrate.
class TooManyFailures : public Error {
 public:
  using Error::Error;
};

/// Parameters of the repeated-split evaluation protocol.
struct RunConfig {
  int runs = 100;
  int calibration_images = 20;
  int validation_images = 5;
  std::uint64_t master_seed = 0;
  MonteCarloConfig mc;
  int jobs = 1;
};

/// Pooled outcome of one method across all completed runs.
struct MethodReport {
  Method method = Method::essential;
  LabeledScores residual_scores;      ///< log10, pooled across runs
  LabeledScores reprojection_scores;  ///< log10, pooled across runs
  std::vector<double> pct_errors;     ///< pooled validation bar-length errors
  double fcp_residual = 0.0;
  double fcp_reprojection = 0.0;
  double pct_median = 0.0;
  double pct_p90 = 0.0;
};

struct EvaluationReport {
  RunConfig config;
  int runs_completed = 0;
  int runs_failed = 0;
  std::vector<std::string> failures;  ///< one message per failed run
  std::array<MethodReport, 3> methods;  ///< essential, min2d, min3d
  Method winner_matching = Method::min2d;
  ScoreKind winner_matching_metric = ScoreKind::reprojection;
  Method winner_reconstruction = Method::min3d;

  const MethodReport& method(Method m) const {
    return methods[static_cast<std::size_t>(m)];
  }
};

/// Deterministic calibration/validation split for one run: a seeded
/// shuffle of the image indices, first `calibration` then `validation`
/// entries, each returned sorted.  The two halves are always disjoint.
struct Split {
  std::vector<int> calibration;
  std::vector<int> validation;
};
Split draw_split(int n_images, int calibration, int validation, std::uint64_t seed);

/// Runs one calibration method on the selected images of a dataset.
///
/// Every method starts from the algebraic essential estimate (decomposed
/// with the measured baseline); min2d and min3d then walk the five angles
/// down their respective costs.  An explicit `init` skips the essential
/// stage for the refinement methods.  All randomness derives from `seed`.
CalibrationFile calibrate_method(const Dataset& dataset, std::span<const int> images,
                                 Method method, const MonteCarloConfig& mc,
                                 std::uint64_t seed,
                                 const std::optional<ExtrinsicAngles>& init = std::nullopt);

/// All three methods on the same image set, sharing one essential stage.
/// Results are bit-identical to three calibrate_method calls with the
/// same seed.
std::array<CalibrationFile, 3> calibrate_all(const Dataset& dataset,
                                             std::span<const int> images,
                                             const MonteCarloConfig& mc, std::uint64_t seed);

/// The full repeated-split protocol: per run draw a split, calibrate all
/// methods on the calibration images, score the correct and deliberately
/// wrong validation correspondences under both metrics, and collect
/// bar-length errors; samples are pooled across runs and summarized into
/// overlap (FCP) values and pct-error quantiles.  Failed runs are recorded
/// and skipped; if 10% or more fail, throws TooManyFailures.
EvaluationReport run_evaluation(const Dataset& dataset, const RunConfig& config);

/// Writes summary.txt, fcp_table.csv, pct_errors_<method>.csv and
/// scores_<method>_<metric>_<label>.csv into out_dir (created if needed).
/// `dataset_label` is echoed into the summary header.
void write_report(const EvaluationReport& report, const std::string& dataset_label,
                  const std::filesystem::path& out_dir);

}  // namespace stereocal
