#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stereocal/essential.hpp"
#include "stereocal/harness.hpp"
#include "stereocal/rng.hpp"

namespace {

using namespace stereocal;

// Exit code contract: 0 success, 2 configuration error, 3 data error,
// 4 evaluation aborted because too many runs failed to calibrate.
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitFailedRuns = 4;

struct McFlags {
  double delta0 = MonteCarloConfig{}.delta0;
  double decay = MonteCarloConfig{}.decay;
  double accept = MonteCarloConfig{}.acceptance_threshold;
  double delta_min = MonteCarloConfig{}.delta_min;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mc-delta0", delta0, "initial random-walk step, radians");
    cmd->add_option("--mc-decay", decay, "step decay factor in (0,1)");
    cmd->add_option("--mc-accept", accept, "acceptance-ratio threshold in (0,1)");
    cmd->add_option("--mc-delta-min", delta_min, "terminal step, radians");
  }

  MonteCarloConfig config() const {
    MonteCarloConfig mc;
    mc.delta0 = delta0;
    mc.decay = decay;
    mc.acceptance_threshold = accept;
    mc.delta_min = delta_min;
    return mc;
  }
};

void parse_split(const std::string& text, RunConfig& config) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) {
    throw ConfigError("--split expects the form N:M, e.g. 20:5");
  }
  try {
    config.calibration_images = std::stoi(text.substr(0, colon));
    config.validation_images = std::stoi(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("--split expects two integers, e.g. 20:5");
  }
}

std::vector<int> all_image_indices(const Dataset& dataset) {
  std::vector<int> indices(static_cast<std::size_t>(dataset.n_images()));
  std::iota(indices.begin(), indices.end(), 0);
  return indices;
}

void require_enough_images(const Dataset& dataset) {
  if (dataset.n_images() < 5) {
    throw InsufficientCorrespondences("calibration needs at least 5 images, dataset has " +
                                      std::to_string(dataset.n_images()));
  }
}

int run(int argc, char** argv) {
  CLI::App app{"two-parameter-set stereo extrinsic calibration toolkit"};
  app.require_subcommand(1);

  // generate ----------------------------------------------------------------
  auto* generate_cmd = app.add_subcommand("generate", "synthesize a bar-target dataset");
  std::string generate_out;
  SceneConfig scene = SceneConfig::defaults();
  double generate_omega = scene.k1.omega;
  generate_cmd->add_option("--out", generate_out, "output dataset file")->required();
  generate_cmd->add_option("--seed", scene.seed, "generator seed")->envname("STEREOCAL_SEED");
  generate_cmd->add_option("--noise", scene.noise_sigma, "pixel noise std, pixels");
  generate_cmd->add_option("--n-images", scene.n_images, "number of images");
  generate_cmd->add_option("--baseline", scene.truth.baseline, "true baseline, meters");
  generate_cmd->add_option("--distance", scene.target_distance, "bar length, meters");
  generate_cmd->add_option("--omega", generate_omega, "focal length of both cameras, pixels");

  // calibrate ----------------------------------------------------------------
  auto* calibrate_cmd = app.add_subcommand("calibrate", "estimate extrinsics from a dataset");
  std::string calibrate_dataset, calibrate_method_name = "all", calibrate_out_dir = ".";
  std::string calibrate_init;
  std::uint64_t calibrate_seed = 0;
  McFlags calibrate_mc;
  calibrate_cmd->add_option("--dataset", calibrate_dataset, "input dataset file")->required();
  calibrate_cmd->add_option("--method", calibrate_method_name,
                            "essential, min2d, min3d or all");
  calibrate_cmd->add_option("--seed", calibrate_seed, "calibration seed")
      ->envname("STEREOCAL_SEED");
  calibrate_cmd->add_option("--out-dir", calibrate_out_dir, "output directory");
  calibrate_cmd->add_option("--init", calibrate_init,
                            "calibration file whose angles seed the refinement "
                            "(min2d/min3d only; skips the essential stage)");
  calibrate_mc.attach(calibrate_cmd);

  // evaluate -----------------------------------------------------------------
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "repeated-split method comparison on a dataset");
  std::string evaluate_dataset, evaluate_out_dir = "eval_out", evaluate_split = "20:5";
  RunConfig run_config;
  McFlags evaluate_mc;
  evaluate_cmd->add_option("--dataset", evaluate_dataset, "input dataset file")->required();
  evaluate_cmd->add_option("--runs", run_config.runs, "number of random splits");
  evaluate_cmd->add_option("--split", evaluate_split, "calibration:validation image counts");
  evaluate_cmd->add_option("--seed", run_config.master_seed, "master seed")
      ->envname("STEREOCAL_SEED");
  evaluate_cmd->add_option("--jobs", run_config.jobs, "worker threads");
  evaluate_cmd->add_option("--out-dir", evaluate_out_dir, "report directory");
  evaluate_mc.attach(evaluate_cmd);

  // report -------------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "print the summary of an evaluation");
  std::string report_dir;
  report_cmd->add_option("--out-dir", report_dir, "directory written by evaluate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help text or the parse error
    return code == 0 ? 0 : kExitConfig;
  }

  if (generate_cmd->parsed()) {
    scene.k1.omega = generate_omega;
    scene.k2.omega = generate_omega;
    const Dataset dataset = generate(scene);
    write_dataset(dataset, generate_out);
    std::cout << "wrote " << dataset.n_images() << " images to " << generate_out
              << " (baseline " << dataset.baseline << " m, bar " << dataset.target_distance
              << " m, noise " << scene.noise_sigma << " px, seed " << scene.seed << ")\n";
    return 0;
  }

  if (calibrate_cmd->parsed()) {
    const Dataset dataset = read_dataset(calibrate_dataset);
    require_enough_images(dataset);
    std::optional<ExtrinsicAngles> init;
    if (!calibrate_init.empty()) {
      if (calibrate_method_name != "min2d" && calibrate_method_name != "min3d") {
        throw ConfigError("--init applies only to --method min2d or min3d");
      }
      init = read_calibration(calibrate_init).angles;
    }

    std::vector<Method> methods;
    if (calibrate_method_name == "all") {
      methods = {Method::essential, Method::min2d, Method::min3d};
    } else if (const auto m = parse_method(calibrate_method_name)) {
      methods = {*m};
    } else {
      throw ConfigError("unknown method '" + calibrate_method_name + "'");
    }

    const std::filesystem::path out_dir(calibrate_out_dir);
    std::filesystem::create_directories(out_dir);
    const std::vector<int> images = all_image_indices(dataset);

    std::vector<CalibrationFile> results;
    if (methods.size() == 3) {
      const auto all = calibrate_all(dataset, images, calibrate_mc.config(), calibrate_seed);
      results.assign(all.begin(), all.end());
    } else {
      results.push_back(calibrate_method(dataset, images, methods.front(),
                                         calibrate_mc.config(), calibrate_seed, init));
    }
    for (const CalibrationFile& c : results) {
      const auto path = out_dir / ("calibration_" + method_name(c.method) + ".txt");
      write_calibration(c, path);
      std::cout << method_name(c.method) << ": alpha " << c.angles.alpha << " beta "
                << c.angles.beta << " gamma " << c.angles.gamma << " delta " << c.angles.delta
                << " epsilon " << c.angles.epsilon << " -> " << path.string() << "\n";
    }
    return 0;
  }

  if (evaluate_cmd->parsed()) {
    parse_split(evaluate_split, run_config);
    run_config.mc = evaluate_mc.config();
    const Dataset dataset = read_dataset(evaluate_dataset);
    require_enough_images(dataset);

    const EvaluationReport report = run_evaluation(dataset, run_config);

    // One representative calibration per method on the full dataset; the
    // summary's recommendation lines point at these files.
    const std::filesystem::path out_dir(evaluate_out_dir);
    std::filesystem::create_directories(out_dir);
    const auto final_calibrations =
        calibrate_all(dataset, all_image_indices(dataset), run_config.mc,
                      derive_seed(run_config.master_seed,
                                  static_cast<std::uint64_t>(run_config.runs) + 1));
    for (const CalibrationFile& c : final_calibrations) {
      write_calibration(c, out_dir / ("calibration_" + method_name(c.method) + ".txt"));
    }
    write_report(report, evaluate_dataset, out_dir);

    std::cout << "method        fcp(residual)  fcp(reprojection)  median pct error\n";
    for (const MethodReport& m : report.methods) {
      std::printf("%-12s  %13.4f  %17.4f  %16.6g\n", method_name(m.method).c_str(),
                  m.fcp_residual, m.fcp_reprojection, m.pct_median);
    }
    std::cout << "completed " << report.runs_completed << "/" << report.config.runs
              << " runs; report in " << out_dir.string() << "\n";
    return 0;
  }

  // report
  std::ifstream in(std::filesystem::path(report_dir) / "summary.txt", std::ios::binary);
  if (!in) {
    throw Error("no summary.txt in '" + report_dir + "'; run evaluate first");
  }
  std::cout << in.rdbuf();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TooManyFailures& e) {
    std::cerr << "evaluation aborted: " << e.what() << "\n";
    return kExitFailedRuns;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
