#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "invrig/ordering.hpp"
#include "invrig/solvers.hpp"
#include "invrig/synthetic.hpp"

namespace invrig::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;

/// Schema version stamped into every manifest.
inline constexpr int kOutputSchemaVersion = 1;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "INVRIG_OUT_DIR";

inline const std::vector<double> kDefaultAlphaGrid{0, 0.1, 0.2, 0.5, 1, 2, 5, 10};
inline const std::vector<double> kDefaultSigma2Grid{0, 0.01, 0.02, 0.03, 0.05, 0.1};

struct RunConfig {
  std::string subcommand;

  std::filesystem::path rig_path;
  std::filesystem::path frames_path;   // mesh animation to fit (usually noisy)
  std::filesystem::path clean_path;    // clean reference for evaluation
  std::filesystem::path weights_path;  // fitted weights for eval
  std::filesystem::path timing_path;   // optional per-frame timing for eval
  std::filesystem::path out_dir;

  Method method = Method::CdQuartic;
  std::vector<Method> methods;  // sweep; empty means all
  double alpha = 0.0;
  int passes = 5;
  OrderingKind ordering = OrderingKind::DecreasingMagnitude;
  bool normalized_correlation = false;
  std::uint64_t seed = 1;
  double sigma2 = 0.03;
  std::vector<double> alpha_grid = kDefaultAlphaGrid;
  std::vector<double> sigma2_grid = kDefaultSigma2Grid;
  bool sigma2_grid_given = false;
  int threads = 1;

  SyntheticRigSpec rig_spec;
  SequenceSpec sequence_spec;
};

/// Writes rig.txt, clean.anim, noisy.anim, weights_gt.anim and
/// generate_manifest.json. Seeds for the rig, sequence and noise are derived
/// from config.seed.
void cmd_generate(const RunConfig& config);

/// Fits config.frames_path and writes weights.anim, fit_report.csv,
/// objective_trace.csv, timing.csv and fit_manifest.json.
void cmd_fit(const RunConfig& config);

/// Scores config.weights_path against config.clean_path and writes
/// frame_metrics.csv, roughness.csv, summary.csv and summary.json. Timing
/// (from config.timing_path) goes to timing.csv only, so the metric files are
/// byte-reproducible.
void cmd_eval(const RunConfig& config);

/// Runs fit + eval for every (sigma2, method, alpha) cell and writes sweep.csv.
void cmd_sweep(const RunConfig& config);

/// Runs every ordering strategy at a fixed alpha and writes orderings.csv.
void cmd_compare_orderings(const RunConfig& config);

/// Parses arguments, dispatches and maps errors to exit codes.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace invrig::cli
