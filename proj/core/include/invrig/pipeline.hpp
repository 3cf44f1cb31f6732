#pragma once

#include <span>
#include <vector>

#include "invrig/dataio.hpp"
#include "invrig/metrics.hpp"
#include "invrig/rig.hpp"
#include "invrig/solvers.hpp"

namespace invrig {

struct SequenceFit {
  Eigen::MatrixXd weights;  // m x N
  std::vector<SolveReport> reports;

  std::vector<double> solve_times() const;
};

/// Fits every frame of a mesh animation independently. Frames may run on
/// `threads` workers; results are always stored by frame index. Random
/// orderings get a per-frame seed derived from config.ordering.seed and the
/// frame index, so output does not depend on the thread count.
SequenceFit fit_sequence(const BlendshapeRig& rig, const Animation& targets,
                         const SolverConfig& config, int threads = 1);

/// Metrics of fitted weights against clean meshes. Reconstruction always uses
/// the full quartic rig. Throws DataError if `clean` is flagged noisy.
MetricTable evaluate_sequence(const BlendshapeRig& rig,
                              const Eigen::MatrixXd& weights,
                              const Animation& clean,
                              std::span<const double> solve_times = {});

}  // namespace invrig
