#include "invrig/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "invrig/errors.hpp"
#include "invrig/random.hpp"

namespace invrig {

std::vector<double> SequenceFit::solve_times() const {
  std::vector<double> out;
  out.reserve(reports.size());
  for (const auto& r : reports) out.push_back(r.wall_time_s);
  return out;
}

SequenceFit fit_sequence(const BlendshapeRig& rig, const Animation& targets,
                         const SolverConfig& config, int threads) {
  if (targets.kind != FrameKind::Mesh) {
    throw DataError("fit input must be a mesh animation");
  }
  if (targets.width() != rig.dimension()) {
    throw DataError(fmt::format("animation frames have {} coordinates, rig has {}",
                                targets.width(), rig.dimension()));
  }
  if (threads < 1) throw ContractError("thread count must be >= 1");
  if (threads > 1 && config.observer) {
    throw ContractError("update observers require a single thread");
  }

  const FrameSolver solver(rig, config);
  const Index frames = targets.frame_count();
  const bool per_frame_seed = config.ordering.kind == OrderingKind::Random;

  SequenceFit fit;
  fit.weights.resize(rig.blendshape_count(), frames);
  fit.reports.resize(static_cast<std::size_t>(frames));

  auto run = [&](Index t) {
    std::optional<std::uint64_t> seed;
    if (per_frame_seed) {
      seed = derive_seed(config.ordering.seed, static_cast<std::uint64_t>(t));
    }
    auto report = solver.solve(targets.mesh(t), seed);
    fit.weights.col(t) = report.weights;
    fit.reports[static_cast<std::size_t>(t)] = std::move(report);
  };

  const int workers = static_cast<int>(std::min<Index>(threads, std::max<Index>(frames, 1)));
  if (workers <= 1) {
    for (Index t = 0; t < frames; ++t) run(t);
    return fit;
  }

  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (int k = 0; k < workers; ++k) {
      pool.emplace_back([&] {
        for (Index t = next++; t < frames; t = next++) {
          try {
            run(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return fit;
}

MetricTable evaluate_sequence(const BlendshapeRig& rig,
                              const Eigen::MatrixXd& weights,
                              const Animation& clean,
                              std::span<const double> solve_times) {
  if (clean.kind != FrameKind::Mesh) throw DataError("reference must be a mesh animation");
  if (clean.noise.noisy) {
    throw DataError("refusing to evaluate against a noisy reference; use the clean sequence");
  }
  if (clean.width() != rig.dimension()) {
    throw DataError(fmt::format("reference frames have {} coordinates, rig has {}",
                                clean.width(), rig.dimension()));
  }
  if (weights.rows() != rig.blendshape_count()) {
    throw DataError(fmt::format("weights have {} rows, rig has {} blendshapes",
                                weights.rows(), rig.blendshape_count()));
  }
  if (weights.cols() != clean.frame_count()) {
    throw DataError(fmt::format("{} weight frames but {} reference frames",
                                weights.cols(), clean.frame_count()));
  }
  std::vector<Mesh> recon;
  recon.reserve(static_cast<std::size_t>(weights.cols()));
  for (Index t = 0; t < weights.cols(); ++t) {
    recon.push_back(evaluate_quartic(rig, weights.col(t)));
  }
  const auto reference = clean.meshes();
  return compute_metrics(weights, recon, reference, solve_times);
}

}  // namespace invrig
