#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "invrig/mesh.hpp"

namespace invrig {

/// Weights with magnitude at or below this count as zero.
inline constexpr double kCardinalityEps = 1e-6;

/// sqrt(||reconstruction - clean||^2 / n), with n the vertex count.
double rmse_mean(const Mesh& reconstruction, const Mesh& clean);

/// Nearest-rank 95th percentile of per-vertex Euclidean errors: the value at
/// 1-based rank ceil(0.95 * n) of the ascending errors.
double rmse_p95(const Mesh& reconstruction, const Mesh& clean);

/// Per-vertex Euclidean error magnitudes.
Vector vertex_errors(const Mesh& reconstruction, const Mesh& clean);

Index cardinality(const WeightVector& w, double eps = kCardinalityEps);

double l1_norm(const WeightVector& w);

/// Sum of squared second differences of one weight over time. Tracks shorter
/// than three frames score 0.
double roughness(std::span<const double> track);

struct FrameMetrics {
  Index frame = 0;
  double rmse_mean = 0.0;
  double rmse_p95 = 0.0;
  Index cardinality = 0;
  double l1_norm = 0.0;
  double solve_time_s = 0.0;
};

struct MetricSummary {
  double rmse_mean = 0.0;
  double rmse_p95 = 0.0;
  double cardinality = 0.0;
  double l1_norm = 0.0;
  /// Mean of the per-weight roughness values.
  double roughness = 0.0;
  double solve_time_s = 0.0;
};

struct MetricTable {
  std::vector<FrameMetrics> per_frame;
  Vector per_weight_roughness;

  MetricSummary summary() const;
};

/// Builds a table from fitted weights (m x N, one frame per column) and the
/// matching reconstructions / clean meshes. `solve_times` may be empty.
MetricTable compute_metrics(const Eigen::MatrixXd& weights,
                            std::span<const Mesh> reconstructions,
                            std::span<const Mesh> clean,
                            std::span<const double> solve_times = {});

/// Per-weight roughness of an m x N weight matrix (rows are tracks).
Vector track_roughness(const Eigen::MatrixXd& weights);

/// CSV writers. Column order follows the usual results table:
/// RMSE mean, RMSE 95th, cardinality, L1 norm, roughness, time.
/// Timing columns are optional so that output can be compared byte for byte.
void write_frame_csv(std::ostream& out, const MetricTable& table,
                     bool include_time);
void write_roughness_csv(std::ostream& out, const MetricTable& table);

/// Shortest round-trip text for a double.
std::string format_number(double value);

}  // namespace invrig
