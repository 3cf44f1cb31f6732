#include "invrig/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "invrig/errors.hpp"

namespace invrig {

namespace {

void check_pair(const Mesh& a, const Mesh& b) {
  if (a.size() != b.size()) {
    throw ContractError(fmt::format("mesh sizes differ: {} vs {}", a.size(), b.size()));
  }
  if (a.vertex_count() == 0) throw ContractError("mesh has no vertices");
}

}  // namespace

double rmse_mean(const Mesh& reconstruction, const Mesh& clean) {
  check_pair(reconstruction, clean);
  const double sq = (reconstruction.coords() - clean.coords()).squaredNorm();
  return std::sqrt(sq / static_cast<double>(clean.vertex_count()));
}

Vector vertex_errors(const Mesh& reconstruction, const Mesh& clean) {
  check_pair(reconstruction, clean);
  const Vector diff = reconstruction.coords() - clean.coords();
  const Index n = clean.vertex_count();
  Vector err(n);
  for (Index v = 0; v < n; ++v) err[v] = diff.segment<3>(3 * v).norm();
  return err;
}

double rmse_p95(const Mesh& reconstruction, const Mesh& clean) {
  Vector err = vertex_errors(reconstruction, clean);
  const auto n = static_cast<std::size_t>(err.size());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  const std::size_t k = std::clamp<std::size_t>(rank, 1, n) - 1;
  std::nth_element(err.data(), err.data() + k, err.data() + n);
  return err[static_cast<Index>(k)];
}

Index cardinality(const WeightVector& w, double eps) {
  return (w.array().abs() > eps).count();
}

double l1_norm(const WeightVector& w) { return w.cwiseAbs().sum(); }

double roughness(std::span<const double> track) {
  double total = 0.0;
  for (std::size_t t = 1; t + 1 < track.size(); ++t) {
    const double d2 = track[t - 1] - 2.0 * track[t] + track[t + 1];
    total += d2 * d2;
  }
  return total;
}

Vector track_roughness(const Eigen::MatrixXd& weights) {
  Vector out(weights.rows());
  std::vector<double> track(static_cast<std::size_t>(weights.cols()));
  for (Index i = 0; i < weights.rows(); ++i) {
    for (Index t = 0; t < weights.cols(); ++t) {
      track[static_cast<std::size_t>(t)] = weights(i, t);
    }
    out[i] = roughness(track);
  }
  return out;
}

MetricTable compute_metrics(const Eigen::MatrixXd& weights,
                            std::span<const Mesh> reconstructions,
                            std::span<const Mesh> clean,
                            std::span<const double> solve_times) {
  const auto frames = static_cast<std::size_t>(weights.cols());
  if (reconstructions.size() != frames || clean.size() != frames) {
    throw ContractError(fmt::format(
        "frame count mismatch: {} weight frames, {} reconstructions, {} clean",
        frames, reconstructions.size(), clean.size()));
  }
  if (!solve_times.empty() && solve_times.size() != frames) {
    throw ContractError("solve time count does not match frame count");
  }
  MetricTable table;
  table.per_frame.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto col = weights.col(static_cast<Index>(t));
    FrameMetrics row;
    row.frame = static_cast<Index>(t);
    row.rmse_mean = rmse_mean(reconstructions[t], clean[t]);
    row.rmse_p95 = rmse_p95(reconstructions[t], clean[t]);
    row.cardinality = cardinality(col);
    row.l1_norm = l1_norm(col);
    row.solve_time_s = solve_times.empty() ? 0.0 : solve_times[t];
    table.per_frame.push_back(row);
  }
  table.per_weight_roughness = track_roughness(weights);
  return table;
}

MetricSummary MetricTable::summary() const {
  MetricSummary s;
  if (!per_frame.empty()) {
    for (const auto& row : per_frame) {
      s.rmse_mean += row.rmse_mean;
      s.rmse_p95 += row.rmse_p95;
      s.cardinality += static_cast<double>(row.cardinality);
      s.l1_norm += row.l1_norm;
      s.solve_time_s += row.solve_time_s;
    }
    const auto n = static_cast<double>(per_frame.size());
    s.rmse_mean /= n;
    s.rmse_p95 /= n;
    s.cardinality /= n;
    s.l1_norm /= n;
    s.solve_time_s /= n;
  }
  if (per_weight_roughness.size() > 0) s.roughness = per_weight_roughness.mean();
  return s;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_frame_csv(std::ostream& out, const MetricTable& table,
                     bool include_time) {
  out << "frame,rmse_mean,rmse_p95,cardinality,l1_norm";
  if (include_time) out << ",solve_time_s";
  out << '\n';
  for (const auto& row : table.per_frame) {
    out << row.frame << ',' << format_number(row.rmse_mean) << ','
        << format_number(row.rmse_p95) << ',' << row.cardinality << ','
        << format_number(row.l1_norm);
    if (include_time) out << ',' << format_number(row.solve_time_s);
    out << '\n';
  }
}

void write_roughness_csv(std::ostream& out, const MetricTable& table) {
  out << "weight,roughness\n";
  for (Index i = 0; i < table.per_weight_roughness.size(); ++i) {
    out << i << ',' << format_number(table.per_weight_roughness[i]) << '\n';
  }
}

}  // namespace invrig
