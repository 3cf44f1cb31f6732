#include "invrig/ordering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

#include "invrig/coordinate.hpp"
#include "invrig/errors.hpp"
#include "invrig/random.hpp"

namespace invrig {

namespace {

constexpr std::array<std::pair<OrderingKind, std::string_view>, 7> kNames{{
    {OrderingKind::DecreasingMagnitude, "decreasing-magnitude"},
    {OrderingKind::IncreasingMagnitude, "increasing-magnitude"},
    {OrderingKind::Random, "random"},
    {OrderingKind::FrameCorrelation, "frame-correlation"},
    {OrderingKind::IterationCorrelation, "iteration-correlation"},
    {OrderingKind::GaussSouthwell, "gauss-southwell"},
    {OrderingKind::MaximumImprovement, "maximum-improvement"},
}};

// Indices sorted by score descending, ties by ascending index.
std::vector<Index> rank_descending(const Vector& score) {
  std::vector<Index> order(static_cast<std::size_t>(score.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return score[a] > score[b]; });
  return order;
}

// Divides correlation scores by the column norms when requested.
Vector correlation_scores(const BlendshapeRig& rig, Vector raw, bool normalized) {
  if (!normalized) return raw;
  const Vector& norms_sq = rig.squared_norms();
  for (Index i = 0; i < raw.size(); ++i) {
    raw[i] = norms_sq[i] > 0.0 ? raw[i] / std::sqrt(norms_sq[i]) : 0.0;
  }
  return raw;
}

}  // namespace

bool OrderingStrategy::is_static() const {
  switch (kind) {
    case OrderingKind::DecreasingMagnitude:
    case OrderingKind::IncreasingMagnitude:
    case OrderingKind::Random:
    case OrderingKind::FrameCorrelation:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(OrderingKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<OrderingKind> parse_ordering(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::vector<Index> static_order(const BlendshapeRig& rig,
                                const OrderingStrategy& strategy,
                                const Mesh* target) {
  const Index m = rig.blendshape_count();
  switch (strategy.kind) {
    case OrderingKind::DecreasingMagnitude:
      return rank_descending(rig.squared_norms());
    case OrderingKind::IncreasingMagnitude: {
      auto order = rank_descending(rig.squared_norms());
      std::reverse(order.begin(), order.end());
      return order;
    }
    case OrderingKind::Random: {
      std::vector<Index> order(static_cast<std::size_t>(m));
      std::iota(order.begin(), order.end(), Index{0});
      Rng rng(strategy.seed);
      shuffle(order, rng);
      return order;
    }
    case OrderingKind::FrameCorrelation: {
      if (target == nullptr) {
        throw ContractError("frame-correlation ordering needs a target mesh");
      }
      detail::check_target(rig, *target);
      const Vector delta = target->coords() - rig.neutral().coords();
      return rank_descending(correlation_scores(
          rig, rig.blendshapes().transpose() * delta, strategy.normalized_correlation));
    }
    default:
      throw ContractError(std::string("ordering '") +
                          std::string(to_string(strategy.kind)) +
                          "' is dynamic and has no static permutation");
  }
}

void VisitState::reset() {
  std::fill(visited_.begin(), visited_.end(), 0);
  picks_ = 0;
}

void VisitState::mark(Index i) {
  auto& v = visited_[static_cast<std::size_t>(i)];
  if (v != 0) throw ContractError("coordinate visited twice in one pass");
  v = 1;
  ++picks_;
}

std::optional<Index> next_coordinate_dynamic(const BlendshapeRig& rig,
                                             const WeightVector& w,
                                             const Vector& residual,
                                             const OrderingStrategy& strategy,
                                             double alpha,
                                             RigKind rig_kind,
                                             const VisitState& visits) {
  detail::check_weights(rig, w);
  const Index m = rig.blendshape_count();
  if (visits.size() != m) throw ContractError("visit state size mismatch");
  if (residual.size() != rig.dimension()) {
    throw ContractError("residual size mismatch");
  }
  if (visits.exhausted()) return std::nullopt;

  std::optional<Index> best;
  double best_score = 0.0;
  auto offer = [&](Index i, double score) {
    if (!best || score > best_score) {
      best = i;
      best_score = score;
    }
  };

  switch (strategy.kind) {
    case OrderingKind::IterationCorrelation: {
      // b_i^T (target - f(w)) = -b_i^T residual
      const Vector corr = correlation_scores(
          rig, -(rig.blendshapes().transpose() * residual), strategy.normalized_correlation);
      for (Index i = 0; i < m; ++i) {
        if (!visits.visited(i)) offer(i, corr[i]);
      }
      return best;
    }
    case OrderingKind::GaussSouthwell: {
      Vector p(rig.dimension());
      for (Index i = 0; i < m; ++i) {
        if (visits.visited(i)) continue;
        detail::compute_phi(rig, w, i, rig_kind, p);
        const double grad = p.dot(residual) + alpha;
        if (grad == 0.0) continue;
        if (w[i] <= 0.0 && grad >= 0.0) continue;
        if (w[i] >= 1.0 && grad <= 0.0) continue;
        offer(i, std::abs(grad));
      }
      return best;
    }
    case OrderingKind::MaximumImprovement: {
      Vector p(rig.dimension());
      for (Index i = 0; i < m; ++i) {
        if (visits.visited(i)) continue;
        detail::compute_phi(rig, w, i, rig_kind, p);
        const double norm_sq = p.squaredNorm();
        const double phi_dot_r = p.dot(residual);
        // psi_i = residual - w_i phi_i
        const auto update =
            solve_coordinate(phi_dot_r - w[i] * norm_sq, norm_sq, alpha, w[i]);
        const double drop =
            -objective_delta(update.value - w[i], phi_dot_r, norm_sq, alpha);
        offer(i, drop);
      }
      if (best && best_score < kMinImprovement) return std::nullopt;
      return best;
    }
    default:
      throw ContractError(std::string("ordering '") +
                          std::string(to_string(strategy.kind)) + "' is not dynamic");
  }
}

std::optional<Index> next_coordinate_dynamic(const BlendshapeRig& rig,
                                             const WeightVector& w,
                                             const Mesh& target,
                                             const OrderingStrategy& strategy,
                                             double alpha,
                                             RigKind rig_kind,
                                             const VisitState& visits) {
  detail::check_target(rig, target);
  const Vector residual = evaluate(rig, w, rig_kind).coords() - target.coords();
  return next_coordinate_dynamic(rig, w, residual, strategy, alpha, rig_kind,
                                 visits);
}

}  // namespace invrig
