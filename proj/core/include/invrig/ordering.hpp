#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "invrig/mesh.hpp"
#include "invrig/rig.hpp"

namespace invrig {

enum class OrderingKind {
  DecreasingMagnitude,
  IncreasingMagnitude,
  Random,
  FrameCorrelation,
  IterationCorrelation,
  GaussSouthwell,
  MaximumImprovement,
};

/// Coordinate visiting strategy for the sequential solvers. The seed is only
/// read by OrderingKind::Random.
struct OrderingStrategy {
  OrderingKind kind = OrderingKind::DecreasingMagnitude;
  std::uint64_t seed = 0;
  /// Correlation strategies score b_i^T r by default; when set they score
  /// b_i^T r / ||b_i|| instead (zero-norm columns score 0).
  bool normalized_correlation = false;

  /// Static strategies fix one permutation per fit; dynamic ones choose the
  /// next coordinate from the current iterate.
  bool is_static() const;
};

inline constexpr OrderingKind kAllOrderings[] = {
    OrderingKind::DecreasingMagnitude, OrderingKind::IncreasingMagnitude,
    OrderingKind::Random,              OrderingKind::FrameCorrelation,
    OrderingKind::IterationCorrelation, OrderingKind::GaussSouthwell,
    OrderingKind::MaximumImprovement,
};

std::string_view to_string(OrderingKind kind);
/// Accepts the names produced by to_string (kebab-case).
std::optional<OrderingKind> parse_ordering(std::string_view name);

/// Permutation of [0, m) for a static strategy.
///
///  - DecreasingMagnitude: ||b_i||^2 descending, ties by ascending index.
///  - IncreasingMagnitude: the exact reverse of DecreasingMagnitude.
///  - Random: seeded Fisher-Yates shuffle.
///  - FrameCorrelation: b_i^T (target - b0) descending (signed), ties by
///    ascending index. Requires `target`.
std::vector<Index> static_order(const BlendshapeRig& rig,
                                const OrderingStrategy& strategy,
                                const Mesh* target = nullptr);

/// Per-pass bookkeeping for dynamic strategies. Each coordinate may be picked
/// at most once per pass, so a pass is at most m picks.
class VisitState {
 public:
  explicit VisitState(Index m) : visited_(static_cast<std::size_t>(m), 0) {}

  void reset();
  void mark(Index i);
  bool visited(Index i) const { return visited_[static_cast<std::size_t>(i)] != 0; }
  Index picks() const { return picks_; }
  Index size() const { return static_cast<Index>(visited_.size()); }
  bool exhausted() const { return picks_ >= size(); }

 private:
  std::vector<char> visited_;
  Index picks_ = 0;
};

/// Smallest improvement MaximumImprovement still commits.
inline constexpr double kMinImprovement = 1e-12;

/// Next coordinate for a dynamic strategy, or nullopt once the pass is done.
/// `residual` is f(w) - target for the rig function `kind`.
///
///  - IterationCorrelation: unvisited i maximizing b_i^T (target - f(w)).
///  - GaussSouthwell: unvisited i maximizing |d objective / d w_i| among
///    coordinates with a feasible descent direction (not at 0 with a
///    nonnegative derivative, not at 1 with a nonpositive one, not zero).
///  - MaximumImprovement: unvisited i whose closed-form update lowers the
///    objective the most; done when the best drop is below kMinImprovement.
///
/// Ties go to the lowest index. The caller marks the returned coordinate.
std::optional<Index> next_coordinate_dynamic(const BlendshapeRig& rig,
                                             const WeightVector& w,
                                             const Vector& residual,
                                             const OrderingStrategy& strategy,
                                             double alpha,
                                             RigKind rig_kind,
                                             const VisitState& visits);

/// Convenience overload that forms the residual from `target`.
std::optional<Index> next_coordinate_dynamic(const BlendshapeRig& rig,
                                             const WeightVector& w,
                                             const Mesh& target,
                                             const OrderingStrategy& strategy,
                                             double alpha,
                                             RigKind rig_kind,
                                             const VisitState& visits);

}  // namespace invrig
