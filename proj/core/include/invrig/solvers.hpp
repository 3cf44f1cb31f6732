#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "invrig/coordinate.hpp"
#include "invrig/mesh.hpp"
#include "invrig/ordering.hpp"
#include "invrig/rig.hpp"

namespace invrig {

enum class Method { CdQuartic, CdLinear, Seol, Joshi, Cetinaslan };

inline constexpr Method kAllMethods[] = {Method::CdQuartic, Method::CdLinear,
                                         Method::Seol, Method::Joshi,
                                         Method::Cetinaslan};

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

/// Whether the method reads SolverConfig::alpha.
bool uses_alpha(Method method);
/// Rig function the method fits with.
RigKind fitting_rig(Method method);

/// Observed after every scalar coordinate update of a sequential solver.
struct UpdateEvent {
  int pass = 0;
  Index coordinate = 0;
  double old_value = 0.0;
  double new_value = 0.0;
  const WeightVector* weights = nullptr;  // state after the update
};
using UpdateObserver = std::function<void(const UpdateEvent&)>;

struct SolverConfig {
  Method method = Method::CdQuartic;
  double alpha = 0.0;
  /// Full sweeps over the coordinates (coordinate descent only).
  int passes = 1;
  OrderingStrategy ordering{};
  /// Starting point for coordinate descent; zeros when empty.
  std::optional<WeightVector> init;
  /// Seol: clip at 1 inside the loop instead of only at export.
  bool seol_clip_in_loop = false;
  UpdateObserver observer;

  /// Throws ContractError on alpha < 0, passes < 1 or a non-finite alpha.
  void validate() const;
};

struct SolveReport {
  WeightVector weights;
  /// Objective value after each pass (one entry for the closed-form methods).
  std::vector<double> objective_trace;
  Index coordinate_visits = 0;
  Index degenerate_visits = 0;
  double wall_time_s = 0.0;
  /// Joshi and Cetinaslan: nonzeros before clipping to [0, 1].
  std::optional<Index> preclip_cardinality;
};

/// 0.5 * ||f(w) - target||^2 + alpha * sum(w), with f linear or quartic.
double objective_value(const BlendshapeRig& rig, const WeightVector& w,
                       const Mesh& target, double alpha, RigKind kind);

/// Coordinate descent on the regularized box-constrained problem. Each scalar
/// update is the exact minimizer of the objective along that coordinate, so
/// the objective never increases. Method must be CdQuartic or CdLinear.
SolveReport fit_coordinate_descent(const BlendshapeRig& rig, const Mesh& target,
                                   const SolverConfig& config);

/// Single sequential pass with nonnegative least-squares steps on a residual
/// that starts at target - b0. Only static orderings are accepted. Weights are
/// clipped at 1 on export (or in the loop when clip_in_loop is set).
SolveReport fit_seol(const BlendshapeRig& rig, const Mesh& target,
                     const OrderingStrategy& ordering,
                     bool clip_in_loop = false);

/// w = pinv(B) (target - b0), clipped to [0, 1].
SolveReport fit_joshi(const BlendshapeRig& rig, const Mesh& target);

/// (B^T B + 2 alpha I) w = B^T (target - b0), clipped to [0, 1].
/// See LinearBaseline for the singular alpha == 0 case.
SolveReport fit_cetinaslan(const BlendshapeRig& rig, const Mesh& target,
                           double alpha);

/// Singular values below this fraction of the largest are dropped from the
/// pseudoinverse.
inline constexpr double kPinvRelativeCutoff = 1e-10;

/// The ridge system is abandoned for the pseudoinverse below this reciprocal
/// condition estimate (only possible at alpha == 0).
inline constexpr double kRidgeMinRcond = 1e-14;

/// Prefactored linear baselines. Factorization happens once in the
/// constructor so repeated solves cost one m x 3n product each.
///
/// Joshi uses the pseudoinverse. Cetinaslan factors B^T B + 2 alpha I by
/// Cholesky; at alpha == 0 with a singular B^T B it falls back to the
/// pseudoinverse, which is the minimum-norm limit of the ridge solution.
class LinearBaseline {
 public:
  LinearBaseline(const BlendshapeRig& rig, Method method, double alpha = 0.0);

  /// Unclipped solution.
  WeightVector solve_raw(const Mesh& target) const;
  SolveReport solve(const Mesh& target) const;

  double alpha() const { return alpha_; }
  bool uses_pseudoinverse() const { return !use_ridge_; }

 private:
  const BlendshapeRig* rig_;
  double alpha_;
  bool use_ridge_ = false;
  Eigen::MatrixXd pinv_;
  Eigen::LLT<Eigen::MatrixXd> ridge_;
};

/// Solver with per-rig precomputation, reusable across frames. Not
/// thread-safe for a shared observer; otherwise solve() is const.
class FrameSolver {
 public:
  FrameSolver(const BlendshapeRig& rig, SolverConfig config);

  /// `ordering_seed` replaces config.ordering.seed for this frame.
  SolveReport solve(const Mesh& target,
                    std::optional<std::uint64_t> ordering_seed = {}) const;

  const SolverConfig& config() const { return config_; }

 private:
  const BlendshapeRig* rig_;
  SolverConfig config_;
  std::optional<LinearBaseline> baseline_;
};

}  // namespace invrig
