#pragma once

#include "invrig/mesh.hpp"
#include "invrig/rig.hpp"

namespace invrig {

/// Squared norms of phi below this are treated as a vanished coordinate.
inline constexpr double kDegenerateNormSq = 1e-12;

/// Clamp to [0, 1]. Exact: interior values pass through unchanged.
constexpr double project_unit_interval(double x) {
  if (x < 0.0) return 0.0;
  if (x > 1.0) return 1.0;
  return x;
}

struct CoordinateUpdate {
  double value = 0.0;
  bool degenerate = false;
};

/// Box-constrained minimizer of  0.5 * ||w * phi + psi||^2 + alpha * w  over
/// w in [0, 1], given phi^T psi and ||phi||^2.
///
/// The stationary point is (-phi^T psi - alpha) / ||phi||^2. When ||phi||^2 is
/// below kDegenerateNormSq the subproblem reduces to alpha * w: the result is 0
/// for alpha > 0 and `current` otherwise.
CoordinateUpdate solve_coordinate(double phi_dot_psi, double phi_norm_sq,
                                  double alpha, double current);

/// Closed-form update of w_i against the quartic rig, built from phi() and
/// psi() directly.
CoordinateUpdate coordinate_update_quartic(const BlendshapeRig& rig,
                                           const WeightVector& w, Index i,
                                           const Mesh& target, double alpha);

/// Same as coordinate_update_quartic with phi_i := b_i and corrections ignored.
CoordinateUpdate coordinate_update_linear(const BlendshapeRig& rig,
                                          const WeightVector& w, Index i,
                                          const Mesh& target, double alpha);

/// Change of  0.5 * ||r||^2 + alpha * sum(w)  when w_i moves by `step` along
/// phi_i, where r = f(w) - target.
inline double objective_delta(double step, double phi_dot_residual,
                              double phi_norm_sq, double alpha) {
  return step * (phi_dot_residual + alpha) + 0.5 * step * step * phi_norm_sq;
}

}  // namespace invrig
