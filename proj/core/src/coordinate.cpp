#include "invrig/coordinate.hpp"

namespace invrig {

CoordinateUpdate solve_coordinate(double phi_dot_psi, double phi_norm_sq,
                                  double alpha, double current) {
  if (phi_norm_sq < kDegenerateNormSq) {
    return {alpha > 0.0 ? 0.0 : current, true};
  }
  return {project_unit_interval((-phi_dot_psi - alpha) / phi_norm_sq), false};
}

namespace {

CoordinateUpdate update_from_scratch(const BlendshapeRig& rig,
                                     const WeightVector& w, Index i,
                                     const Mesh& target, double alpha,
                                     RigKind kind) {
  const Vector p = phi(rig, w, i, kind);
  const Vector q = psi(rig, w, i, target, kind);
  return solve_coordinate(p.dot(q), p.squaredNorm(), alpha, w[i]);
}

}  // namespace

CoordinateUpdate coordinate_update_quartic(const BlendshapeRig& rig,
                                           const WeightVector& w, Index i,
                                           const Mesh& target, double alpha) {
  return update_from_scratch(rig, w, i, target, alpha, RigKind::Quartic);
}

CoordinateUpdate coordinate_update_linear(const BlendshapeRig& rig,
                                          const WeightVector& w, Index i,
                                          const Mesh& target, double alpha) {
  return update_from_scratch(rig, w, i, target, alpha, RigKind::Linear);
}

}  // namespace invrig
