#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "invrig/mesh.hpp"

namespace invrig {

/// Which rig function a solver or objective uses.
enum class RigKind { Linear, Quartic };

/// An offset vector activated by the product of 2, 3 or 4 blendshape weights.
/// Indices are 0-based and stored strictly increasing.
class CorrectiveTerm {
 public:
  CorrectiveTerm(std::span<const Index> indices, Vector offset);

  /// 2 for pairs, 3 for triplets, 4 for quadruplets.
  int order() const { return order_; }
  std::span<const Index> indices() const { return {indices_.data(), static_cast<std::size_t>(order_)}; }
  const Vector& offset() const { return offset_; }

  bool contains(Index i) const;

  /// Product of the participating weights.
  double activation(const WeightVector& w) const;
  /// Product of the participating weights other than `skip`.
  double activation_without(const WeightVector& w, Index skip) const;

  /// Level first, then lexicographic on the index tuple.
  friend bool canonical_less(const CorrectiveTerm& a, const CorrectiveTerm& b);

 private:
  std::array<Index, 4> indices_{};
  int order_ = 0;
  Vector offset_;
};

/// Delta blendshape rig with up to three levels of corrective terms:
///
///   f_Q(w) = b0 + B w + sum_P wi wj bij + sum_T wi wj wk bijk
///                     + sum_Q wi wj wk wl bijkl
///
/// Immutable after construction. Corrections are kept in canonical order
/// (pairs, triplets, quadruplets; each lexicographic) so evaluation sums in a
/// fixed order regardless of how the terms were supplied.
class BlendshapeRig {
 public:
  BlendshapeRig(Mesh neutral, Eigen::MatrixXd blendshapes,
                std::vector<CorrectiveTerm> corrections = {});

  Index blendshape_count() const { return blendshapes_.cols(); }
  Index vertex_count() const { return neutral_.vertex_count(); }
  Index dimension() const { return neutral_.size(); }

  const Mesh& neutral() const { return neutral_; }
  /// 3n x m, one delta blendshape per column.
  const Eigen::MatrixXd& blendshapes() const { return blendshapes_; }
  auto blendshape(Index i) const { return blendshapes_.col(i); }
  /// ||b_i||^2 for every column.
  const Vector& squared_norms() const { return squared_norms_; }

  std::span<const CorrectiveTerm> corrections() const { return corrections_; }
  Index correction_count(int order) const;
  bool has_corrections() const { return !corrections_.empty(); }

  /// Positions into corrections() of the terms that involve blendshape i,
  /// in canonical order.
  std::span<const Index> terms_containing(Index i) const;

 private:
  Mesh neutral_;
  Eigen::MatrixXd blendshapes_;
  Vector squared_norms_;
  std::vector<CorrectiveTerm> corrections_;
  std::vector<std::vector<Index>> incidence_;
};

/// f_L(w) = b0 + sum_i w_i b_i, summed in index order.
Mesh evaluate_linear(const BlendshapeRig& rig, const WeightVector& w);

/// f_Q(w): the linear part (as evaluate_linear), then pairs, triplets and
/// quadruplets in canonical order.
Mesh evaluate_quartic(const BlendshapeRig& rig, const WeightVector& w);

Mesh evaluate(const BlendshapeRig& rig, const WeightVector& w, RigKind kind);

/// Every term that multiplies w_i: b_i plus the corrective offsets containing
/// i, each scaled by the product of its other weights. w_i itself is unused.
Vector phi(const BlendshapeRig& rig, const WeightVector& w, Index i,
           RigKind kind = RigKind::Quartic);

/// Everything in f(w) - target that does not involve w_i, neutral included,
/// so that f(w) - target == w_i * phi(i) + psi(i) for any value of w_i.
Vector psi(const BlendshapeRig& rig, const WeightVector& w, Index i,
           const Mesh& target, RigKind kind = RigKind::Quartic);

namespace detail {

// Shared kernels for the solvers. `out` must already have size 3n.
void accumulate_rig(const BlendshapeRig& rig, const WeightVector& w,
                    RigKind kind, Vector& out);
void compute_phi(const BlendshapeRig& rig, const WeightVector& w, Index i,
                 RigKind kind, Vector& out);
void check_weights(const BlendshapeRig& rig, const WeightVector& w);
void check_index(const BlendshapeRig& rig, Index i);
void check_target(const BlendshapeRig& rig, const Mesh& target);

}  // namespace detail

}  // namespace invrig
