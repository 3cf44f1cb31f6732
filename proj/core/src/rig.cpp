#include "invrig/rig.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "invrig/errors.hpp"

namespace invrig {

CorrectiveTerm::CorrectiveTerm(std::span<const Index> indices, Vector offset)
    : offset_(std::move(offset)) {
  if (indices.size() < 2 || indices.size() > 4) {
    throw ContractError(fmt::format(
        "corrective term must involve 2, 3 or 4 blendshapes, got {}",
        indices.size()));
  }
  order_ = static_cast<int>(indices.size());
  std::copy(indices.begin(), indices.end(), indices_.begin());
  std::sort(indices_.begin(), indices_.begin() + order_);
  for (int k = 0; k < order_; ++k) {
    if (indices_[k] < 0) throw ContractError("negative corrective index");
    if (k > 0 && indices_[k] == indices_[k - 1]) {
      throw ContractError("corrective term repeats a blendshape index");
    }
  }
  if (!offset_.allFinite()) {
    throw ContractError("corrective offset contains non-finite values");
  }
}

bool CorrectiveTerm::contains(Index i) const {
  const auto idx = indices();
  return std::find(idx.begin(), idx.end(), i) != idx.end();
}

double CorrectiveTerm::activation(const WeightVector& w) const {
  double p = 1.0;
  for (Index j : indices()) p *= w[j];
  return p;
}

double CorrectiveTerm::activation_without(const WeightVector& w,
                                          Index skip) const {
  double p = 1.0;
  for (Index j : indices()) {
    if (j != skip) p *= w[j];
  }
  return p;
}

bool canonical_less(const CorrectiveTerm& a, const CorrectiveTerm& b) {
  if (a.order_ != b.order_) return a.order_ < b.order_;
  return std::lexicographical_compare(a.indices_.begin(),
                                      a.indices_.begin() + a.order_,
                                      b.indices_.begin(),
                                      b.indices_.begin() + b.order_);
}

BlendshapeRig::BlendshapeRig(Mesh neutral, Eigen::MatrixXd blendshapes,
                             std::vector<CorrectiveTerm> corrections)
    : neutral_(std::move(neutral)),
      blendshapes_(std::move(blendshapes)),
      corrections_(std::move(corrections)) {
  const Index dim = neutral_.size();
  const Index m = blendshapes_.cols();
  if (blendshapes_.rows() != dim) {
    throw ContractError(fmt::format(
        "blendshape matrix has {} rows, neutral has {} coordinates",
        blendshapes_.rows(), dim));
  }
  if (!blendshapes_.allFinite()) {
    throw ContractError("blendshape matrix contains non-finite values");
  }

  std::sort(corrections_.begin(), corrections_.end(),
            [](const CorrectiveTerm& a, const CorrectiveTerm& b) {
              return canonical_less(a, b);
            });
  for (std::size_t t = 0; t < corrections_.size(); ++t) {
    const auto& term = corrections_[t];
    if (term.offset().size() != dim) {
      throw ContractError(fmt::format(
          "corrective offset has length {}, expected {}", term.offset().size(),
          dim));
    }
    if (term.indices().back() >= m) {
      throw ContractError(fmt::format(
          "corrective term references blendshape {} but rig has {}",
          term.indices().back(), m));
    }
    if (t > 0 && !canonical_less(corrections_[t - 1], term)) {
      throw ContractError("duplicate corrective term");
    }
  }

  squared_norms_ = blendshapes_.colwise().squaredNorm().transpose();

  incidence_.assign(static_cast<std::size_t>(m), {});
  for (std::size_t t = 0; t < corrections_.size(); ++t) {
    for (Index i : corrections_[t].indices()) {
      incidence_[static_cast<std::size_t>(i)].push_back(static_cast<Index>(t));
    }
  }
}

Index BlendshapeRig::correction_count(int order) const {
  return std::count_if(
      corrections_.begin(), corrections_.end(),
      [order](const CorrectiveTerm& t) { return t.order() == order; });
}

std::span<const Index> BlendshapeRig::terms_containing(Index i) const {
  detail::check_index(*this, i);
  return incidence_[static_cast<std::size_t>(i)];
}

namespace detail {

void check_weights(const BlendshapeRig& rig, const WeightVector& w) {
  if (w.size() != rig.blendshape_count()) {
    throw ContractError(fmt::format("weight vector has length {}, rig has {}",
                                    w.size(), rig.blendshape_count()));
  }
}

void check_index(const BlendshapeRig& rig, Index i) {
  if (i < 0 || i >= rig.blendshape_count()) {
    throw ContractError(fmt::format("blendshape index {} out of range [0, {})",
                                    i, rig.blendshape_count()));
  }
}

void check_target(const BlendshapeRig& rig, const Mesh& target) {
  if (target.size() != rig.dimension()) {
    throw ContractError(fmt::format("target mesh has {} coordinates, rig has {}",
                                    target.size(), rig.dimension()));
  }
}

void accumulate_rig(const BlendshapeRig& rig, const WeightVector& w,
                    RigKind kind, Vector& out) {
  out = rig.neutral().coords();
  const auto& basis = rig.blendshapes();
  // Zero weights are skipped; adding 0 * b_i would not change any entry.
  for (Index i = 0; i < basis.cols(); ++i) {
    if (w[i] != 0.0) out.noalias() += w[i] * basis.col(i);
  }
  if (kind == RigKind::Linear) return;
  for (const auto& term : rig.corrections()) {
    const double c = term.activation(w);
    if (c != 0.0) out.noalias() += c * term.offset();
  }
}

void compute_phi(const BlendshapeRig& rig, const WeightVector& w, Index i,
                 RigKind kind, Vector& out) {
  out = rig.blendshape(i);
  if (kind == RigKind::Linear) return;
  const auto terms = rig.corrections();
  for (Index t : rig.terms_containing(i)) {
    const auto& term = terms[static_cast<std::size_t>(t)];
    const double c = term.activation_without(w, i);
    if (c != 0.0) out.noalias() += c * term.offset();
  }
}

}  // namespace detail

Mesh evaluate_linear(const BlendshapeRig& rig, const WeightVector& w) {
  return evaluate(rig, w, RigKind::Linear);
}

Mesh evaluate_quartic(const BlendshapeRig& rig, const WeightVector& w) {
  return evaluate(rig, w, RigKind::Quartic);
}

Mesh evaluate(const BlendshapeRig& rig, const WeightVector& w, RigKind kind) {
  detail::check_weights(rig, w);
  Vector out(rig.dimension());
  detail::accumulate_rig(rig, w, kind, out);
  return Mesh(std::move(out));
}

Vector phi(const BlendshapeRig& rig, const WeightVector& w, Index i,
           RigKind kind) {
  detail::check_weights(rig, w);
  detail::check_index(rig, i);
  Vector out(rig.dimension());
  detail::compute_phi(rig, w, i, kind, out);
  return out;
}

Vector psi(const BlendshapeRig& rig, const WeightVector& w, Index i,
           const Mesh& target, RigKind kind) {
  detail::check_weights(rig, w);
  detail::check_index(rig, i);
  detail::check_target(rig, target);
  // f is affine in w_i, so f(w with w_i = 0) holds exactly the terms free of i.
  WeightVector without = w;
  without[i] = 0.0;
  Vector out(rig.dimension());
  detail::accumulate_rig(rig, without, kind, out);
  out -= target.coords();
  return out;
}

}  // namespace invrig
