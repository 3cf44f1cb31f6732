#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "invrig/errors.hpp"
#include "invrig/rig.hpp"
#include "test_support.hpp"

namespace invrig {
namespace {

using testing::max_rel_diff;
using testing::naive_evaluate;
using testing::random_rig;
using testing::random_weights;

BlendshapeRig two_shape_pair_rig() {
  Vector neutral(6);
  neutral << 1, 2, 3, 4, 5, 6;
  Eigen::MatrixXd basis(6, 2);
  basis << 1, 0, 0, 1, 2, 0, 0, 2, 3, 1, 1, 3;
  Vector offset(6);
  offset << 0.5, -0.5, 0.25, -0.25, 1, -1;
  const Index pair[] = {0, 1};
  return BlendshapeRig(Mesh(neutral), basis, {CorrectiveTerm(pair, offset)});
}

TEST(Mesh, RejectsBadLength) {
  EXPECT_THROW(Mesh(Vector::Zero(4)), ContractError);
  EXPECT_NO_THROW(Mesh(Vector::Zero(6)));
}

TEST(CorrectiveTerm, SortsAndValidates) {
  const Index idx[] = {3, 1};
  CorrectiveTerm term(idx, Vector::Zero(3));
  EXPECT_EQ(term.order(), 2);
  EXPECT_EQ(term.indices()[0], 1);
  EXPECT_EQ(term.indices()[1], 3);
  const Index dup[] = {2, 2};
  EXPECT_THROW(CorrectiveTerm(dup, Vector::Zero(3)), ContractError);
  const Index single[] = {2};
  EXPECT_THROW(CorrectiveTerm(single, Vector::Zero(3)), ContractError);
}

TEST(BlendshapeRig, RejectsOutOfRangeAndDuplicateTerms) {
  const Index bad[] = {0, 5};
  EXPECT_THROW(BlendshapeRig(Mesh::zeros(1), Eigen::MatrixXd::Zero(3, 2),
                             {CorrectiveTerm(bad, Vector::Zero(3))}),
               ContractError);
  const Index a[] = {0, 1};
  const Index b[] = {1, 0};
  EXPECT_THROW(BlendshapeRig(Mesh::zeros(1), Eigen::MatrixXd::Zero(3, 2),
                             {CorrectiveTerm(a, Vector::Zero(3)),
                              CorrectiveTerm(b, Vector::Zero(3))}),
               ContractError);
  EXPECT_THROW(BlendshapeRig(Mesh::zeros(2), Eigen::MatrixXd::Zero(3, 2)), ContractError);
}

TEST(EvaluateLinear, ZeroWeightsGiveNeutral) {
  const auto rig = random_rig(6, 5, 3, 2, 1, 11);
  EXPECT_EQ(evaluate_linear(rig, WeightVector::Zero(6)), rig.neutral());
}

TEST(EvaluateLinear, SingleShapeIsEntrywiseSum) {
  Vector neutral(3);
  neutral << 1.5, -2.0, 0.25;
  Eigen::MatrixXd basis(3, 1);
  basis << 0.5, 0.5, -1.0;
  const BlendshapeRig rig(Mesh(neutral), basis);
  const Mesh out = evaluate_linear(rig, WeightVector::Ones(1));
  Vector expected(3);
  expected << 2.0, -1.5, -0.75;
  EXPECT_EQ(out.coords(), expected);
}

TEST(EvaluateLinear, MatchesNaiveSummation) {
  const auto rig = random_rig(10, 20, 0, 0, 0, 12);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto w = random_weights(10, 100 + s);
    EXPECT_LE(max_rel_diff(evaluate_linear(rig, w).coords(), naive_evaluate(rig, w, false)), 1e-12);
  }
}

TEST(EvaluateQuartic, ZeroWeightsGiveNeutral) {
  const auto rig = random_rig(6, 5, 4, 3, 2, 13);
  EXPECT_EQ(evaluate_quartic(rig, WeightVector::Zero(6)), rig.neutral());
}

TEST(EvaluateQuartic, UnitPairWeights) {
  const auto rig = two_shape_pair_rig();
  const Mesh out = evaluate_quartic(rig, WeightVector::Ones(2));
  const Vector expected = rig.neutral().coords() + rig.blendshape(0) + rig.blendshape(1) +
                          rig.corrections()[0].offset();
  EXPECT_LE((out.coords() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EvaluateQuartic, MatchesNaiveTermByTerm) {
  const auto rig = random_rig(12, 15, 10, 8, 5, 14);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto w = random_weights(12, 200 + s);
    EXPECT_LE(max_rel_diff(evaluate_quartic(rig, w).coords(), naive_evaluate(rig, w, true)), 1e-12);
  }
}

TEST(EvaluateQuartic, IndependentOfTermSupplyOrder) {
  const auto rig = random_rig(8, 6, 6, 4, 2, 15);
  std::vector<CorrectiveTerm> reversed(rig.corrections().rbegin(), rig.corrections().rend());
  const BlendshapeRig shuffled(rig.neutral(), rig.blendshapes(), reversed);
  const auto w = random_weights(8, 16);
  EXPECT_EQ(evaluate_quartic(rig, w), evaluate_quartic(shuffled, w));
}

TEST(Phi, LinearRigGivesColumnExactly) {
  const auto rig = random_rig(5, 4, 0, 0, 0, 17);
  const auto w = random_weights(5, 18);
  for (Index i = 0; i < 5; ++i) EXPECT_EQ(phi(rig, w, i), Vector(rig.blendshape(i)));
}

TEST(Phi, ZeroPartnerSuppressesCorrection) {
  const auto rig = two_shape_pair_rig();
  WeightVector w(2);
  w << 0.7, 0.0;
  EXPECT_EQ(phi(rig, w, 0), Vector(rig.blendshape(0)));
  w[1] = 0.5;
  EXPECT_EQ(phi(rig, w, 0), Vector(rig.blendshape(0) + 0.5 * rig.corrections()[0].offset()));
}

TEST(Phi, QuarticIsAffineInEachWeight) {
  const auto rig = random_rig(10, 8, 12, 8, 4, 19);
  const auto w = random_weights(10, 20);
  for (Index i = 0; i < 10; ++i) {
    WeightVector hi = w, lo = w;
    hi[i] = 1.0;
    lo[i] = 0.0;
    const Vector slope = evaluate_quartic(rig, hi).coords() - evaluate_quartic(rig, lo).coords();
    EXPECT_LE(max_rel_diff(slope, phi(rig, w, i)), 1e-10);
    WeightVector mid = w;
    mid[i] = 0.37;
    const Vector affine = evaluate_quartic(rig, lo).coords() + 0.37 * slope;
    EXPECT_LE(max_rel_diff(evaluate_quartic(rig, mid).coords(), affine), 1e-10);
  }
}

TEST(Psi, LinearZeroWeights) {
  const auto rig = random_rig(4, 3, 0, 0, 0, 21);
  const Mesh target = testing::random_mesh(3, 22);
  const Vector expected = rig.neutral().coords() - target.coords();
  EXPECT_EQ(psi(rig, WeightVector::Zero(4), 1, target, RigKind::Linear), expected);
}

TEST(Psi, VanishesAtNeutralTarget) {
  const auto rig = random_rig(4, 3, 2, 1, 0, 23);
  const Vector out = psi(rig, WeightVector::Zero(4), 2, rig.neutral());
  EXPECT_EQ(out, Vector::Zero(rig.dimension()));
}

TEST(Psi, DecompositionIdentity) {
  const auto rig = random_rig(14, 10, 20, 12, 6, 24);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto w = random_weights(14, 300 + s, 0.7);
    const Mesh target = testing::random_mesh(10, 400 + s, 3.0);
    const Index i = static_cast<Index>(s % 14);
    for (RigKind kind : {RigKind::Linear, RigKind::Quartic}) {
      const Vector lhs = evaluate(rig, w, kind).coords() - target.coords();
      const Vector rhs = w[i] * phi(rig, w, i, kind) + psi(rig, w, i, target, kind);
      EXPECT_LE((lhs - rhs).norm(), 1e-10);
    }
  }
}

TEST(Rig, RejectsBadWeightsAndIndices) {
  const auto rig = random_rig(4, 3, 1, 0, 0, 25);
  EXPECT_THROW(evaluate_quartic(rig, WeightVector::Zero(3)), ContractError);
  EXPECT_THROW(phi(rig, WeightVector::Zero(4), 4), ContractError);
  EXPECT_THROW(psi(rig, WeightVector::Zero(4), 0, Mesh::zeros(2)), ContractError);
}

}  // namespace
}  // namespace invrig
