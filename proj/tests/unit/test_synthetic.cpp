#include <gtest/gtest.h>

#include "invrig/errors.hpp"
#include "invrig/metrics.hpp"
#include "invrig/synthetic.hpp"

namespace invrig {
namespace {

SyntheticRigSpec small_spec() {
  SyntheticRigSpec spec;
  spec.blendshapes = 20;
  spec.vertices = 200;
  spec.pairs = 15;
  spec.triplets = 8;
  spec.quads = 4;
  return spec;
}

TEST(GenerateRig, DefaultDimensions) {
  SyntheticRigSpec spec;
  spec.vertices = 500;  // full 10000 vertices is slow in a unit test; counts are what matter
  const auto rig = generate_rig(spec);
  EXPECT_EQ(rig.blendshape_count(), 102);
  EXPECT_EQ(rig.vertex_count(), 500);
  EXPECT_EQ(rig.correction_count(2), 185);
  EXPECT_EQ(rig.correction_count(3), 130);
  EXPECT_EQ(rig.correction_count(4), 50);
}

TEST(GenerateRig, LinearOnlyWhenNoCorrections) {
  auto spec = small_spec();
  spec.pairs = spec.triplets = spec.quads = 0;
  EXPECT_FALSE(generate_rig(spec).has_corrections());
}

TEST(GenerateRig, Deterministic) {
  const auto a = generate_rig(small_spec());
  const auto b = generate_rig(small_spec());
  EXPECT_EQ(a.neutral(), b.neutral());
  EXPECT_EQ(a.blendshapes(), b.blendshapes());
  for (std::size_t t = 0; t < a.corrections().size(); ++t) {
    EXPECT_EQ(a.corrections()[t].offset(), b.corrections()[t].offset());
  }
  auto other = small_spec();
  other.seed = 99;
  EXPECT_NE(generate_rig(other).blendshapes(), a.blendshapes());
  other = small_spec();
  other.spread_centers = true;
  EXPECT_NO_THROW(generate_rig(other));
}

TEST(GenerateRig, RejectsImpossibleCounts) {
  auto spec = small_spec();
  spec.blendshapes = 3;
  spec.quads = 1;
  EXPECT_THROW(spec.validate(), ContractError);
}

TEST(GenerateSequence, ZeroSparsityIsNeutral) {
  const auto rig = generate_rig(small_spec());
  SequenceSpec seq;
  seq.frames = 10;
  seq.sparsity = 0;
  const auto out = generate_sequence(rig, seq);
  for (Index t = 0; t < 10; ++t) EXPECT_EQ(out.clean.mesh(t), rig.neutral());
}

TEST(GenerateSequence, CleanFramesAreQuarticEvaluations) {
  const auto rig = generate_rig(small_spec());
  SequenceSpec seq;
  seq.frames = 60;
  seq.sparsity = 6;
  const auto out = generate_sequence(rig, seq);
  EXPECT_FALSE(out.clean.noise.noisy);
  for (Index t = 0; t < 60; ++t) {
    const auto w = out.weights.weights(t);
    EXPECT_GE(w.minCoeff(), 0.0);
    EXPECT_LE(w.maxCoeff(), 1.0);
    EXPECT_LE(cardinality(w, 0.0), 6);
    EXPECT_EQ(out.clean.mesh(t), evaluate_quartic(rig, w));
  }
}

TEST(GenerateSequence, TracksAreSmooth) {
  const auto rig = generate_rig(small_spec());
  SequenceSpec seq;
  seq.frames = 240;
  seq.sparsity = 8;
  const auto out = generate_sequence(rig, seq);
  // Smoothstep between keyposes 24 frames apart: second differences stay
  // near 6/24^2 per unit change, so total roughness per track is tiny.
  const auto rough = track_roughness(out.weights.frames);
  EXPECT_LT(rough.maxCoeff(), 0.05);
  EXPECT_GT(rough.maxCoeff(), 0.0);
}

TEST(AddNoise, ZeroVarianceIsIdentity) {
  const Mesh m(Vector::LinSpaced(30, -1.0, 1.0));
  EXPECT_EQ(add_noise(m, 0.0, 4), m);
  EXPECT_THROW(add_noise(m, -1.0, 4), ContractError);
}

TEST(AddNoise, SampleVarianceMatches) {
  const Mesh m = Mesh::zeros(20000);  // 60000 coordinates
  for (double sigma2 : {0.01, 0.03, 0.1}) {
    const Mesh noisy = add_noise(m, sigma2, 5);
    const Vector& x = noisy.coords();
    const double mean = x.mean();
    const double var = (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
    EXPECT_NEAR(var / sigma2, 1.0, 0.05);
    EXPECT_NEAR(mean, 0.0, 5.0 * std::sqrt(sigma2 / static_cast<double>(x.size())));
  }
  EXPECT_EQ(add_noise(m, 0.03, 5), add_noise(m, 0.03, 5));
}

TEST(AddNoise, AnimationRecordsNoise) {
  const auto rig = generate_rig(small_spec());
  SequenceSpec seq;
  seq.frames = 5;
  seq.sparsity = 3;
  const auto clean = generate_sequence(rig, seq).clean;
  const auto noisy = add_noise(clean, 0.03, 11);
  EXPECT_TRUE(noisy.noise.noisy);
  EXPECT_EQ(noisy.noise.sigma2, 0.03);
  EXPECT_EQ(noisy.noise.seed, 11u);
  EXPECT_NE(noisy.frames.col(0), noisy.frames.col(1) - clean.frames.col(1) + clean.frames.col(0));
  EXPECT_THROW(add_noise(noisy, 0.03, 11), ContractError);
}

}  // namespace
}  // namespace invrig
