#include <gtest/gtest.h>

#include "invrig/errors.hpp"
#include "invrig/pipeline.hpp"
#include "invrig/synthetic.hpp"

namespace invrig {
namespace {

struct Fixture {
  BlendshapeRig rig;
  GeneratedSequence seq;
  Animation noisy;
};

Fixture make_fixture() {
  SyntheticRigSpec spec;
  spec.blendshapes = 16;
  spec.vertices = 120;
  spec.pairs = 10;
  spec.triplets = 5;
  spec.quads = 2;
  auto rig = generate_rig(spec);
  SequenceSpec s;
  s.frames = 12;
  s.sparsity = 5;
  auto seq = generate_sequence(rig, s);
  auto noisy = add_noise(seq.clean, 0.01, 3);
  return {std::move(rig), std::move(seq), std::move(noisy)};
}

TEST(FitSequence, ThreadCountDoesNotChangeResults) {
  const auto f = make_fixture();
  SolverConfig config;
  config.alpha = 0.2;
  config.passes = 3;
  config.ordering = {OrderingKind::Random, 42};
  const auto one = fit_sequence(f.rig, f.noisy, config, 1);
  const auto four = fit_sequence(f.rig, f.noisy, config, 4);
  EXPECT_EQ(one.weights, four.weights);
  EXPECT_EQ(one.reports.size(), 12u);
  EXPECT_EQ(one.solve_times().size(), 12u);
}

TEST(FitSequence, RejectsBadInputs) {
  const auto f = make_fixture();
  SolverConfig config;
  EXPECT_THROW(fit_sequence(f.rig, f.seq.weights, config), DataError);
  EXPECT_THROW(fit_sequence(f.rig, f.noisy, config, 0), ContractError);
  config.observer = [](const UpdateEvent&) {};
  EXPECT_THROW(fit_sequence(f.rig, f.noisy, config, 2), ContractError);
}

TEST(EvaluateSequence, RefusesNoisyReference) {
  const auto f = make_fixture();
  const auto fit = fit_sequence(f.rig, f.noisy, SolverConfig{});
  EXPECT_THROW(evaluate_sequence(f.rig, fit.weights, f.noisy), DataError);
  const auto table = evaluate_sequence(f.rig, fit.weights, f.seq.clean, fit.solve_times());
  EXPECT_EQ(table.per_frame.size(), 12u);
}

TEST(EvaluateSequence, GroundTruthScoresZero) {
  const auto f = make_fixture();
  const auto table = evaluate_sequence(f.rig, f.seq.weights.frames, f.seq.clean);
  for (const auto& row : table.per_frame) EXPECT_EQ(row.rmse_mean, 0.0);
}

}  // namespace
}  // namespace invrig
