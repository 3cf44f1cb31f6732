#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "invrig/dataio.hpp"
#include "invrig/errors.hpp"
#include "invrig/synthetic.hpp"
#include "test_support.hpp"

namespace invrig {
namespace {

void expect_same_rig(const BlendshapeRig& a, const BlendshapeRig& b) {
  EXPECT_EQ(a.neutral(), b.neutral());
  EXPECT_EQ(a.blendshapes(), b.blendshapes());
  ASSERT_EQ(a.corrections().size(), b.corrections().size());
  for (std::size_t t = 0; t < a.corrections().size(); ++t) {
    const auto& x = a.corrections()[t];
    const auto& y = b.corrections()[t];
    EXPECT_TRUE(std::equal(x.indices().begin(), x.indices().end(), y.indices().begin(),
                           y.indices().end()));
    EXPECT_EQ(x.offset(), y.offset());
  }
}

TEST(RigFormat, RoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto rig = testing::random_rig(7, 9, 5, 3, 2, seed);
    std::stringstream buffer;
    save_rig(buffer, rig);
    expect_same_rig(rig, load_rig(buffer));
  }
}

TEST(RigFormat, ExtremeValuesSurvive) {
  Vector neutral(3);
  neutral << 1e-300, -0.1, 1.0 / 3.0;
  Eigen::MatrixXd basis(3, 1);
  basis << std::nextafter(1.0, 2.0), -1e300, 5e-324;
  const BlendshapeRig rig(Mesh(neutral), basis);
  std::stringstream buffer;
  save_rig(buffer, rig);
  expect_same_rig(rig, load_rig(buffer));
}

TEST(RigFormat, RejectsMalformedInput) {
  const auto rig = testing::random_rig(3, 2, 1, 0, 0, 1);
  std::stringstream buffer;
  save_rig(buffer, rig);
  const std::string text = buffer.str();

  auto load_text = [](const std::string& s) {
    std::istringstream in(s);
    return load_rig(in);
  };
  EXPECT_THROW(load_text(""), DataError);
  EXPECT_THROW(load_text("invrig-rig 2\n"), DataError);
  EXPECT_THROW(load_text(text.substr(0, text.size() / 2)), DataError);
  std::string bad_number = text;
  bad_number.replace(bad_number.find("neutral\n") + 8, 1, "x");
  EXPECT_THROW(load_text(bad_number), DataError);
  std::string bad_index = text;
  const auto pos = bad_index.find("correction 2 ");
  ASSERT_NE(pos, std::string::npos);
  bad_index.replace(pos, bad_index.find('\n', pos) - pos, "correction 2 0 0");
  EXPECT_THROW(load_text(bad_index), DataError);
}

TEST(AnimationFormat, RoundTripIsExact) {
  const auto rig = testing::random_rig(5, 4, 2, 0, 0, 2);
  std::vector<Mesh> frames;
  for (std::uint64_t t = 0; t < 4; ++t) frames.push_back(testing::random_mesh(4, 10 + t));
  const auto meshes = Animation::from_meshes(frames, NoiseRecord{true, 0.03, 77});
  std::stringstream buffer;
  save_animation(buffer, meshes);
  const auto back = load_animation(buffer);
  EXPECT_EQ(back.kind, FrameKind::Mesh);
  EXPECT_EQ(back.frames, meshes.frames);
  EXPECT_TRUE(back.noise.noisy);
  EXPECT_EQ(back.noise.sigma2, 0.03);
  EXPECT_EQ(back.noise.seed, 77u);

  const auto weights = Animation::from_weights(Eigen::MatrixXd::Random(5, 6));
  std::stringstream wbuf;
  save_animation(wbuf, weights);
  const auto wback = load_animation(wbuf);
  EXPECT_EQ(wback.kind, FrameKind::Weights);
  EXPECT_EQ(wback.frames, weights.frames);
  EXPECT_FALSE(wback.noise.noisy);
}

TEST(AnimationFormat, RejectsMalformedInput) {
  std::istringstream wrong_kind("invrig-anim 1\nkind volume\n");
  EXPECT_THROW(load_animation(wrong_kind), DataError);
  const auto anim = Animation::from_weights(Eigen::MatrixXd::Ones(2, 2));
  std::stringstream buffer;
  save_animation(buffer, anim);
  std::string text = buffer.str();
  std::istringstream truncated(text.substr(0, text.size() - 4));
  EXPECT_THROW(load_animation(truncated), DataError);
}

TEST(Files, PathOverloads) {
  const auto dir = std::filesystem::temp_directory_path() / "invrig_dataio_test";
  std::filesystem::create_directories(dir);
  const auto rig = testing::random_rig(3, 2, 1, 0, 0, 3);
  save_rig(dir / "rig.txt", rig);
  expect_same_rig(rig, load_rig(dir / "rig.txt"));
  EXPECT_THROW(load_rig(dir / "missing.txt"), DataError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace invrig
