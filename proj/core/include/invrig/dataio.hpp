#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "invrig/mesh.hpp"
#include "invrig/rig.hpp"

namespace invrig {

inline constexpr int kRigFormatVersion = 1;
inline constexpr int kAnimationFormatVersion = 1;

enum class FrameKind { Weights, Mesh };

std::string_view to_string(FrameKind kind);

/// How the frames of an animation were produced. sigma2 is the variance of
/// the per-coordinate Gaussian noise.
struct NoiseRecord {
  bool noisy = false;
  double sigma2 = 0.0;
  std::uint64_t seed = 0;
};

/// A sequence of equally sized frames: weight vectors (width m) or meshes
/// (width 3n), stored one frame per column.
struct Animation {
  FrameKind kind = FrameKind::Weights;
  Eigen::MatrixXd frames;
  NoiseRecord noise;

  Index frame_count() const { return frames.cols(); }
  Index width() const { return frames.rows(); }

  Mesh mesh(Index t) const;
  WeightVector weights(Index t) const;
  std::vector<Mesh> meshes() const;

  static Animation from_meshes(std::span<const Mesh> meshes, NoiseRecord noise = {});
  static Animation from_weights(const Eigen::MatrixXd& weights);
};

/// Text rig format, version 1:
///
///   invrig-rig 1
///   vertices <n>
///   blendshapes <m>
///   corrections <K>
///   neutral
///   <n lines of "x y z">
///   blendshape <i>            (m blocks, i = 0..m-1)
///   <n lines>
///   correction <order> <i> <j> [<k> [<l>]]   (K blocks, 0-based indices)
///   <n lines>
///
/// Numbers are written with 17 significant digits, so load(save(rig))
/// reproduces every value exactly.
void save_rig(std::ostream& out, const BlendshapeRig& rig);
BlendshapeRig load_rig(std::istream& in);
void save_rig(const std::filesystem::path& path, const BlendshapeRig& rig);
BlendshapeRig load_rig(const std::filesystem::path& path);

/// Text animation format, version 1:
///
///   invrig-anim 1
///   kind weights|mesh
///   frames <N>
///   width <L>
///   noise clean|noisy
///   sigma2 <variance>
///   seed <u64>
///   frame <t>                 (N blocks)
///   <L numbers; three per line for meshes, one line for weights>
void save_animation(std::ostream& out, const Animation& anim);
Animation load_animation(std::istream& in);
void save_animation(const std::filesystem::path& path, const Animation& anim);
Animation load_animation(const std::filesystem::path& path);

}  // namespace invrig
