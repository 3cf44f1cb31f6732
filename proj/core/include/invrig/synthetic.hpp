#pragma once

#include <cstdint>

#include "invrig/dataio.hpp"
#include "invrig/rig.hpp"

namespace invrig {

/// Parameters for a procedurally generated face-like rig. Defaults match a
/// production-sized head: m = 102, n = 10000, with 185 pairs, 130 triplets
/// and 50 quadruplets of corrections.
struct SyntheticRigSpec {
  Index blendshapes = 102;
  Index vertices = 10000;
  Index pairs = 185;
  Index triplets = 130;
  Index quads = 50;

  /// Ear-to-ear width of the neutral head, in centimeters.
  double head_width_cm = 18.0;
  /// Gaussian falloff radius of each blendshape, as a fraction of head width.
  double influence_radius = 0.2;
  /// Peak displacement is log-normal with this median (cm) and log-sd.
  double peak_median_cm = 0.5;
  double peak_log_sd = 0.5;
  /// Blendshape centers are drawn around this many region centers (0 places
  /// every center independently). Fewer regions give more overlap between
  /// blendshapes, like a real face where many shapes act on the mouth.
  Index regions = 5;
  /// Place centers by farthest-point sampling instead (ignores `regions`).
  /// Together with a small radius this yields a nearly orthogonal basis.
  bool spread_centers = false;
  /// Corrective peaks relative to the mean peak of their parents.
  double correction_scale = 0.1;

  std::uint64_t seed = 1;

  /// Throws ContractError if the counts cannot be realized.
  void validate() const;
};

BlendshapeRig generate_rig(const SyntheticRigSpec& spec);

/// Ground-truth animation parameters. Every frame has at most `sparsity`
/// active weights; tracks move between keyposes with smoothstep easing, and
/// weights that leave or join the active set fade out before the midpoint
/// of a segment or fade in after it.
struct SequenceSpec {
  Index frames = 600;
  Index sparsity = 57;
  Index keypose_interval = 24;
  /// Active weights replaced at each keypose; 0 picks max(1, sparsity / 8).
  Index swaps_per_keypose = 0;
  double min_activation = 0.1;
  double max_activation = 1.0;
  std::uint64_t seed = 2;
};

struct GeneratedSequence {
  Animation weights;  // m x N
  Animation clean;    // 3n x N, f_Q of each weight frame
};

GeneratedSequence generate_sequence(const BlendshapeRig& rig,
                                    const SequenceSpec& spec);

/// Adds i.i.d. N(0, sigma2) noise to every coordinate. sigma2 is a variance.
Mesh add_noise(const Mesh& mesh, double sigma2, std::uint64_t seed);

/// Per-frame noise with seeds derived from `seed` and the frame index. The
/// result is flagged noisy and records sigma2 and seed.
Animation add_noise(const Animation& clean, double sigma2, std::uint64_t seed);

}  // namespace invrig
