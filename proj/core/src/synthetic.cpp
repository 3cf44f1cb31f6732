#include "invrig/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <fmt/format.h>

#include "invrig/errors.hpp"
#include "invrig/random.hpp"

namespace invrig {

namespace {

double choose(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (Index j = 1; j <= k; ++j) {
    c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  }
  return std::round(c);
}

double normal(Rng& rng) {
  // Box-Muller on engine bits so output does not depend on the standard
  // library's distribution implementation.
  const double u1 = 1.0 - uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

Eigen::Vector3d random_direction(Rng& rng) {
  Eigen::Vector3d d;
  do {
    d = {normal(rng), normal(rng), normal(rng)};
  } while (d.norm() < 1e-9);
  return d.normalized();
}

// Gaussian bump of displacement `peak * direction` around `center`.
Vector bump(const Vector& neutral, const Eigen::Vector3d& center, double radius,
            double peak, const Eigen::Vector3d& direction) {
  const Index n = neutral.size() / 3;
  Vector out(neutral.size());
  const double inv = 1.0 / (2.0 * radius * radius);
  for (Index v = 0; v < n; ++v) {
    const Eigen::Vector3d x = neutral.segment<3>(3 * v);
    const double g = peak * std::exp(-(x - center).squaredNorm() * inv);
    out.segment<3>(3 * v) = g * direction;
  }
  return out;
}

std::vector<std::vector<Index>> sample_tuples(Index m, Index order, Index count,
                                              Rng& rng) {
  std::vector<std::vector<Index>> out;
  if (count == 0) return out;
  const double total = choose(m, order);
  if (total <= 200000.0) {
    // Enumerate all combinations, then take a random subset in canonical order.
    std::vector<std::vector<Index>> all;
    std::vector<Index> comb(static_cast<std::size_t>(order));
    std::iota(comb.begin(), comb.end(), Index{0});
    while (true) {
      all.push_back(comb);
      Index pos = order - 1;
      while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == m - order + pos) --pos;
      if (pos < 0) break;
      ++comb[static_cast<std::size_t>(pos)];
      for (Index j = pos + 1; j < order; ++j) {
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
    std::vector<Index> pick(all.size());
    std::iota(pick.begin(), pick.end(), Index{0});
    shuffle(pick, rng);
    pick.resize(static_cast<std::size_t>(count));
    std::sort(pick.begin(), pick.end());
    for (Index p : pick) out.push_back(all[static_cast<std::size_t>(p)]);
    return out;
  }
  std::set<std::vector<Index>> seen;
  while (static_cast<Index>(seen.size()) < count) {
    std::set<Index> tuple;
    while (static_cast<Index>(tuple.size()) < order) {
      tuple.insert(static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(m))));
    }
    seen.emplace(tuple.begin(), tuple.end());
  }
  return {seen.begin(), seen.end()};
}

std::vector<Eigen::Vector3d> farthest_points(const Vector& neutral, Index count,
                                             Rng& rng) {
  const Index n = neutral.size() / 3;
  std::vector<Eigen::Vector3d> out;
  if (count == 0) return out;
  Vector dist = Vector::Constant(n, std::numeric_limits<double>::infinity());
  Index pick = static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n)));
  for (Index c = 0; c < count; ++c) {
    const Eigen::Vector3d p = neutral.segment<3>(3 * pick);
    out.push_back(p);
    for (Index v = 0; v < n; ++v) {
      dist[v] = std::min(dist[v], (neutral.segment<3>(3 * v) - p).squaredNorm());
    }
    dist.maxCoeff(&pick);
  }
  return out;
}

double smoothstep(double x) { return x * x * (3.0 - 2.0 * x); }

}  // namespace

void SyntheticRigSpec::validate() const {
  if (blendshapes < 0 || vertices < 1) {
    throw ContractError("rig needs at least one vertex and m >= 0");
  }
  const std::pair<Index, int> levels[] = {{pairs, 2}, {triplets, 3}, {quads, 4}};
  for (const auto& [count, order] : levels) {
    if (count < 0 || static_cast<double>(count) > choose(blendshapes, order)) {
      throw ContractError(fmt::format(
          "{} corrections of order {} impossible with {} blendshapes", count,
          order, blendshapes));
    }
  }
  if (!(head_width_cm > 0) || !(influence_radius > 0) || !(peak_median_cm > 0) ||
      peak_log_sd < 0 || correction_scale < 0 || regions < 0) {
    throw ContractError("synthetic rig scale parameters out of range");
  }
}

BlendshapeRig generate_rig(const SyntheticRigSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const Index n = spec.vertices;
  const Index m = spec.blendshapes;

  // Front half of an ellipsoid, roughly head shaped (x: ear to ear).
  const Eigen::Vector3d semi_axes(0.5 * spec.head_width_cm,
                                  0.6 * spec.head_width_cm,
                                  0.4 * spec.head_width_cm);
  Vector neutral(3 * n);
  for (Index v = 0; v < n; ++v) {
    Eigen::Vector3d d = random_direction(rng);
    d.z() = std::abs(d.z());
    neutral.segment<3>(3 * v) = d.cwiseProduct(semi_axes);
  }

  std::vector<Eigen::Vector3d> region_centers;
  for (Index r = 0; r < (spec.spread_centers ? 0 : spec.regions); ++r) {
    region_centers.push_back(neutral.segment<3>(
        3 * static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n)))));
  }

  const double base_radius = spec.influence_radius * spec.head_width_cm;
  const auto spread = spec.spread_centers ? farthest_points(neutral, m, rng)
                                          : std::vector<Eigen::Vector3d>{};
  std::vector<Eigen::Vector3d> centers(static_cast<std::size_t>(m));
  std::vector<double> radii(static_cast<std::size_t>(m));
  std::vector<double> peaks(static_cast<std::size_t>(m));
  Eigen::MatrixXd basis(3 * n, m);
  for (Index i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    Eigen::Vector3d center = neutral.segment<3>(
        3 * static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n))));
    if (!spread.empty()) {
      center = spread[k];
    } else if (!region_centers.empty()) {
      const auto r = uniform_below(rng, region_centers.size());
      // Within one radius of the region center, so shapes of a region overlap.
      center = region_centers[r] + random_direction(rng) * base_radius * uniform_unit(rng);
    }
    centers[k] = center;
    radii[k] = base_radius * uniform(rng, 0.7, 1.3);
    peaks[k] = spec.peak_median_cm * std::exp(spec.peak_log_sd * normal(rng));
    basis.col(i) = bump(neutral, center, radii[k], peaks[k], random_direction(rng));
  }

  std::vector<CorrectiveTerm> terms;
  const std::pair<Index, Index> levels[] = {{2, spec.pairs}, {3, spec.triplets}, {4, spec.quads}};
  for (const auto& [order, count] : levels) {
    for (const auto& tuple : sample_tuples(m, order, count, rng)) {
      Eigen::Vector3d center = Eigen::Vector3d::Zero();
      double radius = 0.0;
      double peak = 0.0;
      for (Index j : tuple) {
        const auto k = static_cast<std::size_t>(j);
        center += centers[k];
        radius += radii[k];
        peak += peaks[k];
      }
      const double inv = 1.0 / static_cast<double>(order);
      terms.emplace_back(tuple, bump(neutral, center * inv, radius * inv,
                                     spec.correction_scale * peak * inv,
                                     random_direction(rng)));
    }
  }
  return BlendshapeRig(Mesh(std::move(neutral)), std::move(basis), std::move(terms));
}

GeneratedSequence generate_sequence(const BlendshapeRig& rig,
                                    const SequenceSpec& spec) {
  const Index m = rig.blendshape_count();
  if (spec.frames < 0 || spec.sparsity < 0 || spec.sparsity > m) {
    throw ContractError(fmt::format("sequence needs 0 <= sparsity <= {}", m));
  }
  if (spec.keypose_interval < 1) throw ContractError("keypose interval must be >= 1");
  if (!(0.0 < spec.min_activation && spec.min_activation <= spec.max_activation &&
        spec.max_activation <= 1.0)) {
    throw ContractError("activations must satisfy 0 < min <= max <= 1");
  }
  Rng rng(spec.seed);
  const Index k = spec.sparsity;
  const Index swaps = std::min({k, m - k,
                                spec.swaps_per_keypose > 0 ? spec.swaps_per_keypose
                                                           : std::max<Index>(1, k / 8)});

  auto draw = [&] { return uniform(rng, spec.min_activation, spec.max_activation); };

  // Current keypose: values for every blendshape (zero when inactive).
  std::vector<Index> all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), Index{0});
  shuffle(all, rng);
  std::vector<char> active(static_cast<std::size_t>(m), 0);
  WeightVector key = WeightVector::Zero(m);
  for (Index j = 0; j < k; ++j) {
    const auto i = all[static_cast<std::size_t>(j)];
    active[static_cast<std::size_t>(i)] = 1;
    key[i] = draw();
  }

  auto next_keypose = [&] {
    std::vector<Index> on, off;
    for (Index i = 0; i < m; ++i) (active[static_cast<std::size_t>(i)] ? on : off).push_back(i);
    shuffle(on, rng);
    shuffle(off, rng);
    for (Index s = 0; s < swaps; ++s) {
      active[static_cast<std::size_t>(on[static_cast<std::size_t>(s)])] = 0;
      active[static_cast<std::size_t>(off[static_cast<std::size_t>(s)])] = 1;
    }
    WeightVector next = WeightVector::Zero(m);
    for (Index i = 0; i < m; ++i) {
      if (active[static_cast<std::size_t>(i)]) next[i] = draw();
    }
    return next;
  };

  Eigen::MatrixXd weights(m, spec.frames);
  WeightVector from = key;
  WeightVector to = next_keypose();
  const Index interval = spec.keypose_interval;
  for (Index t = 0; t < spec.frames; ++t) {
    if (t > 0 && t % interval == 0) {
      from = to;
      to = next_keypose();
    }
    const double tau = static_cast<double>(t % interval) / static_cast<double>(interval);
    for (Index i = 0; i < m; ++i) {
      const double a = from[i];
      const double b = to[i];
      double value = 0.0;
      if (a > 0.0 && b > 0.0) {
        value = a + (b - a) * smoothstep(tau);
      } else if (a > 0.0) {
        value = tau < 0.5 ? a * (1.0 - smoothstep(2.0 * tau)) : 0.0;
      } else if (b > 0.0) {
        value = tau < 0.5 ? 0.0 : b * smoothstep(2.0 * tau - 1.0);
      }
      weights(i, t) = value;
    }
  }

  GeneratedSequence seq;
  seq.weights = Animation::from_weights(weights);
  seq.clean.kind = FrameKind::Mesh;
  seq.clean.frames.resize(rig.dimension(), spec.frames);
  Vector buf(rig.dimension());
  for (Index t = 0; t < spec.frames; ++t) {
    detail::accumulate_rig(rig, weights.col(t), RigKind::Quartic, buf);
    seq.clean.frames.col(t) = buf;
  }
  return seq;
}

Mesh add_noise(const Mesh& mesh, double sigma2, std::uint64_t seed) {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw ContractError("noise variance must be finite and >= 0");
  }
  if (sigma2 == 0.0) return mesh;
  Rng rng(seed);
  const double sd = std::sqrt(sigma2);
  Vector out = mesh.coords();
  for (Index k = 0; k < out.size(); ++k) out[k] += sd * normal(rng);
  return Mesh(std::move(out));
}

Animation add_noise(const Animation& clean, double sigma2, std::uint64_t seed) {
  if (clean.kind != FrameKind::Mesh) throw ContractError("noise applies to mesh frames");
  if (clean.noise.noisy) throw ContractError("animation is already noisy");
  Animation out = clean;
  out.noise = {true, sigma2, seed};
  for (Index t = 0; t < clean.frame_count(); ++t) {
    out.frames.col(t) =
        add_noise(clean.mesh(t), sigma2, derive_seed(seed, static_cast<std::uint64_t>(t))).coords();
  }
  return out;
}

}  // namespace invrig
