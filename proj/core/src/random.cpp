#include "invrig/random.hpp"

#include <utility>

namespace invrig {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  // 2^64 mod bound; draws below it would bias the low residues.
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x < threshold);
  return x % bound;
}

double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void shuffle(std::span<Index> values, Rng& rng) {
  for (std::size_t k = values.size(); k > 1; --k) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, k));
    std::swap(values[k - 1], values[j]);
  }
}

}  // namespace invrig
