#include "pdcv/rng.hpp"

#include <stdexcept>

namespace pdcv {

std::size_t Rng::categorical(std::span<const double> probs) {
  if (probs.empty()) {
    throw std::invalid_argument("categorical: empty distribution");
  }
  const double u = uniform();
  double cumulative = 0.0;
  std::size_t last_positive = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding can leave the cumulative sum a hair below 1.
  if (last_positive == probs.size()) {
    throw std::invalid_argument("categorical: no positive probability");
  }
  return last_positive;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t cell_key,
                          std::uint64_t run_index) {
  return mix64(mix64(mix64(base_seed) ^ cell_key) ^ run_index);
}

}  // namespace pdcv
