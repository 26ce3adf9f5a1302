#include "hopcap/rng.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace hopcap {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index) noexcept {
  // FNV-1a over the stream tag, then mixed with the seed and index.
  std::uint64_t tag = 0xcbf29ce484222325ULL;
  for (const char c : stream) {
    tag ^= static_cast<unsigned char>(c);
    tag *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(seed ^ tag) + index);
}

Rng make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index) {
  return Rng(derive_seed(seed, stream, index));
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  // Rejection on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::uint64_t> sample_without_replacement(Rng& rng, std::uint64_t population, std::uint64_t k) {
  if (k > population) throw std::invalid_argument("sample_without_replacement: k exceeds population");
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(k));
  if (k == 0) return out;
  if (population <= 4 * k && population <= (std::uint64_t{1} << 26)) {
    // Dense case: partial Fisher-Yates over the whole range.
    std::vector<std::uint64_t> all(static_cast<std::size_t>(population));
    for (std::uint64_t i = 0; i < population; ++i) all[i] = i;
    for (std::uint64_t i = 0; i < k; ++i) {
      const auto j = i + uniform_below(rng, population - i);
      std::swap(all[i], all[j]);
      out.push_back(all[i]);
    }
    return out;
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(k) * 2);
  while (out.size() < k) {
    const auto x = uniform_below(rng, population);
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

}  // namespace hopcap
