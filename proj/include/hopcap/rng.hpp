#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace hopcap {

// Counter-based seeding: every independent stream of randomness is derived
// from (seed, stream tag, index) so results do not depend on call order.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                                        std::uint64_t index = 0) noexcept;

using Rng = std::mt19937_64;

[[nodiscard]] Rng make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

// Uniform integer in [0, bound). Portable across standard libraries, unlike
// std::uniform_int_distribution. bound must be > 0.
[[nodiscard]] std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

// Uniform double in [0, 1) with 53 random bits.
[[nodiscard]] double uniform_unit(Rng& rng);

// k distinct values from [0, population) in uniformly random order.
[[nodiscard]] std::vector<std::uint64_t> sample_without_replacement(Rng& rng, std::uint64_t population,
                                                                    std::uint64_t k);

template <typename T>
void shuffle(Rng& rng, std::vector<T>& items) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace hopcap
