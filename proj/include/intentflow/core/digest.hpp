#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace intentflow {

std::string sha256_hex(std::string_view data);
std::string base64_encode(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Stable across platforms and runs, unlike std::hash.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Seed for a per-item random stream derived from the global run seed.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view item_id,
                          std::int64_t sub_index = 0);

/// Portable seeded generator. std::mt19937_64 output is fully specified by
/// the standard; the std distributions are not, so bounded draws are done
/// here by rejection sampling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    // Uniform integer in [lo, hi] inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi);

private:
    std::mt19937_64 engine_;
};

}  // namespace intentflow
