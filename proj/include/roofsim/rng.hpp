#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace roofsim {

/// Identifies one random stream: a master seed plus a label such as
/// "policy:POL-000042" or "tree:7".
///
/// The substream seed is `mix64(master_seed ^ mix64(fnv1a64(stream_label)))`,
/// where `mix64` is the SplitMix64 finalizer. That 64-bit value seeds a
/// xoshiro256** state through four SplitMix64 steps. Streams are derived, never
/// advanced globally, so any number of them can be consumed concurrently.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::string stream_label;
};

/// Algorithm identifier recorded in dataset manifests. Bump when the
/// derivation or the generator changes.
inline constexpr std::string_view kPrngId = "xoshiro256starstar+splitmix64-fnv1a/v1";

constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_substream_seed(std::uint64_t master_seed, std::string_view label) noexcept {
    return mix64(master_seed ^ mix64(fnv1a64(label)));
}

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept;
    explicit Rng(const SeedSpec& spec) noexcept : Rng(derive_substream_seed(spec.master_seed, spec.stream_label)) {}
    Rng(std::uint64_t master_seed, std::string_view label) noexcept
        : Rng(derive_substream_seed(master_seed, label)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() noexcept { return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52; }

    /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace roofsim
