#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace rer {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a over the bytes of a tag, then mixed.
std::uint64_t hash_tag(std::string_view tag) noexcept;

/// Bit pattern of a double, so grid coordinates can enter seed derivation exactly.
std::uint64_t double_bits(double x) noexcept;

/// Counter-based random stream.
///
/// Draw i of a stream is mix64(key + (i+1) * golden), so a stream is fully
/// determined by its 64-bit key. Child streams are derived by hashing a tag into
/// the key; two streams derived from the same (key, tag path) produce identical
/// draws no matter which thread uses them or in what order siblings are used.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t key = 0) noexcept : key_(key) {}

    /// Stream keyed by (master seed, path...) through repeated mixing.
    static RandomStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

    RandomStream split(std::uint64_t tag) const noexcept;
    RandomStream split(std::string_view tag) const noexcept { return split(hash_tag(tag)); }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t draws() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;

    bool bernoulli(double p) noexcept { return p >= 1.0 || (p > 0.0 && uniform() < p); }

    /// 64 independent Bernoulli(p) bits, exact for any double p.
    ///
    /// Each lane compares a lazily generated uniform with the binary expansion of
    /// p; all 64 lanes are resolved in parallel, so the expected cost is about
    /// log2(64) + 2 draws per word instead of 64.
    std::uint64_t bernoulli_word(double p) noexcept;

    // UniformRandomBitGenerator interface.
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return next_u64(); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace rer
