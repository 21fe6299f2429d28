#include "rer/random.hpp"

#include <bit>
#include <cstring>

namespace rer {

std::uint64_t hash_tag(std::string_view tag) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

std::uint64_t double_bits(double x) noexcept {
    if (x == 0.0) x = 0.0;  // fold -0.0 onto +0.0
    return std::bit_cast<std::uint64_t>(x);
}

RandomStream RandomStream::derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t k = mix64(master ^ 0x6a09e667f3bcc909ULL);
    std::uint64_t depth = 0;
    for (std::uint64_t w : path) {
        ++depth;
        k = mix64(k ^ mix64(w + depth * 0x9e3779b97f4a7c15ULL));
    }
    return RandomStream(k);
}

RandomStream RandomStream::split(std::uint64_t tag) const noexcept {
    return RandomStream(mix64(key_ ^ mix64(tag ^ 0xbb67ae8584caa73bULL)));
}

std::uint64_t RandomStream::below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t RandomStream::bernoulli_word(double p) noexcept {
    if (!(p > 0.0)) return 0;
    if (p >= 1.0) return ~std::uint64_t{0};
    std::uint64_t result = 0;
    std::uint64_t undecided = ~std::uint64_t{0};
    double frac = p;
    while (undecided != 0) {
        frac *= 2.0;  // exact: doubles are dyadic
        const bool bit = frac >= 1.0;
        if (bit) frac -= 1.0;
        const std::uint64_t r = next_u64();
        if (bit) {
            result |= undecided & ~r;
            undecided &= r;
        } else {
            undecided &= ~r;
        }
        // Lanes still tied once the expansion of p ends have u >= p.
        if (frac == 0.0) break;
    }
    return result;
}

}  // namespace rer
