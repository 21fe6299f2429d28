#include <doctest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "rer/random.hpp"

using namespace rer;

TEST_CASE("streams are reproducible and split into distinct sequences") {
    RandomStream a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    auto s1 = RandomStream(7).split("gen"), s2 = RandomStream(7).split("adv");
    CHECK(s1.key() != s2.key());
    CHECK(RandomStream(7).split("gen").key() == s1.key());
    CHECK(RandomStream::derive(1, {2, 3}).key() != RandomStream::derive(1, {3, 2}).key());
    CHECK(RandomStream::derive(1, {2, 3}).key() == RandomStream::derive(1, {2, 3}).key());
}

TEST_CASE("double_bits folds signed zero") {
    CHECK(double_bits(0.0) == double_bits(-0.0));
    CHECK(double_bits(0.5) != double_bits(0.25));
}

TEST_CASE("below is uniform over small ranges") {
    RandomStream r(3);
    std::vector<int> hist(7, 0);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) ++hist[r.below(7)];
    double chi = 0;
    for (int h : hist) chi += (h - draws / 7.0) * (h - draws / 7.0) / (draws / 7.0);
    CHECK(chi < 22.46);  // 0.999 quantile, 6 dof
}

TEST_CASE("bernoulli_word matches p bit by bit") {
    RandomStream r(11);
    for (double p : {0.0, 0.1, 0.5, 0.7312, 1.0}) {
        std::uint64_t ones = 0;
        const int words = 4000;
        for (int i = 0; i < words; ++i) ones += static_cast<std::uint64_t>(std::popcount(r.bernoulli_word(p)));
        const double n = 64.0 * words;
        const double sd = std::sqrt(n * p * (1 - p));
        CHECK(std::abs(double(ones) - n * p) <= 5 * sd + 1e-9);
    }
}

TEST_CASE("bernoulli_word lanes are independent") {
    // Pairs of adjacent lanes: both set with probability p^2.
    RandomStream r(5);
    const double p = 0.3;
    std::uint64_t both = 0;
    const int words = 20000;
    for (int i = 0; i < words; ++i) {
        const auto w = r.bernoulli_word(p);
        both += static_cast<std::uint64_t>(std::popcount(w & (w >> 1) & 0x5555555555555555ULL));
    }
    const double n = 32.0 * words;
    CHECK(std::abs(double(both) / n - p * p) < 5 * std::sqrt(p * p * (1 - p * p) / n));
}
