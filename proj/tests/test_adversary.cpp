#include <doctest.h>

#include <cmath>

#include "rer/adversary.hpp"
#include "rer/error.hpp"
#include "rer/estimators.hpp"
#include "rer/lowerbound.hpp"
#include "rer/stats.hpp"

using namespace rer;

TEST_CASE("random_subset and random_permutation") {
    RandomStream r(1);
    std::vector<int> hits(10, 0);
    for (int t = 0; t < 20000; ++t) {
        auto s = random_subset(10, 3, r);
        REQUIRE(s.size() == 3);
        for (auto i : s.members()) ++hits[i];
    }
    for (int h : hits) CHECK(std::abs(h - 6000) < 5 * std::sqrt(6000 * 0.7));
    CHECK_THROWS_AS(random_subset(3, 4, r), ParameterError);

    auto perm = random_permutation(50, r);
    std::sort(perm.begin(), perm.end());
    for (std::uint32_t i = 0; i < 50; ++i) CHECK(perm[i] == i);
}

TEST_CASE("fill, empty and coin") {
    auto g = sample_er({10, 0.5, 0.0, 0}, RandomStream(3));
    auto same = fill_or_empty_adversary(g, 0.0, FillMode::coin, RandomStream(1));
    CHECK(same.graph == g);
    CHECK(same.record.corrupted.empty());

    auto f = fill_or_empty_adversary(g, 0.2, FillMode::fill, RandomStream(5));
    CHECK(f.record.corrupted.size() == 2);
    for (auto u : f.record.corrupted.members()) CHECK(f.graph.degree(u) == 9);
    CHECK(preserves_uncorrupted(g, f.graph, f.record.corrupted));

    auto e = fill_or_empty_adversary(g, 0.2, FillMode::empty, RandomStream(5));
    for (auto u : e.record.corrupted.members()) CHECK(e.graph.degree(u) == 0);
    CHECK(preserves_uncorrupted(g, e.graph, e.record.corrupted));
    CHECK_THROWS_AS(fill_or_empty_adversary(g, 1.0, FillMode::fill, RandomStream(5)), ParameterError);
}

TEST_CASE("coin adversary moves the mean by gamma/2 at least half the time") {
    const double gamma = 0.1;
    int far = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        RandomStream r = RandomStream::derive(9, {std::uint64_t(t)});
        auto g = sample_er({200, 0.5, 0.0, 0}, r.split("gen"));
        auto out = fill_or_empty_adversary(g, gamma, FillMode::coin, r.split("adv"));
        if (std::abs(mean_estimator(out.graph).estimate - 0.5) >= gamma / 2) ++far;
    }
    CHECK(far >= 0.45 * trials);
}

TEST_CASE("five-set partition sizes") {
    RandomStream r(4);
    auto p = five_set_partition(1000, 0.05, 2.0, r);
    CHECK(p.b.size() == 50);
    CHECK(p.s0.size() == 100);
    CHECK(p.s1.size() == 100);
    CHECK(p.s2.size() == (2 * 750) / 3);
    CHECK(p.s3.size() == 750 - (2 * 750) / 3);
    CHECK((p.b | p.s0 | p.s1 | p.s2 | p.s3) == NodeSet::all(1000));
    CHECK(p.b.size() + p.s0.size() + p.s1.size() + p.s2.size() + p.s3.size() == 1000);
    CHECK_THROWS_AS(five_set_partition(100, 0.25, 1.0, r), ParameterError);
}

TEST_CASE("five-set adversary forced structure") {
    auto g = sample_er({300, 0.5, 0.0, 0}, RandomStream(12));
    auto id = five_set_adversary(g, 0.0, 1.0, RandomStream(2));
    CHECK(id.graph == g);

    FiveSetPartition p;
    auto out = five_set_adversary(g, 0.1, 1.0, RandomStream(2), &p);
    CHECK(out.record.corrupted == p.b);
    CHECK(preserves_uncorrupted(g, out.graph, p.b));
    const auto f = p.b.complement();
    for (auto u : p.s1.members()) CHECK(out.graph.degree(u) == p.b.size() + degree_in(g, u, f));
    for (auto u : p.s0.members()) CHECK(out.graph.degree(u) == degree_in(g, u, f));
    for (auto u : p.b.members()) CHECK(degree_in(out.graph, u, p.s0) == 0);
}

TEST_CASE("five-set degree profile stays in its class bands") {
    const std::size_t n = 4000;
    const double gamma = 0.05, c = 1.0;
    const double slack = 4 * std::sqrt(n * std::log(double(n)));
    const double nd = double(n);
    int good = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        RandomStream r = RandomStream::derive(31, {std::uint64_t(t)});
        auto g = sample_er({n, 0.5, 0.0, 0}, r.split("gen"));
        FiveSetPartition p;
        auto out = five_set_adversary(g, gamma, c, r.split("adv"), &p);
        bool ok = true;
        auto band = [&](const NodeSet& s, double centre) {
            s.for_each([&](std::uint32_t u) {
                if (std::abs(double(out.graph.degree(u)) - centre) > slack) ok = false;
            });
        };
        band(p.b, nd * (0.5 + gamma / 10));
        band(p.s0, nd * (0.5 - gamma / 2));
        band(p.s1, nd * (0.5 + gamma / 2));
        band(p.s2, nd * (0.5 + gamma / 10));
        band(p.s3, nd * (0.5 - gamma / 5));
        good += ok;
    }
    CHECK(good >= 99);
}

TEST_CASE("degree rewiring: point mass and budget") {
    const std::size_t n = 60;
    auto dg = sample_directed_er({n, 0.3, 0.0, 0}, RandomStream(1));
    std::vector<double> zero(n, 0.0);
    zero[0] = 1.0;
    auto out = degree_rewiring_adversary(dg, 0.5, zero, RandomStream(2));
    for (auto u : out.record.corrupted.members()) CHECK(out.graph.out_degree(u) == 0);
    for (std::size_t i = 0; i < n; ++i)
        if (!out.record.corrupted.contains(i))
            for (std::size_t j = 0; j < n; ++j) REQUIRE(out.graph.has_edge(i, j) == dg.has_edge(i, j));

    std::vector<double> bad(n, 0.0);
    CHECK_THROWS_AS(degree_rewiring_adversary(dg, 0.5, bad, RandomStream(2)), ParameterError);
    CHECK_THROWS_AS(degree_rewiring_adversary(dg, 0.5, std::vector<double>(n - 1, 1.0 / (n - 1)), RandomStream(2)),
                    ParameterError);

    // Markov: Pr[|B| > gamma n] <= 0.15.
    int over = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        auto o = degree_rewiring_adversary(dg, 0.1, zero, RandomStream::derive(5, {std::uint64_t(t)}));
        over += o.record.over_budget;
        CHECK(o.record.over_budget == (double(o.record.corrupted.size()) > 0.1 * n));
    }
    CHECK(over <= 0.15 * trials);
}

TEST_CASE("degree rewiring with the true degree law is invisible") {
    const std::size_t n = 100;
    const double p = 0.3;
    const auto pmf = binomial_pmf(n - 1, p);
    std::vector<std::uint64_t> fresh(n, 0), rewired(n, 0);
    std::size_t samples = 0;
    for (std::uint64_t t = 0; samples < 10000; ++t) {
        auto r = RandomStream::derive(17, {t});
        auto dg = sample_directed_er({n, p, 0.0, 0}, r.split("gen"));
        auto out = degree_rewiring_adversary(dg, 0.9, pmf.mass, r.split("adv"));
        out.record.corrupted.for_each([&](std::uint32_t u) {
            if (samples < 10000) ++rewired[out.graph.out_degree(u)], ++samples;
        });
    }
    for (std::uint64_t t = 0, k = 0; k < 10000; ++t) {
        auto dg = sample_directed_er({n, p, 0.0, 0}, RandomStream::derive(18, {t}));
        for (std::size_t i = 0; i < n && k < 10000; ++i, ++k) ++fresh[dg.out_degree(i)];
    }
    CHECK(chi_square_two_sample(fresh, rewired).p_value > 0.01);
}

TEST_CASE("custom adversary contract") {
    auto g = sample_er({40, 0.5, 0.0, 0}, RandomStream(6));
    auto id = custom_adversary(g, 0.1, [](AdjacencyMatrix& a, RandomStream&) { return NodeSet::none(a.n()); },
                               RandomStream(1));
    CHECK(id.graph == g);

    auto flip = [](AdjacencyMatrix& a, RandomStream&) {
        a.set_edge(0, 1, !a.has_edge(0, 1));
        return NodeSet::none(a.n());
    };
    CHECK_THROWS_AS(custom_adversary(g, 0.1, flip, RandomStream(1)), ContractViolation);

    auto greedy = [](AdjacencyMatrix& a, RandomStream&) { return NodeSet::all(a.n()); };
    CHECK_THROWS_AS(custom_adversary(g, 0.1, greedy, RandomStream(1)), BudgetError);

    auto fill = [](AdjacencyMatrix& a, RandomStream& r) {
        auto b = random_subset(a.n(), floor_count(0.1 * double(a.n())), r);
        b.for_each([&](std::uint32_t u) {
            for (std::size_t v = 0; v < a.n(); ++v) a.set_edge(u, v, true);
        });
        return b;
    };
    auto mine = custom_adversary(g, 0.1, fill, RandomStream(8));
    auto ref = fill_or_empty_adversary(g, 0.1, FillMode::fill, RandomStream(8));
    CHECK(mine.graph == ref.graph);
    CHECK(mine.record.corrupted == ref.record.corrupted);
}
