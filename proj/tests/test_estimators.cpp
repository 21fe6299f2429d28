#include <doctest.h>

#include <Eigen/Dense>
#include <bit>
#include <cmath>

#include "rer/adversary.hpp"
#include "rer/error.hpp"
#include "rer/estimators.hpp"
#include "rer/regularity.hpp"
#include "rer/spectral.hpp"

using namespace rer;

namespace {

AdjacencyMatrix from_edges(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> e) {
    return AdjacencyMatrix::from_edges(n, e);
}

AdjacencyMatrix star(std::size_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (std::uint32_t i = 1; i < n; ++i) e.emplace_back(0, i);
    return from_edges(n, e);
}

// Second brute force: norms from SVD of matrices built entry by entry.
struct Brute {
    std::uint64_t mask = 0;
    double estimate = 0.0;
};

Brute brute_force(const AdjacencyMatrix& a) {
    const std::size_t n = a.n();
    std::vector<std::pair<std::uint64_t, double>> all;
    double best = INFINITY;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        const int k = std::popcount(mask);
        if (2 * k < int(n)) continue;
        std::vector<int> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) idx.push_back(int(i));
        double sum = 0;
        for (int i : idx)
            for (int j : idx) sum += a.has_edge(i, j);
        const double ps = sum / double(k * k);
        Eigen::MatrixXd m(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m(i, j) = a.has_edge(idx[i], idx[j]) - ps;
        const double v = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
        all.emplace_back(mask, v);
        best = std::min(best, v);
    }
    Brute out;
    int size = -1;
    for (auto [mask, v] : all) {
        if (v > best + 1e-9 * std::max(1.0, best)) continue;
        const int k = std::popcount(mask);
        if (k > size || (k == size && mask < out.mask)) out.mask = mask, size = k;
    }
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sum += (out.mask >> i & 1) && (out.mask >> j & 1) && a.has_edge(i, j);
    out.estimate = sum / double(size * size);
    return out;
}

double lgamma_binom_tail(std::size_t t, double p, std::size_t k) {
    double s = 0;
    for (std::size_t j = k; j <= t; ++j)
        s += std::exp(std::lgamma(t + 1.0) - std::lgamma(j + 1.0) - std::lgamma(t - j + 1.0) + j * std::log(p) +
                      (t - j) * std::log1p(-p));
    return s;
}

}  // namespace

TEST_CASE("mean and median examples") {
    auto k4 = AdjacencyMatrix::complete(4);
    CHECK(mean_estimator(k4).estimate == 1.0);
    CHECK(median_estimator(k4).estimate == 1.0);
    auto one = from_edges(3, {{0, 1}});
    CHECK(mean_estimator(one).estimate == doctest::Approx(1.0 / 3));
    CHECK(median_estimator(one).estimate == 0.5);  // degrees 1,1,0
    CHECK_THROWS_AS(mean_estimator(AdjacencyMatrix(1)), DomainError);
    CHECK_THROWS_AS(median_estimator(AdjacencyMatrix(1)), DomainError);
}

TEST_CASE("prune-then") {
    auto g = sample_er({100, 0.4, 0.0, 0}, RandomStream(2));
    CHECK(prune_then(g, 0.0, 1.0, InnerEstimator::mean).estimate == mean_estimator(g).estimate);
    CHECK(prune_then(g, 0.0, 1.0, InnerEstimator::median).estimate == median_estimator(g).estimate);

    auto fill = fill_or_empty_adversary(g, 0.05, FillMode::fill, RandomStream(3));
    auto r = prune_then(fill.graph, 0.05, 1.0, InnerEstimator::mean);
    REQUIRE(r.pruned.size() == 10);
    for (auto u : fill.record.corrupted.members())
        CHECK(std::find(r.pruned.begin(), r.pruned.begin() + 5, u) != r.pruned.begin() + 5);
    auto keep = NodeSet::all(100);
    for (auto u : r.pruned) keep.erase(u);
    CHECK(keep.subset_of(fill.record.corrupted.complement()));
    CHECK(r.estimate == doctest::Approx(double(ordered_pair_sum(g, keep)) / (90.0 * 89.0)).epsilon(1e-15));

    CHECK_THROWS_AS(prune_then(AdjacencyMatrix::complete(4), 0.5, 1.0, InnerEstimator::mean), DomainError);
}

TEST_CASE("default repeats against a direct tail sum") {
    for (std::size_t n : {60, 100, 400, 2000}) {
        for (double a1 : {1.0 / n, 0.005, 1.0 / 60}) {
            const std::size_t t = floor_count(9 * a1 * n), need = floor_count(a1 * n);
            const double q = lgamma_binom_tail(t, 0.15, need);
            const int cap = int(std::ceil(2 * std::log2(double(n))));
            int r = 1;
            while (r < cap && std::pow(1 - q, r) > 1.0 / (double(n) * n)) ++r;
            CHECK(default_repeats(n, a1) == r);
        }
    }
}

TEST_CASE("trim: star example and tie rule") {
    auto s = star(10);
    auto r = trim(s, 0.05, NodeSet::all(10));
    REQUIRE(r.trim);
    CHECK(r.trim->p_s_star == doctest::Approx(0.18));
    CHECK(r.trim->removed == std::vector<std::uint32_t>{0});
    CHECK(r.trim->removed_scores[0] == doctest::Approx(0.72));
    CHECK(r.estimate == 0.0);

    auto k = AdjacencyMatrix::complete(12);
    auto t = trim(k, 0.1, NodeSet::all(12));  // drops 3
    CHECK(t.trim->removed == std::vector<std::uint32_t>{0, 1, 2});
    CHECK(t.estimate == doctest::Approx(8.0 / 9.0));
    CHECK_THROWS_AS(trim(k, 0.5, NodeSet::from_mask(12, 0b11)), DomainError);
}

TEST_CASE("spectral candidates on trivial graphs") {
    SpectralConfig cfg;
    AdjacencyMatrix empty(60);
    auto tr = spectral_candidates(empty, cfg, RandomStream(1));
    CHECK(tr.s_star == NodeSet::all(60));
    CHECK(robust_estimate(empty, cfg, RandomStream(1)).estimate == 0.0);
    CHECK(robust_estimate_symmetric(empty, cfg, RandomStream(1)).estimate == 0.0);

    auto k = AdjacencyMatrix::complete(60);
    auto rk = robust_estimate(k, cfg, RandomStream(1));
    const double sf = double(rk.trim->s_f.size());
    CHECK(rk.estimate == doctest::Approx((sf - 1) / sf));
    auto sym = robust_estimate_symmetric(k, cfg, RandomStream(1));
    REQUIRE(sym.q_star);
    CHECK(*sym.q_star == 0.0);
    CHECK(sym.estimate == 1.0);

    cfg.alpha1 = 0.5;
    CHECK_THROWS_AS(spectral_candidates(empty, cfg, RandomStream(1)), ParameterError);
}

TEST_CASE("spectral filtering removes a single filled node") {
    AdjacencyMatrix empty(60);
    auto bad = fill_or_empty_adversary(empty, 1.0 / 60, FillMode::fill, RandomStream(4));
    const auto b = bad.record.corrupted.members().at(0);
    SpectralConfig cfg;
    bool found = false;
    for (std::uint64_t seed = 0; seed < 20 && !found; ++seed) {
        auto tr = spectral_candidates(bad.graph, cfg, RandomStream(seed));
        if (tr.s_star.contains(b)) continue;
        found = true;
        CHECK(empirical_density(bad.graph, tr.s_star) == 0.0);
        CHECK(robust_estimate(bad.graph, cfg, RandomStream(seed)).estimate == 0.0);
    }
    CHECK(found);
}

TEST_CASE("spectral structure and determinism") {
    SpectralConfig cfg;
    cfg.alpha1 = 0.01;
    for (int t = 0; t < 5; ++t) {
        auto g = sample_er({200, 0.3, 0.0, 0}, RandomStream::derive(1, {std::uint64_t(t)}));
        auto out = five_set_adversary(g, 0.05, 1.0, RandomStream(t));
        auto r1 = robust_estimate(out.graph, cfg, RandomStream(99));
        auto r2 = robust_estimate(out.graph, cfg, RandomStream(99));
        CHECK(r1.estimate == r2.estimate);
        CHECK(r1.spectral->s_star == r2.spectral->s_star);
        CHECK(r1.spectral->best_norm == r2.spectral->best_norm);

        const auto& st = *r1.spectral;
        CHECK(st.s_star.size() >= 200 - floor_count(9 * cfg.alpha1 * 200));
        CHECK(r1.trim->s_f.subset_of(st.s_star));
        CHECK(st.s_star.size() - r1.trim->s_f.size() == floor_count(3 * cfg.alpha1 * 200));
        for (const auto& run : st.runs)
            for (const auto& c : run) CHECK(st.best_norm <= c.norm);
        CHECK(r1.estimate >= 0.0);
        CHECK(r1.estimate <= 1.0);
    }
}

TEST_CASE("spectral candidates never beat the exhaustive minimum") {
    SpectralConfig cfg;
    cfg.enforce_range = false;
    cfg.alpha1 = 1.0 / 18;  // 6 deletions on 12 nodes keeps |S| >= n/2
    cfg.repeats = 12;
    for (int t = 0; t < 20; ++t) {
        auto g = sample_er({12, 0.5, 0.0, 0}, RandomStream::derive(6, {std::uint64_t(t)}));
        auto ex = exhaustive_estimate(g);
        auto tr = spectral_candidates(g, cfg, RandomStream(t));
        const double exact = spectral_norm_exact(CenteredOperator::with_density(g, tr.s_star).dense());
        CHECK(exact >= *ex.best_norm - 1e-12);
        CHECK(tr.best_norm >= 0.99 * *ex.best_norm - 1e-12);
    }
}

TEST_CASE("exhaustive estimator") {
    AdjacencyMatrix empty(6);
    auto e = exhaustive_estimate(empty);
    CHECK(*e.best_mask == 0b111111);
    CHECK(e.estimate == 0.0);

    auto k6 = AdjacencyMatrix::complete(6);
    auto bk = brute_force(k6);
    auto ek = exhaustive_estimate(k6);
    CHECK(*ek.best_mask == bk.mask);
    CHECK(ek.estimate == bk.estimate);
    const double sz = std::popcount(bk.mask);
    CHECK(ek.estimate == doctest::Approx((sz - 1) / sz));

    auto one = from_edges(4, {{1, 2}});
    CHECK(*exhaustive_estimate(one).best_mask == brute_force(one).mask);
    CHECK(exhaustive_estimate(one).estimate == brute_force(one).estimate);

    for (int t = 0; t < 20; ++t) {
        auto g = sample_er({9, 0.4, 0.0, 0}, RandomStream::derive(3, {std::uint64_t(t)}));
        auto b = brute_force(g);
        auto x = exhaustive_estimate(g);
        REQUIRE(*x.best_mask == b.mask);
        REQUIRE(x.estimate == b.estimate);
    }
    CHECK_THROWS_AS(exhaustive_estimate(AdjacencyMatrix(17)), DomainError);
}

TEST_CASE("trim stays in the clean-graph band") {
    // S* = [n] on an uncorrupted graph; band alpha1 eta + kappa(13 alpha1) with unit c2, c3.
    const RateConstants k;
    const std::size_t n = 600;
    const double a1 = 1.0 / 60;
    int inside = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const double p = t % 2 ? 0.3 : 0.05;
        auto g = sample_er({n, p, 0.0, 0}, RandomStream::derive(12, {std::uint64_t(t)}));
        auto r = trim(g, a1, NodeSet::all(n));
        inside += std::abs(r.estimate - p) <= a1 * eta(p, n, k) + kappa(13 * a1, p, n, k);
    }
    CHECK(inside >= 0.95 * trials);
}
