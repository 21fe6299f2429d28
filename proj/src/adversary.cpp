#include "rer/adversary.hpp"

#include <cmath>
#include <numeric>

#include "rer/error.hpp"

namespace rer {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0,1)");
}

void set_all_incident(AdjacencyMatrix& g, const NodeSet& b, bool present) {
    b.for_each([&](std::uint32_t u) {
        for (std::size_t v = 0; v < g.n(); ++v) g.set_edge(u, v, present);
    });
}

}  // namespace

NodeSet random_subset(std::size_t n, std::size_t k, RandomStream& rng) {
    if (k > n) throw ParameterError("subset larger than the ground set");
    // Floyd's algorithm: k draws, exactly uniform.
    NodeSet s(n);
    for (std::size_t j = n - k; j < n; ++j) {
        const auto t = static_cast<std::size_t>(rng.below(j + 1));
        if (s.contains(t)) s.insert(j);
        else s.insert(t);
    }
    return s;
}

std::vector<std::uint32_t> random_permutation(std::size_t n, RandomStream& rng) {
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    return perm;
}

bool preserves_uncorrupted(const AdjacencyMatrix& before, const AdjacencyMatrix& after, const NodeSet& b) {
    if (before.n() != after.n()) return false;
    const NodeSet f = b.complement();
    const auto fw = f.words();
    bool ok = true;
    f.for_each([&](std::uint32_t i) {
        const Word* x = before.row(i);
        const Word* y = after.row(i);
        for (std::size_t w = 0; w < before.stride(); ++w)
            if ((x[w] ^ y[w]) & fw[w]) ok = false;
    });
    return ok;
}

UndirectedOutcome fill_or_empty_adversary(const AdjacencyMatrix& g, double gamma, FillMode mode, RandomStream rng) {
    check_gamma(gamma);
    const std::uint64_t seed = rng.key();
    NodeSet b = random_subset(g.n(), floor_count(gamma * double(g.n())), rng);
    bool fill = mode == FillMode::fill;
    if (mode == FillMode::coin) fill = rng.bernoulli(0.5);
    AdjacencyMatrix out = g;
    set_all_incident(out, b, fill);
    const char* name = mode == FillMode::fill ? "fill" : mode == FillMode::empty ? "empty" : "coin";
    return {std::move(out), CorruptionRecord{std::move(b), name, gamma, seed, false}};
}

FiveSetPartition five_set_partition(std::size_t n, double gamma, double c, RandomStream& rng) {
    check_gamma(gamma);
    if (!(c >= 0.0)) throw ParameterError("c must be nonnegative");
    if (c * gamma >= 0.25) throw ParameterError("five-set adversary requires c*gamma < 0.25");
    const std::size_t nb = floor_count(gamma * double(n));
    const std::size_t ns = floor_count(c * gamma * double(n));
    if (nb + 2 * ns > n) throw ParameterError("five-set sizes exceed n");
    const std::size_t rest = n - nb - 2 * ns;
    const std::size_t n2 = (2 * rest) / 3;

    const auto perm = random_permutation(n, rng);
    FiveSetPartition p{NodeSet(n), NodeSet(n), NodeSet(n), NodeSet(n), NodeSet(n)};
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint32_t v = perm[k];
        if (k < nb) p.b.insert(v);
        else if (k < nb + ns) p.s0.insert(v);
        else if (k < nb + 2 * ns) p.s1.insert(v);
        else if (k < nb + 2 * ns + n2) p.s2.insert(v);
        else p.s3.insert(v);
    }
    return p;
}

UndirectedOutcome five_set_adversary(const AdjacencyMatrix& g, double gamma, double c, RandomStream rng,
                                     FiveSetPartition* parts) {
    const std::uint64_t seed = rng.key();
    FiveSetPartition p = five_set_partition(g.n(), gamma, c, rng);
    AdjacencyMatrix out = g;
    set_all_incident(out, p.b, false);  // steps 1 and 2
    const auto bm = p.b.members();
    for (std::uint32_t u : bm) {
        p.s1.for_each([&](std::uint32_t v) { out.set_edge(u, v, true); });
        p.s2.for_each([&](std::uint32_t v) { out.set_edge(u, v, rng.bernoulli(0.6)); });
        p.s3.for_each([&](std::uint32_t v) { out.set_edge(u, v, rng.bernoulli(0.3)); });
    }
    for (std::size_t x = 0; x < bm.size(); ++x)
        for (std::size_t y = x + 1; y < bm.size(); ++y) out.set_edge(bm[x], bm[y], rng.bernoulli(0.6));
    CorruptionRecord rec{p.b, "five-set", gamma, seed, false};
    if (parts) *parts = std::move(p);
    return {std::move(out), std::move(rec)};
}

DirectedOutcome degree_rewiring_adversary(const DirectedAdjacencyMatrix& dg, double gamma,
                                          std::span<const double> degree_pmf, RandomStream rng) {
    check_gamma(gamma);
    const std::size_t n = dg.n();
    if (degree_pmf.size() != n) throw ParameterError("degree pmf must have support {0..n-1}");
    double total = 0.0;
    for (double m : degree_pmf) {
        if (!(m >= 0.0)) throw ParameterError("degree pmf has a negative or NaN entry");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ParameterError("degree pmf does not sum to 1");

    const std::uint64_t seed = rng.key();
    const double q = 0.15 * gamma;
    NodeSet b(n);
    for (std::size_t i = 0; i < n; ++i)
        if (rng.bernoulli(q)) b.insert(i);

    DirectedAdjacencyMatrix out = dg;
    std::vector<std::uint32_t> others(n > 0 ? n - 1 : 0);
    b.for_each([&](std::uint32_t i) {
        // Inverse-CDF degree draw.
        const double u = rng.uniform() * total;
        std::size_t d = 0;
        double acc = degree_pmf[0];
        while (acc <= u && d + 1 < n) acc += degree_pmf[++d];
        while (degree_pmf[d] == 0.0 && d > 0) --d;  // rounding landed past the support

        // Partial Fisher-Yates over [n] \ {i}.
        for (std::size_t k = 0, v = 0; v < n; ++v)
            if (v != i) others[k++] = static_cast<std::uint32_t>(v);
        out.clear_row(i);
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t j = k + static_cast<std::size_t>(rng.below(others.size() - k));
            std::swap(others[k], others[j]);
            out.set_edge(i, others[k], true);
        }
    });
    const bool over = double(b.size()) > gamma * double(n);
    return {std::move(out), CorruptionRecord{std::move(b), "degree-rewire", gamma, seed, over}};
}

UndirectedOutcome custom_adversary(const AdjacencyMatrix& g, double gamma, const RewireCallback& rewire,
                                   RandomStream rng, std::string name) {
    check_gamma(gamma);
    const std::uint64_t seed = rng.key();
    AdjacencyMatrix out = g;
    NodeSet b = rewire(out, rng);
    if (b.universe() != g.n()) throw ContractViolation("callback returned a node set over the wrong universe");
    const std::size_t budget = floor_count(gamma * double(g.n()));
    if (b.size() > budget)
        throw BudgetError("callback corrupted " + std::to_string(b.size()) + " nodes; budget is " +
                          std::to_string(budget));
    if (out.n() != g.n() || !preserves_uncorrupted(g, out, b))
        throw ContractViolation("callback changed an edge between two uncorrupted nodes");
    return {std::move(out), CorruptionRecord{std::move(b), std::move(name), gamma, seed, false}};
}

}  // namespace rer
