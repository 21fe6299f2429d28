#include "rer/graph.hpp"

#include <cmath>
#include <string>

#include "rer/error.hpp"

namespace rer {

namespace {

Word tail_mask(std::size_t n) noexcept {
    const std::size_t r = n & 63;
    return r == 0 ? ~Word{0} : (Word{1} << r) - 1;
}

// OR the transpose of the strict upper triangle into the lower one.
void symmetrize_from_upper(detail::BitRows& m) {
    const std::size_t n = m.n();
    const std::size_t blocks = m.stride();
    Word buf[64];
    for (std::size_t bi = 0; bi < blocks; ++bi) {
        for (std::size_t bj = bi; bj < blocks; ++bj) {
            for (std::size_t r = 0; r < 64; ++r) {
                const std::size_t i = bi * 64 + r;
                buf[r] = i < n ? m.row(i)[bj] : 0;
            }
            transpose64(buf);
            for (std::size_t r = 0; r < 64; ++r) {
                const std::size_t i = bj * 64 + r;
                if (i < n) m.row(i)[bi] |= buf[r];
            }
        }
    }
}

}  // namespace

// --- NodeSet -----------------------------------------------------------------

NodeSet::NodeSet(std::size_t n, bool full) : n_(n), words_(words_for(n), full ? ~Word{0} : 0) {
    if (full && !words_.empty()) words_.back() &= tail_mask(n);
}

NodeSet NodeSet::from_indices(std::size_t n, std::span<const std::uint32_t> idx) {
    NodeSet s(n);
    for (auto i : idx) {
        if (i >= n) throw ParameterError("node index " + std::to_string(i) + " out of range for n=" + std::to_string(n));
        s.insert(i);
    }
    return s;
}

NodeSet NodeSet::from_mask(std::size_t n, std::uint64_t mask) {
    if (n > 64) throw ParameterError("from_mask requires n <= 64");
    NodeSet s(n);
    if (n > 0) s.words_[0] = mask & tail_mask(n);
    return s;
}

std::size_t NodeSet::size() const noexcept {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

NodeSet NodeSet::complement() const {
    NodeSet r(*this);
    for (Word& w : r.words_) w = ~w;
    if (!r.words_.empty()) r.words_.back() &= tail_mask(n_);
    return r;
}

NodeSet NodeSet::operator&(const NodeSet& o) const {
    if (o.n_ != n_) throw ParameterError("node sets over different universes");
    NodeSet r(*this);
    for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] &= o.words_[w];
    return r;
}

NodeSet NodeSet::operator|(const NodeSet& o) const {
    if (o.n_ != n_) throw ParameterError("node sets over different universes");
    NodeSet r(*this);
    for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] |= o.words_[w];
    return r;
}

bool NodeSet::subset_of(const NodeSet& o) const {
    if (o.n_ != n_) return false;
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w] & ~o.words_[w]) return false;
    return true;
}

std::vector<std::uint32_t> NodeSet::members() const {
    std::vector<std::uint32_t> out;
    out.reserve(size());
    for_each([&](std::uint32_t i) { out.push_back(i); });
    return out;
}

// --- bit rows ----------------------------------------------------------------

std::size_t detail::BitRows::row_popcount(std::size_t i) const noexcept {
    const Word* r = row(i);
    std::size_t c = 0;
    for (std::size_t w = 0; w < stride_; ++w) c += static_cast<std::size_t>(std::popcount(r[w]));
    return c;
}

std::size_t detail::BitRows::row_popcount(std::size_t i, const NodeSet& s) const noexcept {
    const Word* r = row(i);
    const auto sw = s.words();
    std::size_t c = 0;
    for (std::size_t w = 0; w < stride_; ++w) c += static_cast<std::size_t>(std::popcount(r[w] & sw[w]));
    return c;
}

void transpose64(Word x[64]) noexcept {
    // Recursive block swap, LSB = column 0.
    Word m = 0x00000000FFFFFFFFULL;
    for (unsigned j = 32; j != 0; j >>= 1, m ^= m << j) {
        for (unsigned k = 0; k < 64; k = ((k | j) + 1) & ~j) {
            const Word t = ((x[k] >> j) ^ x[k | j]) & m;
            x[k] ^= t << j;
            x[k | j] ^= t;
        }
    }
}

// --- adjacency ---------------------------------------------------------------

AdjacencyMatrix::AdjacencyMatrix(std::size_t n) : m_(n) {}

AdjacencyMatrix AdjacencyMatrix::adopt(detail::BitRows rows) {
    AdjacencyMatrix a;
    a.m_ = std::move(rows);
    return a;
}

AdjacencyMatrix AdjacencyMatrix::complete(std::size_t n) { return complement_graph(AdjacencyMatrix(n)); }

AdjacencyMatrix AdjacencyMatrix::from_edges(std::size_t n,
                                            std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
    AdjacencyMatrix a(n);
    for (auto [i, j] : edges) {
        if (i >= n || j >= n) throw ParameterError("edge endpoint out of range");
        if (i == j) throw ParameterError("self-loop " + std::to_string(i));
        a.set_edge(i, j, true);
    }
    return a;
}

std::size_t AdjacencyMatrix::edge_count() const noexcept {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n(); ++i) c += degree(i);
    return c / 2;
}

std::vector<std::uint32_t> AdjacencyMatrix::degrees() const {
    std::vector<std::uint32_t> d(n());
    for (std::size_t i = 0; i < n(); ++i) d[i] = static_cast<std::uint32_t>(degree(i));
    return d;
}

void DirectedAdjacencyMatrix::clear_row(std::size_t i) noexcept {
    Word* r = m_.row(i);
    for (std::size_t w = 0; w < m_.stride(); ++w) r[w] = 0;
}

std::vector<std::uint32_t> DirectedAdjacencyMatrix::out_degrees() const {
    std::vector<std::uint32_t> d(n());
    for (std::size_t i = 0; i < n(); ++i) d[i] = static_cast<std::uint32_t>(out_degree(i));
    return d;
}

std::size_t DirectedAdjacencyMatrix::edge_count() const noexcept {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n(); ++i) c += out_degree(i);
    return c;
}

void GraphParams::validate() const {
    if (n < 1) throw ParameterError("n must be at least 1");
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0,1], got " + std::to_string(p));
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0,1), got " + std::to_string(gamma));
}

AdjacencyMatrix sample_er(const GraphParams& params, const RandomStream& rng) {
    params.validate();
    const std::size_t n = params.n;
    detail::BitRows m(n);
    const std::size_t stride = m.stride();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        RandomStream r = rng.split(static_cast<std::uint64_t>(i));
        Word* row = m.row(i);
        const std::size_t first = (i + 1) >> 6;
        for (std::size_t w = first; w < stride; ++w) row[w] = r.bernoulli_word(params.p);
        row[first] &= ~Word{0} << ((i + 1) & 63);
        row[stride - 1] &= tail_mask(n);
    }
    symmetrize_from_upper(m);
    return AdjacencyMatrix::adopt(std::move(m));
}

DirectedAdjacencyMatrix sample_directed_er(const GraphParams& params, const RandomStream& rng) {
    params.validate();
    const std::size_t n = params.n;
    DirectedAdjacencyMatrix g(n);
    const std::size_t stride = g.stride();
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream r = rng.split(static_cast<std::uint64_t>(i));
        Word* row = g.mutable_row(i);
        for (std::size_t w = 0; w < stride; ++w) row[w] = r.bernoulli_word(params.p);
        row[i >> 6] &= ~(Word{1} << (i & 63));
        row[stride - 1] &= tail_mask(n);
    }
    return g;
}

AdjacencyMatrix directed_to_undirected(const DirectedAdjacencyMatrix& dg) {
    const std::size_t n = dg.n();
    detail::BitRows m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Word* src = dg.row(i);
        Word* row = m.row(i);
        const std::size_t first = (i + 1) >> 6;
        for (std::size_t w = first; w < m.stride(); ++w) row[w] = src[w];
        if (first < m.stride()) row[first] &= ~Word{0} << ((i + 1) & 63);
    }
    symmetrize_from_upper(m);
    return AdjacencyMatrix::adopt(std::move(m));
}

AdjacencyMatrix complement_graph(const AdjacencyMatrix& a) {
    const std::size_t n = a.n();
    detail::BitRows m(a.rows());
    for (std::size_t i = 0; i < n; ++i) {
        Word* row = m.row(i);
        for (std::size_t w = 0; w < m.stride(); ++w) row[w] = ~row[w];
        row[i >> 6] &= ~(Word{1} << (i & 63));
        row[m.stride() - 1] &= tail_mask(n);
    }
    return AdjacencyMatrix::adopt(std::move(m));
}

std::int64_t ordered_pair_sum(const AdjacencyMatrix& a, const NodeSet& s) {
    std::int64_t total = 0;
    s.for_each([&](std::uint32_t i) { total += static_cast<std::int64_t>(a.rows().row_popcount(i, s)); });
    return total;
}

double empirical_density(const AdjacencyMatrix& a, const NodeSet& s) {
    if (s.universe() != a.n()) throw ParameterError("node set universe does not match graph size");
    const auto k = static_cast<std::int64_t>(s.size());
    if (k == 0) throw DomainError("empirical density of an empty node set");
    return static_cast<double>(ordered_pair_sum(a, s)) / static_cast<double>(k * k);
}

std::size_t degree_in(const AdjacencyMatrix& a, std::size_t i, const NodeSet& s) {
    if (s.universe() != a.n()) throw ParameterError("node set universe does not match graph size");
    if (s.empty()) throw DomainError("degree within an empty node set");
    if (i >= a.n()) throw ParameterError("node index out of range");
    return a.rows().row_popcount(i, s);
}

double normalized_degree(const AdjacencyMatrix& a, std::size_t i, const NodeSet& s) {
    return static_cast<double>(degree_in(a, i, s)) / static_cast<double>(s.size());
}

}  // namespace rer
