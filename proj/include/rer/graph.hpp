#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rer/random.hpp"

namespace rer {

using Word = std::uint64_t;

inline constexpr std::size_t words_for(std::size_t bits) noexcept { return (bits + 63) / 64; }

/// floor(x) for nonnegative counts such as gamma*n, with a 1e-9 allowance so
/// products like 0.12 * 2000 = 239.99999999999997 land on 240.
inline std::size_t floor_count(double x) noexcept {
    if (!(x > 0.0)) return 0;
    return static_cast<std::size_t>(x + 1e-9);
}

/// Subset of [n] stored as a bitmask.
class NodeSet {
public:
    NodeSet() = default;
    explicit NodeSet(std::size_t n, bool full = false);

    static NodeSet all(std::size_t n) { return NodeSet(n, true); }
    static NodeSet none(std::size_t n) { return NodeSet(n, false); }
    static NodeSet from_indices(std::size_t n, std::span<const std::uint32_t> idx);
    /// Low bits of mask select members; n <= 64.
    static NodeSet from_mask(std::size_t n, std::uint64_t mask);

    std::size_t universe() const noexcept { return n_; }
    std::size_t size() const noexcept;
    bool empty() const noexcept { return size() == 0; }

    bool contains(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void insert(std::size_t i) noexcept { words_[i >> 6] |= Word{1} << (i & 63); }
    void erase(std::size_t i) noexcept { words_[i >> 6] &= ~(Word{1} << (i & 63)); }

    NodeSet complement() const;
    NodeSet operator&(const NodeSet& o) const;
    NodeSet operator|(const NodeSet& o) const;
    bool subset_of(const NodeSet& o) const;

    /// Members in ascending order.
    std::vector<std::uint32_t> members() const;

    std::span<const Word> words() const noexcept { return words_; }
    bool operator==(const NodeSet&) const = default;

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word x = words_[w];
            while (x) {
                f(static_cast<std::uint32_t>((w << 6) + std::countr_zero(x)));
                x &= x - 1;
            }
        }
    }

private:
    std::size_t n_ = 0;
    std::vector<Word> words_;
};

namespace detail {
/// Square bit matrix with rows padded to whole words.
class BitRows {
public:
    BitRows() = default;
    explicit BitRows(std::size_t n) : n_(n), stride_(words_for(n)), bits_(n * stride_, 0) {}

    std::size_t n() const noexcept { return n_; }
    std::size_t stride() const noexcept { return stride_; }
    const Word* row(std::size_t i) const noexcept { return bits_.data() + i * stride_; }
    Word* row(std::size_t i) noexcept { return bits_.data() + i * stride_; }

    bool get(std::size_t i, std::size_t j) const noexcept { return (row(i)[j >> 6] >> (j & 63)) & 1u; }
    void put(std::size_t i, std::size_t j, bool v) noexcept {
        Word& w = row(i)[j >> 6];
        const Word m = Word{1} << (j & 63);
        w = v ? (w | m) : (w & ~m);
    }
    std::size_t row_popcount(std::size_t i) const noexcept;
    std::size_t row_popcount(std::size_t i, const NodeSet& s) const noexcept;

    bool operator==(const BitRows&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t stride_ = 0;
    std::vector<Word> bits_;
};
}  // namespace detail

/// Symmetric 0/1 matrix with zero diagonal.
///
/// Stored as a full bitset (both triangles) so a row's neighbourhood is one
/// contiguous word run; degree and within-set counts are popcounts.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(std::size_t n);

    static AdjacencyMatrix complete(std::size_t n);
    static AdjacencyMatrix from_edges(std::size_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

    std::size_t n() const noexcept { return m_.n(); }
    bool has_edge(std::size_t i, std::size_t j) const noexcept { return m_.get(i, j); }
    /// Sets or clears {i,j}; self-pairs are ignored so the diagonal stays zero.
    void set_edge(std::size_t i, std::size_t j, bool present) noexcept {
        if (i == j) return;
        m_.put(i, j, present);
        m_.put(j, i, present);
    }

    std::size_t degree(std::size_t i) const noexcept { return m_.row_popcount(i); }
    std::size_t edge_count() const noexcept;
    std::vector<std::uint32_t> degrees() const;

    const Word* row(std::size_t i) const noexcept { return m_.row(i); }
    std::size_t stride() const noexcept { return m_.stride(); }

    bool operator==(const AdjacencyMatrix&) const = default;

    /// Wraps rows that are already symmetric with a zero diagonal (unchecked).
    static AdjacencyMatrix adopt(detail::BitRows rows);
    const detail::BitRows& rows() const noexcept { return m_; }

private:
    detail::BitRows m_;
};

/// Directed 0/1 matrix with zero diagonal; row i holds the out-neighbours of i.
class DirectedAdjacencyMatrix {
public:
    DirectedAdjacencyMatrix() = default;
    explicit DirectedAdjacencyMatrix(std::size_t n) : m_(n) {}

    std::size_t n() const noexcept { return m_.n(); }
    bool has_edge(std::size_t i, std::size_t j) const noexcept { return m_.get(i, j); }
    void set_edge(std::size_t i, std::size_t j, bool present) noexcept {
        if (i != j) m_.put(i, j, present);
    }
    void clear_row(std::size_t i) noexcept;

    std::size_t out_degree(std::size_t i) const noexcept { return m_.row_popcount(i); }
    std::vector<std::uint32_t> out_degrees() const;
    std::size_t edge_count() const noexcept;

    const Word* row(std::size_t i) const noexcept { return m_.row(i); }
    Word* mutable_row(std::size_t i) noexcept { return m_.row(i); }
    std::size_t stride() const noexcept { return m_.stride(); }
    const detail::BitRows& rows() const noexcept { return m_; }

    bool operator==(const DirectedAdjacencyMatrix&) const = default;

private:
    detail::BitRows m_;
};

struct GraphParams {
    std::size_t n = 0;
    double p = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;

    /// Throws ParameterError when n < 1, p outside [0,1] or gamma outside [0,1).
    void validate() const;
};

AdjacencyMatrix sample_er(const GraphParams& params, const RandomStream& rng);
DirectedAdjacencyMatrix sample_directed_er(const GraphParams& params, const RandomStream& rng);

/// Keeps edge (i,j) with i<j as {i,j}; edges pointing to a lower index are dropped.
AdjacencyMatrix directed_to_undirected(const DirectedAdjacencyMatrix& dg);

AdjacencyMatrix complement_graph(const AdjacencyMatrix& a);

/// Sum over ordered pairs (i,j) in S x S of A[i][j], i.e. twice the edges inside S.
std::int64_t ordered_pair_sum(const AdjacencyMatrix& a, const NodeSet& s);

/// p_S = sum_{i,j in S} A_ij / |S|^2 (diagonal zeros included in the denominator).
double empirical_density(const AdjacencyMatrix& a, const NodeSet& s);

std::size_t degree_in(const AdjacencyMatrix& a, std::size_t i, const NodeSet& s);
double normalized_degree(const AdjacencyMatrix& a, std::size_t i, const NodeSet& s);

/// Transposes a 64x64 bit block in place: bit j of x[i] <-> bit i of x[j].
void transpose64(Word x[64]) noexcept;

// --- file I/O ----------------------------------------------------------------

enum class GraphFormat { text, binary };

using AnyGraph = std::variant<AdjacencyMatrix, DirectedAdjacencyMatrix>;

AnyGraph read_any_graph(const std::filesystem::path& path);
AdjacencyMatrix read_graph(const std::filesystem::path& path);
DirectedAdjacencyMatrix read_directed_graph(const std::filesystem::path& path);

/// Parses the text format from a string (used by read_any_graph and tests).
AnyGraph parse_graph_text(const std::string& text);

void write_graph(const AdjacencyMatrix& a, const std::filesystem::path& path, GraphFormat fmt = GraphFormat::text);
void write_graph(const DirectedAdjacencyMatrix& g, const std::filesystem::path& path,
                 GraphFormat fmt = GraphFormat::text);

std::string format_graph_text(const AdjacencyMatrix& a);
std::string format_graph_text(const DirectedAdjacencyMatrix& g);

}  // namespace rer
