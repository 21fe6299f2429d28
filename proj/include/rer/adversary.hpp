#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "rer/graph.hpp"
#include "rer/random.hpp"

namespace rer {

struct CorruptionRecord {
    NodeSet corrupted;  // B
    std::string strategy;
    double gamma_requested = 0.0;
    std::uint64_t seed = 0;
    /// Only the Bin-sized rewiring strategy can exceed floor(gamma n).
    bool over_budget = false;
};

template <class G>
struct AdversaryOutcome {
    G graph;
    CorruptionRecord record;
};

using UndirectedOutcome = AdversaryOutcome<AdjacencyMatrix>;
using DirectedOutcome = AdversaryOutcome<DirectedAdjacencyMatrix>;

/// Uniformly random k-subset of [n].
NodeSet random_subset(std::size_t n, std::size_t k, RandomStream& rng);

/// Uniformly random permutation of [n].
std::vector<std::uint32_t> random_permutation(std::size_t n, RandomStream& rng);

/// True when every entry with both endpoints outside B is unchanged.
bool preserves_uncorrupted(const AdjacencyMatrix& before, const AdjacencyMatrix& after, const NodeSet& b);

enum class FillMode { fill, empty, coin };

/// B is a uniform floor(gamma n)-subset; fill sets every edge touching B,
/// empty clears them, coin picks one of the two with probability 1/2.
UndirectedOutcome fill_or_empty_adversary(const AdjacencyMatrix& g, double gamma, FillMode mode, RandomStream rng);

struct FiveSetPartition {
    NodeSet b, s0, s1, s2, s3;
};

/// Random partition with |B| = floor(gamma n), |S0| = |S1| = floor(c gamma n),
/// |S2| = floor(2r/3) of the remainder r, S3 the rest.
FiveSetPartition five_set_partition(std::size_t n, double gamma, double c, RandomStream& rng);

/// Oblivious adversary that defeats prune-then-mean/median at p = 1/2:
/// clear B's edges, fill B-S1, B-S2 iid 3/5, B-S3 iid 3/10, B-B iid 3/5.
UndirectedOutcome five_set_adversary(const AdjacencyMatrix& g, double gamma, double c, RandomStream rng,
                                     FiveSetPartition* parts = nullptr);

/// Each node joins B independently with probability 0.15 gamma; every i in B
/// gets an out-degree from `degree_pmf` (support {0..n-1}) and a uniform
/// out-neighbourhood of that size. Only rows of B change.
DirectedOutcome degree_rewiring_adversary(const DirectedAdjacencyMatrix& dg, double gamma,
                                          std::span<const double> degree_pmf, RandomStream rng);

/// User strategy: edits the graph in place and returns B. The framework
/// rejects callbacks that exceed the budget or touch an F x F entry.
using RewireCallback = std::function<NodeSet(AdjacencyMatrix& graph, RandomStream& rng)>;

UndirectedOutcome custom_adversary(const AdjacencyMatrix& g, double gamma, const RewireCallback& rewire,
                                   RandomStream rng, std::string name = "custom");

}  // namespace rer
