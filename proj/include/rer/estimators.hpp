#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rer/graph.hpp"
#include "rer/random.hpp"

namespace rer {

struct SpectralConfig {
    double alpha1 = 1.0 / 60.0;
    /// Outer repeats of the deletion process; 0 picks default_repeats(n, alpha1).
    int repeats = 0;
    double eig_tol = 0.01;
    /// Reject alpha1 outside [1/n, 1/60]. Tests switch this off to probe small graphs.
    bool enforce_range = true;
};

struct CandidateRecord {
    std::uint32_t size = 0;
    double norm = 0.0;     // ||(A - p_S)_{SxS}|| as computed in that round
    double density = 0.0;  // p_S
    std::int64_t removed = -1;  // node deleted from this candidate, -1 for the last one
    bool converged = true;
};

struct SpectralTrace {
    std::vector<std::vector<CandidateRecord>> runs;  // one candidate path per repeat
    std::size_t best_run = 0;
    std::size_t best_index = 0;
    double best_norm = 0.0;
    NodeSet s_star;
    std::size_t unconverged = 0;
    std::size_t matvecs = 0;
};

struct TrimTrace {
    NodeSet s_star;
    NodeSet s_f;
    double p_s_star = 0.0;
    std::vector<std::uint32_t> removed;  // highest score first
    std::vector<double> removed_scores;
};

struct EstimatorReport {
    double estimate = 0.0;  // clamped to [0,1]
    double raw = 0.0;       // before clamping
    std::string method;
    std::optional<SpectralTrace> spectral;
    std::optional<TrimTrace> trim;
    std::vector<std::uint32_t> pruned;  // prune-then: removed nodes
    // Algorithm 5 bookkeeping.
    std::optional<double> p_star, q_star;
    std::vector<EstimatorReport> stages;
    // Exhaustive search.
    std::optional<std::uint64_t> best_mask;
    std::optional<double> best_norm;
};

EstimatorReport mean_estimator(const AdjacencyMatrix& a);
EstimatorReport median_estimator(const AdjacencyMatrix& a);

enum class InnerEstimator { mean, median };

/// Removes floor(c gamma n) highest-degree nodes, then floor(c gamma n)
/// lowest-degree nodes among the rest (ties by ascending index), and applies
/// the inner estimator to the induced subgraph.
EstimatorReport prune_then(const AdjacencyMatrix& a, double gamma, double c, InnerEstimator inner);

/// Smallest r with (1 - q)^r <= n^-2, q = Pr[Bin(floor(9 alpha1 n), 0.15) >= floor(alpha1 n)],
/// capped at ceil(2 log2 n).
int default_repeats(std::size_t n, double alpha1);

/// Algorithm 2: repeated spectral deletion; returns S* and the candidate trace.
SpectralTrace spectral_candidates(const AdjacencyMatrix& a, const SpectralConfig& cfg, const RandomStream& rng);

/// Algorithm 3: drop the floor(3 alpha1 n) nodes of S* whose normalised degree
/// deviates most from p_{S*}; return p_{S^f}.
EstimatorReport trim(const AdjacencyMatrix& a, double alpha1, const NodeSet& s_star);

/// Algorithm 4.
EstimatorReport robust_estimate(const AdjacencyMatrix& a, const SpectralConfig& cfg, const RandomStream& rng);

/// Algorithm 5: p* from A, and 1 - q* from the complement when p* > 1/2.
/// q* is only computed when needed; it uses its own stream so the result is
/// the same as computing both.
EstimatorReport robust_estimate_symmetric(const AdjacencyMatrix& a, const SpectralConfig& cfg, const RandomStream& rng);

inline constexpr std::size_t kExhaustiveMaxN = 16;

/// argmin of ||(A - p_S)_{SxS}|| over |S| >= ceil(n/2). Norms within
/// 1e-9 * max(1, min) of the minimum are ties; ties go to the largest |S|,
/// then the smallest bitmask.
EstimatorReport exhaustive_estimate(const AdjacencyMatrix& a);

}  // namespace rer
