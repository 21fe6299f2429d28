#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rer/graph.hpp"
#include "rer/random.hpp"

namespace rer {

/// Constants c (spectral condition) and c1 (submatrix-sum condition).
/// Defaults are the shipped calibration, see data/calibration.json.
struct RateConstants {
    double c_eta = 3.0;
    double c_kappa = 3.0;
    void validate() const;
};

/// eta(p,n) = c * max(sqrt(p(1-p)/n), sqrt(ln n)/n).
double eta(double p, std::size_t n, const RateConstants& k);

/// kappa(alpha,p,n) = c1 * max(alpha sqrt(p/n ln(e/alpha)), alpha/n ln(e/alpha), sqrt(p ln n)/n).
double kappa(double alpha, double p, std::size_t n, const RateConstants& k);

struct ConditionResult {
    bool holds = true;
    double lhs = 0.0;
    double bound = 0.0;
    NodeSet witness_a;  // F' (condition 2 and 3)
    NodeSet witness_b;  // F'' (condition 3)
    double margin() const { return bound - lhs; }
};

struct RegularityReport {
    std::array<ConditionResult, 3> condition;
    bool sampled = false;
    bool holds() const { return condition[0].holds && condition[1].holds && condition[2].holds; }
};

struct RegularityOptions {
    /// Exhaustive enumeration of F' (and optimal F'') up to this many nodes.
    std::size_t exact_max_n = 14;
    /// Sampled mode: random F' draws, each paired with its best F'' and then
    /// improved by alternating best responses. A handful of deterministic
    /// starts (all of F, extreme-degree sets) are always added.
    std::size_t sampled_pairs = std::size_t{1} << 14;
    /// Check condition 2 over every F' in exact mode instead of using the
    /// submatrix-norm dominance ||M_{F'xF'}|| <= ||M_{FxF}||.
    bool enumerate_condition2 = false;
};

/// Sizes allowed in condition 3: [0, floor(a n)] U [ceil((1-a) n), n].
bool in_size_class(std::size_t size, std::size_t n, double alpha2);

/// Largest |sum_{i in F', j in F''} (A_ij - p)| over F', F'' subsets of F with
/// sizes in the alpha2 class. Exact when |F| <= exact_max_n, otherwise a
/// lower bound from alternating maximisation (sampled = true).
ConditionResult max_centered_block_sum(const AdjacencyMatrix& a, const NodeSet& f, double p, double alpha2,
                                       RandomStream rng, const RegularityOptions& opts, bool& sampled);

/// ||(A - p)_{F x F}||; exact up to the solver cap.
double centered_norm_at(const AdjacencyMatrix& a, const NodeSet& f, double p);

RegularityReport check_regularity(const AdjacencyMatrix& a, const NodeSet& f, double p, double alpha1, double alpha2,
                                  const RateConstants& k, RandomStream rng = RandomStream(0),
                                  const RegularityOptions& opts = {});

struct ConsequenceReport {
    bool spectral_holds = true;  // ||(A - p_F')_{F'xF'}|| <= 2 n eta for all F'
    bool density_holds = true;   // |p_F' - p| <= 4 kappa(alpha2) for |F'| >= (1-alpha2) n
    double worst_spectral_ratio = 0.0;  // lhs / bound
    double worst_density_ratio = 0.0;
    std::size_t subsets_checked = 0;
};

/// Audits the two consequences of regularity over every F' subset of F (|F| <= 14).
ConsequenceReport consequence_checks(const AdjacencyMatrix& a, const NodeSet& f, double p, double alpha2,
                                     const RateConstants& k);

/// Coarse-estimate inequality |p_S - p| <= (||(A - p_S)_{SxS}|| + n eta) / ((1/2 - alpha1) n)
/// over every |S| >= n/2 (n <= 16). Returns the worst lhs/rhs ratio (<= 1 means it holds).
double coarse_estimate_worst_ratio(const AdjacencyMatrix& a, double p, double alpha1, const RateConstants& k);

struct ConcentrationRow {
    std::size_t n = 0;
    double p = 0.0;
    double alpha = 0.0;
    std::size_t trial = 0;
    double lhs = 0.0;
    double bound = 0.0;
    bool holds = true;
    bool sampled = false;
};

/// Bound 6 max{16 a n sqrt(p n ln(e/a)), 60 a n ln(e/a), 5 n sqrt(p ln(e n))}.
double concentration_bound(std::size_t n, double p, double alpha);

/// Per (alpha, trial): max over admissible S, S' of |sum (A - p)| on a fresh G(n,p).
std::vector<ConcentrationRow> concentration_audit(std::size_t n, double p, const std::vector<double>& alpha_grid,
                                                  std::size_t trials, const RandomStream& rng,
                                                  const RegularityOptions& opts = {});

/// Chernoff tail bound 2 exp(-min(lambda^2 / (3 t p), lambda / 3)).
double chernoff_bound(std::size_t t, double p, double lambda);

}  // namespace rer
