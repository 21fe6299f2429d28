#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rer/graph.hpp"
#include "rer/random.hpp"
#include "rer/stats.hpp"

namespace rer {

/// Probability mass function on {0, ..., size-1}.
struct Pmf {
    std::vector<double> mass;
    std::size_t support_size() const noexcept { return mass.size(); }
    /// Throws DomainError unless entries are >= 0 and sum to 1 within tol.
    void validate(double tol = 1e-12) const;
};

/// Bin(n, p) on {0..n}, built from the mode outwards with ratio recurrences and normalised.
Pmf binomial_pmf(std::size_t n, double p);

/// 1/2 sum |a_i - b_i|.
double tv_distance(const Pmf& a, const Pmf& b);

struct TvBound {
    double roos = 0.0;     // sqrt(e/2) tau / (1 - tau)^2, +inf when tau >= 1
    double trivial = 0.0;  // n' x
    double best() const { return roos < trivial ? roos : trivial; }
};

/// Bounds on TV(Bin(n', p), Bin(n', p + x)); tau = x sqrt((n' + 2) / (2 p (1 - p))).
TvBound roos_tv_bound(std::size_t n_prime, double p, double x);

struct DegreeCoupling {
    std::size_t n = 0;
    double p1 = 0.0, p2 = 0.0;
    double epsilon = 0.0;
    double tv = 0.0;  // TV(Bin(n-1,p1), Bin(n-1,p2))
    Pmf dist1, dist2;
    /// max_k |(1-eps) D1_k + eps P1_k - (1-eps) D2_k - eps P2_k|.
    double mixture_residual() const;
};

/// P1 = (1-eps)(D2-D1)_+/eps + (1-m) R, P2 = (1-eps)(D1-D2)_+/eps + (1-m) R,
/// m = (1-eps) TV/eps, R = D1, with D_i = Bin(n-1, p_i).
DegreeCoupling construct_coupling(std::size_t n, double p1, double p2, double epsilon);

/// p1 + 0.1 max(gamma sqrt(p1/n), gamma/n).
double lower_bound_p2(std::size_t n, double p1, double gamma);

struct IndistinguishablePair {
    DirectedAdjacencyMatrix g1, g2;
    DegreeCoupling coupling;
};

/// One corrupted directed graph from each side of the coupling (epsilon = 0.15 gamma).
IndistinguishablePair indistinguishable_pair(std::size_t n, double p1, double gamma, const RandomStream& rng);

struct DemoReport {
    DegreeCoupling coupling;
    std::size_t nodes_per_side = 0;
    std::vector<ChiSquareResult> runs;
    /// Out-degree histograms (support {0..n-1}) pooled over every run.
    std::vector<std::uint64_t> pooled1, pooled2;
    std::size_t rejections(double level) const;
};

/// Repeats: pool the out-degrees of `nodes_per_side` nodes from fresh pairs on
/// each side and run a two-sample chi-square test.
DemoReport indistinguishability_demo(std::size_t n, double p1, double gamma, std::size_t nodes_per_side,
                                     std::size_t runs, const RandomStream& rng);

}  // namespace rer
