#include "rer/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rer/adversary.hpp"
#include "rer/error.hpp"

namespace rer {

void Pmf::validate(double tol) const {
    double s = 0.0;
    for (double m : mass) {
        if (!(m >= 0.0)) throw DomainError("pmf has a negative or NaN entry");
        s += m;
    }
    if (std::abs(s - 1.0) > tol) throw DomainError("pmf does not sum to 1");
}

Pmf binomial_pmf(std::size_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("binomial p must lie in [0,1]");
    Pmf out;
    out.mass.assign(n + 1, 0.0);
    if (p == 0.0) {
        out.mass[0] = 1.0;
        return out;
    }
    if (p == 1.0) {
        out.mass[n] = 1.0;
        return out;
    }
    const double dn = static_cast<double>(n);
    const auto mode = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor((dn + 1.0) * p)));
    const double odds = p / (1.0 - p);
    auto& f = out.mass;
    f[mode] = 1.0;
    for (std::size_t k = mode; k < n; ++k) {
        f[k + 1] = f[k] * (static_cast<double>(n - k) / static_cast<double>(k + 1)) * odds;
        if (f[k + 1] == 0.0) break;
    }
    for (std::size_t k = mode; k > 0; --k) {
        f[k - 1] = f[k] * (static_cast<double>(k) / static_cast<double>(n - k + 1)) / odds;
        if (f[k - 1] == 0.0) break;
    }
    // Sum smallest terms first.
    double s = 0.0;
    {
        std::size_t lo = 0, hi = n;
        while (lo < mode) s += f[lo++];
        while (hi > mode) s += f[hi--];
        s += f[mode];
    }
    for (auto& v : f) v /= s;
    return out;
}

double tv_distance(const Pmf& a, const Pmf& b) {
    if (a.mass.size() != b.mass.size()) throw DomainError("pmfs have different support sizes");
    double s = 0.0;
    for (std::size_t i = 0; i < a.mass.size(); ++i) s += std::abs(a.mass[i] - b.mass[i]);
    return 0.5 * s;
}

TvBound roos_tv_bound(std::size_t n_prime, double p, double x) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("Roos bound needs 0 < p < 1");
    if (!(x >= 0.0)) throw ParameterError("shift x must be nonnegative");
    TvBound b;
    b.trivial = static_cast<double>(n_prime) * x;
    const double tau = x * std::sqrt((static_cast<double>(n_prime) + 2.0) / (2.0 * p * (1.0 - p)));
    b.roos = tau >= 1.0 ? std::numeric_limits<double>::infinity()
                        : std::sqrt(std::exp(1.0) / 2.0) * tau / ((1.0 - tau) * (1.0 - tau));
    return b;
}

double DegreeCoupling::mixture_residual() const {
    const auto d1 = binomial_pmf(n - 1, p1), d2 = binomial_pmf(n - 1, p2);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double l = (1.0 - epsilon) * d1.mass[k] + epsilon * dist1.mass[k];
        const double r = (1.0 - epsilon) * d2.mass[k] + epsilon * dist2.mass[k];
        worst = std::max(worst, std::abs(l - r));
    }
    return worst;
}

DegreeCoupling construct_coupling(std::size_t n, double p1, double p2, double epsilon) {
    if (n < 1) throw ParameterError("n must be positive");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ParameterError("epsilon must lie in [0,1]");
    DegreeCoupling c;
    c.n = n;
    c.p1 = p1;
    c.p2 = p2;
    c.epsilon = epsilon;
    const auto d1 = binomial_pmf(n - 1, p1), d2 = binomial_pmf(n - 1, p2);
    c.tv = tv_distance(d1, d2);
    if (c.tv == 0.0) {
        c.dist1 = c.dist2 = d1;
        return c;
    }
    if (c.tv > epsilon)
        throw InfeasibleError("coupling needs TV(Bin(n-1,p1), Bin(n-1,p2)) <= epsilon, got TV = " +
                              std::to_string(c.tv) + " > " + std::to_string(epsilon));
    const double w = (1.0 - epsilon) / epsilon;
    const double rest = 1.0 - w * c.tv;
    c.dist1.mass.resize(n);
    c.dist2.mass.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double diff = d2.mass[k] - d1.mass[k];
        c.dist1.mass[k] = w * std::max(diff, 0.0) + rest * d1.mass[k];
        c.dist2.mass[k] = w * std::max(-diff, 0.0) + rest * d1.mass[k];
    }
    return c;
}

double lower_bound_p2(std::size_t n, double p1, double gamma) {
    if (n < 1) throw ParameterError("n must be positive");
    const double dn = static_cast<double>(n);
    return p1 + 0.1 * std::max(gamma * std::sqrt(p1 / dn), gamma / dn);
}

IndistinguishablePair indistinguishable_pair(std::size_t n, double p1, double gamma, const RandomStream& rng) {
    if (!(p1 >= 0.0 && p1 <= 0.5)) throw ParameterError("p1 must lie in [0, 1/2]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0,1)");
    const double p2 = lower_bound_p2(n, p1, gamma);
    IndistinguishablePair out;
    out.coupling = construct_coupling(n, p1, p2, 0.15 * gamma);
    const auto g1 = sample_directed_er({n, p1, gamma, 0}, rng.split("g1"));
    const auto g2 = sample_directed_er({n, p2, gamma, 0}, rng.split("g2"));
    out.g1 = degree_rewiring_adversary(g1, gamma, out.coupling.dist1.mass, rng.split("a1")).graph;
    out.g2 = degree_rewiring_adversary(g2, gamma, out.coupling.dist2.mass, rng.split("a2")).graph;
    return out;
}

std::size_t DemoReport::rejections(double level) const {
    return static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [&](const auto& r) { return r.p_value < level; }));
}

DemoReport indistinguishability_demo(std::size_t n, double p1, double gamma, std::size_t nodes_per_side,
                                     std::size_t runs, const RandomStream& rng) {
    if (n < 2) throw ParameterError("demo needs n >= 2");
    if (nodes_per_side < 1 || runs < 1) throw ParameterError("demo needs at least one node and one run");
    DemoReport rep;
    rep.nodes_per_side = nodes_per_side;
    rep.pooled1.assign(n, 0);
    rep.pooled2.assign(n, 0);
    for (std::size_t r = 0; r < runs; ++r) {
        std::vector<std::uint64_t> h1(n, 0), h2(n, 0);
        std::size_t taken = 0;
        for (std::size_t g = 0; taken < nodes_per_side; ++g) {
            auto pair = indistinguishable_pair(n, p1, gamma, rng.split(r).split(g));
            const std::size_t k = std::min(n, nodes_per_side - taken);
            for (std::size_t i = 0; i < k; ++i) {
                ++h1[pair.g1.out_degree(i)];
                ++h2[pair.g2.out_degree(i)];
            }
            taken += k;
            if (r == 0 && g == 0) rep.coupling = std::move(pair.coupling);
        }
        for (std::size_t d = 0; d < n; ++d) {
            rep.pooled1[d] += h1[d];
            rep.pooled2[d] += h2[d];
        }
        rep.runs.push_back(chi_square_two_sample(h1, h2));
    }
    return rep;
}

}  // namespace rer
