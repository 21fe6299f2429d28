#include "rer/estimators.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <numeric>

#include "rer/error.hpp"
#include "rer/spectral.hpp"

namespace rer {

namespace {

EstimatorReport make_report(double raw, std::string method) {
    EstimatorReport r;
    r.raw = raw;
    r.estimate = std::clamp(raw, 0.0, 1.0);
    r.method = std::move(method);
    return r;
}

void require_n2(const AdjacencyMatrix& a) {
    if (a.n() < 2) throw DomainError("estimator needs at least 2 nodes");
}

double lower_median(std::vector<std::uint32_t> v) {
    const std::size_t k = (v.size() - 1) / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

void check_alpha(std::size_t n, double alpha1, bool enforce) {
    if (!(alpha1 > 0.0 && alpha1 < 1.0)) throw ParameterError("alpha1 must lie in (0,1)");
    if (enforce && (alpha1 < 1.0 / double(n) - 1e-12 || alpha1 > 1.0 / 60.0 + 1e-12))
        throw ParameterError("alpha1 must lie in [1/n, 1/60]; got " + std::to_string(alpha1) +
                             " for n=" + std::to_string(n));
}

}  // namespace

EstimatorReport mean_estimator(const AdjacencyMatrix& a) {
    require_n2(a);
    const double n = double(a.n());
    return make_report(double(a.edge_count()) / (n * (n - 1) / 2.0), "mean");
}

EstimatorReport median_estimator(const AdjacencyMatrix& a) {
    require_n2(a);
    return make_report(lower_median(a.degrees()) / double(a.n() - 1), "median");
}

EstimatorReport prune_then(const AdjacencyMatrix& a, double gamma, double c, InnerEstimator inner) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0,1)");
    if (!(c >= 0.0)) throw ParameterError("c must be nonnegative");
    const std::size_t n = a.n();
    const std::size_t k = floor_count(c * gamma * double(n));
    if (n < 2 * k + 2) throw DomainError("pruning leaves fewer than 2 nodes");

    const auto deg = a.degrees();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return deg[x] != deg[y] ? deg[x] > deg[y] : x < y; });
    NodeSet keep = NodeSet::all(n);
    std::vector<std::uint32_t> pruned(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    for (auto v : pruned) keep.erase(v);
    std::vector<std::uint32_t> rest(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    std::sort(rest.begin(), rest.end(), [&](auto x, auto y) { return deg[x] != deg[y] ? deg[x] < deg[y] : x < y; });
    for (std::size_t i = 0; i < k; ++i) {
        keep.erase(rest[i]);
        pruned.push_back(rest[i]);
    }

    const double m = double(keep.size());
    double raw;
    if (inner == InnerEstimator::mean) {
        raw = double(ordered_pair_sum(a, keep)) / (m * (m - 1));
    } else {
        std::vector<std::uint32_t> d;
        d.reserve(keep.size());
        keep.for_each([&](std::uint32_t i) { d.push_back(static_cast<std::uint32_t>(a.rows().row_popcount(i, keep))); });
        raw = lower_median(std::move(d)) / (m - 1);
    }
    auto r = make_report(raw, inner == InnerEstimator::mean ? "prune-mean" : "prune-median");
    r.pruned = std::move(pruned);
    return r;
}

int default_repeats(std::size_t n, double alpha1) {
    const int cap = std::max(1, static_cast<int>(std::ceil(2.0 * std::log2(double(std::max<std::size_t>(n, 2))))));
    const std::size_t t = floor_count(9.0 * alpha1 * double(n));
    const std::size_t need = floor_count(alpha1 * double(n));
    if (need == 0) return 1;
    if (t < need) return cap;
    boost::math::binomial_distribution<double> bin(double(t), 0.15);
    const double q = boost::math::cdf(boost::math::complement(bin, double(need - 1)));
    if (q >= 1.0) return 1;
    if (q <= 0.0) return cap;
    const double target = -2.0 * std::log(double(n));
    const int r = static_cast<int>(std::ceil(target / std::log1p(-q) - 1e-12));
    return std::clamp(r, 1, cap);
}

SpectralTrace spectral_candidates(const AdjacencyMatrix& a, const SpectralConfig& cfg, const RandomStream& rng) {
    const std::size_t n = a.n();
    if (n < 2) throw DomainError("spectral filtering needs at least 2 nodes");
    check_alpha(n, cfg.alpha1, cfg.enforce_range);
    if (!(cfg.eig_tol > 0.0 && cfg.eig_tol <= 0.01)) throw ParameterError("eig_tol must lie in (0, 0.01]");
    const std::size_t rounds = std::min(floor_count(9.0 * cfg.alpha1 * double(n)), n - 1);
    const int repeats = cfg.repeats > 0 ? cfg.repeats : default_repeats(n, cfg.alpha1);

    SpectralTrace trace;
    trace.best_norm = INFINITY;
    EigenOptions opts;
    opts.restarts = 1;
    opts.min_steps = 5;

    for (int rep = 0; rep < repeats; ++rep) {
        RandomStream rs = rng.split(static_cast<std::uint64_t>(rep));
        RandomStream pick = rs.split("sample");
        NodeSet s = NodeSet::all(n);
        std::int64_t pairs = ordered_pair_sum(a, s);
        std::vector<double> warm;
        std::vector<CandidateRecord> path;
        path.reserve(rounds + 1);

        for (std::size_t t = 0; t <= rounds; ++t) {
            const auto k = static_cast<double>(s.size());
            const double ps = double(pairs) / (k * k);
            CenteredOperator op(a, s, ps);
            opts.warm_start = warm.empty() ? nullptr : &warm;
            EigenEstimate est = top_eigvec_approx(op, cfg.eig_tol, rs.split(static_cast<std::uint64_t>(t)), opts);
            trace.matvecs += est.matvecs;
            if (!est.converged) ++trace.unconverged;

            CandidateRecord rec;
            rec.size = static_cast<std::uint32_t>(s.size());
            rec.norm = std::abs(est.value);
            rec.density = ps;
            rec.converged = est.converged;
            if (t < rounds) {
                // Draw i with probability v_i^2.
                double total = 0.0;
                s.for_each([&](std::uint32_t i) { total += est.vector[i] * est.vector[i]; });
                const double u = pick.uniform() * total;
                double acc = 0.0;
                std::int64_t chosen = -1, last = -1;
                s.for_each([&](std::uint32_t i) {
                    last = i;
                    if (chosen >= 0) return;
                    acc += est.vector[i] * est.vector[i];
                    if (acc > u) chosen = i;
                });
                if (chosen < 0) chosen = last;
                rec.removed = chosen;
                pairs -= 2 * static_cast<std::int64_t>(a.rows().row_popcount(static_cast<std::size_t>(chosen), s));
                s.erase(static_cast<std::size_t>(chosen));
                warm = std::move(est.vector);
                warm[static_cast<std::size_t>(chosen)] = 0.0;
            }
            path.push_back(rec);
        }

        for (std::size_t i = 0; i < path.size(); ++i)
            if (path[i].norm < trace.best_norm) {
                trace.best_norm = path[i].norm;
                trace.best_run = static_cast<std::size_t>(rep);
                trace.best_index = i;
            }
        trace.runs.push_back(std::move(path));
    }

    NodeSet s_star = NodeSet::all(n);
    const auto& best = trace.runs[trace.best_run];
    for (std::size_t i = 0; i < trace.best_index; ++i) s_star.erase(static_cast<std::size_t>(best[i].removed));
    trace.s_star = std::move(s_star);
    return trace;
}

EstimatorReport trim(const AdjacencyMatrix& a, double alpha1, const NodeSet& s_star) {
    if (s_star.universe() != a.n()) throw ParameterError("node set universe does not match graph size");
    const std::size_t drop = floor_count(3.0 * alpha1 * double(a.n()));
    const std::size_t k = s_star.size();
    if (k <= drop) throw DomainError("trim would remove every node of S*");

    // |p_S - d_i/|S|| = |P - d_i |S|| / |S|^2 with P the ordered pair sum: exact integer keys.
    const std::int64_t pairs = ordered_pair_sum(a, s_star);
    const auto members = s_star.members();
    std::vector<std::pair<std::int64_t, std::uint32_t>> keyed;
    keyed.reserve(k);
    for (auto i : members) {
        const auto d = static_cast<std::int64_t>(a.rows().row_popcount(i, s_star));
        keyed.emplace_back(std::llabs(pairs - d * static_cast<std::int64_t>(k)), i);
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first > y.first : x.second < y.second;
    });

    TrimTrace tt;
    tt.s_star = s_star;
    tt.s_f = s_star;
    const double k2 = double(k) * double(k);
    tt.p_s_star = double(pairs) / k2;
    for (std::size_t r = 0; r < drop; ++r) {
        tt.s_f.erase(keyed[r].second);
        tt.removed.push_back(keyed[r].second);
        tt.removed_scores.push_back(double(keyed[r].first) / k2);
    }
    auto rep = make_report(empirical_density(a, tt.s_f), "trim");
    rep.trim = std::move(tt);
    return rep;
}

EstimatorReport robust_estimate(const AdjacencyMatrix& a, const SpectralConfig& cfg, const RandomStream& rng) {
    SpectralTrace st = spectral_candidates(a, cfg, rng);
    EstimatorReport r = trim(a, cfg.alpha1, st.s_star);
    r.method = "spectral";
    r.spectral = std::move(st);
    return r;
}

EstimatorReport robust_estimate_symmetric(const AdjacencyMatrix& a, const SpectralConfig& cfg, const RandomStream& rng) {
    EstimatorReport p = robust_estimate(a, cfg, rng.split("p"));
    EstimatorReport out;
    out.method = "spectral-sym";
    out.p_star = p.raw;
    if (p.raw <= 0.5) {
        out.raw = p.raw;
        out.stages.push_back(std::move(p));
    } else {
        EstimatorReport q = robust_estimate(complement_graph(a), cfg, rng.split("q"));
        out.q_star = q.raw;
        out.raw = 1.0 - q.raw;
        out.stages.push_back(std::move(p));
        out.stages.push_back(std::move(q));
    }
    out.estimate = std::clamp(out.raw, 0.0, 1.0);
    return out;
}

EstimatorReport exhaustive_estimate(const AdjacencyMatrix& a) {
    const std::size_t n = a.n();
    if (n > kExhaustiveMaxN)
        throw DomainError("exhaustive search enumerates 2^n subsets and is limited to n <= " +
                          std::to_string(kExhaustiveMaxN) + "; got n=" + std::to_string(n));
    if (n < 1) throw DomainError("empty graph");
    const std::size_t min_size = (n + 1) / 2;
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;

    std::vector<std::pair<std::uint64_t, double>> norms;
    double best = INFINITY;
    for (std::uint64_t mask = 1; mask <= full; ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) < min_size) continue;
        const NodeSet s = NodeSet::from_mask(n, mask);
        const double v = spectral_norm_exact(CenteredOperator::with_density(a, s).dense());
        norms.emplace_back(mask, v);
        best = std::min(best, v);
    }
    const double slack = 1e-9 * std::max(1.0, best);
    std::uint64_t pick = 0;
    int pick_size = -1;
    double pick_norm = 0.0;
    for (auto [mask, v] : norms) {
        if (v > best + slack) continue;
        const int sz = std::popcount(mask);
        if (sz > pick_size || (sz == pick_size && mask < pick)) {
            pick = mask;
            pick_size = sz;
            pick_norm = v;
        }
    }
    auto r = make_report(empirical_density(a, NodeSet::from_mask(n, pick)), "exhaustive");
    r.best_mask = pick;
    r.best_norm = pick_norm;
    return r;
}

}  // namespace rer
