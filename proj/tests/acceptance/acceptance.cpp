// Acceptance checks. One PASS/FAIL line per criterion:
//   acceptance [--criterion N]
#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "rer/adversary.hpp"
#include "rer/estimators.hpp"
#include "rer/harness.hpp"
#include "rer/lowerbound.hpp"
#include "rer/regularity.hpp"
#include "rer/spectral.hpp"
#include "rer/stats.hpp"

using namespace rer;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

Eigen::MatrixXd random_symmetric(std::size_t n, RandomStream& r) {
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = 2.0 * r.uniform() - 1.0;
    return m;
}

std::vector<int> random_indices(std::size_t n, RandomStream& r) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < n; ++i)
        if (r.uniform() < 0.5) idx.push_back(int(i));
    if (idx.empty()) idx.push_back(int(r.below(n)));
    return idx;
}

Eigen::MatrixXd sub(const Eigen::MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Eigen::MatrixXd s(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = m(rows[i], cols[j]);
    return s;
}

double svd_norm(const Eigen::MatrixXd& m) { return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0); }

double median_of(std::vector<double> v) { return quantile_lower(v, 0.5); }

std::vector<double> errors_of(const ExperimentResult& r, const std::string& est, double gamma) {
    std::vector<double> out;
    for (const auto& x : r.rows)
        if (x.estimator == est && x.point.gamma == gamma && x.ok) out.push_back(x.abs_error);
    return out;
}

// 1. Matrix lemmas.
Verdict c01() {
    const auto t0 = std::chrono::steady_clock::now();
    RandomStream r(101);
    std::size_t bad = 0;
    for (int t = 0; t < 1000; ++t) {
        auto m = random_symmetric(20, r), m2 = random_symmetric(20, r);
        const double nm = spectral_norm_exact(m);
        if (spectral_norm_exact(m + m2) > nm + spectral_norm_exact(m2) + 1e-9) ++bad;
        auto rows = random_indices(20, r), cols = random_indices(20, r);
        auto block = sub(m, rows, cols);
        const double bn = svd_norm(block);
        if (bn > nm + 1e-9) ++bad;
        if (bn < std::abs(block.sum()) / std::sqrt(double(block.size())) - 1e-9) ++bad;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {bad == 0 && secs < 10.0, fmt("violations=%zu runtime=%.2fs (limit 10s)", bad, secs)};
}

// 2. Eigenvector mass.
Verdict c02() {
    RandomStream r(202);
    std::size_t exact_ok = 0, exact_n = 0;
    while (exact_n < 500) {
        auto m = random_symmetric(20, r);
        auto s = random_indices(20, r);
        if (s.size() == 20) continue;
        const double rho = spectral_norm_exact(sub(m, s, s)) / spectral_norm_exact(m);
        if (rho >= 1.0) continue;
        auto [lambda, v] = top_eigenpair_exact(m);
        double in_s = 0;
        for (int i : s) in_s += v(i) * v(i);
        exact_ok += 1.0 - in_s >= (1 - rho) * (1 - rho) / (1 + (1 - rho) * (1 - rho)) - 1e-9;
        ++exact_n;
    }
    std::size_t approx_ok = 0, approx_n = 0;
    while (approx_n < 200) {
        auto m = random_symmetric(20, r);
        auto s = random_indices(20, r);
        if (s.size() == 20) continue;
        const double part = spectral_norm_exact(sub(m, s, s));
        if (part == 0.0) continue;
        const double scale = (0.3 + 0.23 * r.uniform()) * spectral_norm_exact(m) / part;
        for (int i : s)
            for (int j : s) m(i, j) *= scale;
        const double nm = spectral_norm_exact(m);
        if (spectral_norm_exact(sub(m, s, s)) > 0.53 * nm) continue;
        auto [lambda, top] = top_eigenpair_exact(m);
        Eigen::VectorXd v = top;
        const double noise = 0.3 * r.uniform();
        for (int i = 0; i < 20; ++i) v(i) += noise * (2 * r.uniform() - 1);
        v.normalize();
        if ((m * v).norm() < 0.99 * nm) continue;
        double out = 1.0;
        for (int i : s) out -= v(i) * v(i);
        approx_ok += out >= 0.125;
        ++approx_n;
    }
    return {exact_ok == exact_n && approx_ok == approx_n,
            fmt("exact-vector bound %zu/%zu, approximate-vector bound %zu/%zu", exact_ok, exact_n, approx_ok,
                approx_n)};
}

// 3. Uncorrupted baselines.
Verdict c03() {
    const double p = 0.5;
    std::size_t far = 0;
    for (std::uint64_t t = 0; t < 2000; ++t) {
        auto g = sample_er({400, p, 0.0, 0}, RandomStream::derive(303, {400, t}));
        far += std::abs(mean_estimator(g).estimate - p) >= 20 * std::sqrt(p * (1 - p)) / 400;
    }
    const double mean_rate = double(far) / 2000;
    std::size_t close = 0;
    const std::size_t n = 14400;
    for (std::uint64_t t = 0; t < 300; ++t) {
        auto g = sample_er({n, p, 0.0, 0}, RandomStream::derive(303, {n, t}));
        close += std::abs(median_estimator(g).estimate - p) <= 121.0 / double(n - 1);
    }
    const double med_rate = double(close) / 300;
    return {mean_rate <= 0.02 && med_rate >= 0.98,
            fmt("mean: Pr[far]=%.4f (limit 0.02); median: in-band rate=%.4f (need 0.98)", mean_rate, med_rate)};
}

// 4. Coin adversary breaks mean and median.
Verdict c04() {
    const double gamma = 0.1;
    std::size_t mean_far = 0, med_far = 0;
    const int trials = 400;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto r = RandomStream::derive(404, {t});
        auto g = sample_er({200, 0.5, 0.0, 0}, r.split("gen"));
        auto out = fill_or_empty_adversary(g, gamma, FillMode::coin, r.split("adv"));
        mean_far += std::abs(mean_estimator(out.graph).estimate - 0.5) >= gamma / 2;
        med_far += std::abs(median_estimator(out.graph).estimate - 0.5) >= gamma / 2;
    }
    const double a = double(mean_far) / trials, b = double(med_far) / trials;
    return {a >= 0.45 && b >= 0.45, fmt("mean far rate=%.3f, median far rate=%.3f (need 0.45)", a, b)};
}

ExperimentConfig five_set_grid(std::vector<double> gammas, std::vector<EstimatorSpec> est) {
    ExperimentConfig c;
    c.n = {2000};
    c.p = {0.5};
    c.gamma = std::move(gammas);
    c.adversary = {"five-set", 1.0};
    c.estimators = std::move(est);
    c.trials = 100;
    c.master_seed = 505;
    c.threads = threads();
    return c;
}

// 5. Prune-then-mean gamma^2 scaling, prune-then-median deviation.
Verdict c05() {
    auto r = run_experiment(five_set_grid({0.12, 0.24}, {{"prune-mean"}, {"prune-median"}}));
    const double m1 = median_of(errors_of(r, "prune-mean", 0.12));
    const double m2 = median_of(errors_of(r, "prune-mean", 0.24));
    const double ratio = m2 / m1;
    const auto med = errors_of(r, "prune-median", 0.12);
    const double rate =
        double(std::count_if(med.begin(), med.end(), [](double e) { return e > 0.012; })) / double(med.size());
    return {ratio >= 2 && ratio <= 8 && rate >= 0.9,
            fmt("prune-mean median error %.5f -> %.5f, ratio=%.3f (need [2,8]); "
                "prune-median error > gamma/10 in %.3f of trials (need 0.9)",
                m1, m2, ratio, rate)};
}

// 6. Spectral beats prune-then-mean by 2x.
Verdict c06() {
    auto r = run_experiment(five_set_grid({0.06, 0.12}, {{"prune-mean"}, {"spectral-sym"}}));
    bool pass = r.error_rows() == 0;
    std::string d;
    for (double g : {0.06, 0.12}) {
        const double pm = median_of(errors_of(r, "prune-mean", g));
        const double sp = median_of(errors_of(r, "spectral-sym", g));
        pass = pass && sp <= 0.5 * pm;
        d += fmt("gamma=%.2f: spectral-sym %.5f vs prune-mean %.5f (ratio %.3f, need <= 0.5); ", g, sp, pm, sp / pm);
    }
    return {pass, d + fmt("error rows=%zu", r.error_rows())};
}

// 7. Structural guarantees of the spectral stages over bench runs.
Verdict c07() {
    std::size_t rows = 0, ok = 0;
    for (const char* adv : {"none", "fill", "coin", "five-set"}) {
        ExperimentConfig c;
        c.n = {120, 300};
        c.p = {0.1, 0.5, 0.8};
        c.gamma = {0.02, 0.1};
        c.adversary = {adv, 1.0};
        c.estimators = {{"spectral"}, {"spectral-sym"}};
        c.trials = 3;
        c.master_seed = 707;
        c.threads = threads();
        for (const auto& x : run_experiment(c).rows) {
            ++rows;
            ok += x.ok && x.checks == "ok";
        }
    }
    return {rows > 0 && ok == rows, fmt("%zu/%zu spectral rows pass size, subset, trim-count and argmin checks", ok, rows)};
}

// 8. Exhaustive estimator against an independent brute force.
Verdict c08() {
    std::size_t agree = 0;
    const std::size_t total = 200;
    for (std::uint64_t t = 0; t < total; ++t) {
        const auto r = RandomStream::derive(808, {t});
        const std::size_t n = 6 + t % 7;
        auto g = sample_er({n, 0.15 + 0.7 * RandomStream(r).uniform(), 0.0, 0}, r.split("gen"));
        auto ex = exhaustive_estimate(g);

        std::vector<std::pair<std::uint64_t, double>> all;
        double best = INFINITY;
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
            const int k = std::popcount(mask);
            if (2 * std::size_t(k) < n) continue;
            std::vector<int> idx;
            for (std::size_t i = 0; i < n; ++i)
                if (mask >> i & 1) idx.push_back(int(i));
            double s = 0;
            for (int i : idx)
                for (int j : idx) s += g.has_edge(i, j);
            Eigen::MatrixXd m(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) m(i, j) = g.has_edge(idx[i], idx[j]) - s / double(k * k);
            const double v = svd_norm(m);
            all.emplace_back(mask, v);
            best = std::min(best, v);
        }
        std::uint64_t pick = 0;
        int size = -1;
        for (auto [mask, v] : all) {
            if (v > best + 1e-9 * std::max(1.0, best)) continue;
            const int k = std::popcount(mask);
            if (k > size || (k == size && mask < pick)) pick = mask, size = k;
        }
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s += (pick >> i & 1) && (pick >> j & 1) && g.has_edge(i, j);
        agree += *ex.best_mask == pick && ex.estimate == s / double(size * size);
    }
    return {agree == total, fmt("%zu/%zu graphs: same argmin set and identical estimate", agree, total)};
}

// 9. Coupling exactness, Roos dominance, third-term TV.
Verdict c09() {
    std::size_t points = 0, exact = 0, dominated = 0;
    double worst_residual = 0;
    const std::size_t ns[] = {10, 40, 100, 250, 500};
    const double ps[] = {0.02, 0.1, 0.25, 0.4, 0.5};
    const double gs[] = {0.01, 0.05, 0.1, 0.2, 0.3, 0.35, 0.4, 0.25};
    for (auto n : ns)
        for (auto p1 : ps)
            for (auto g : gs) {
                const double p2 = lower_bound_p2(n, p1, g);
                auto c = construct_coupling(n, p1, p2, 0.15 * g);
                ++points;
                worst_residual = std::max(worst_residual, c.mixture_residual());
                exact += c.mixture_residual() <= 1e-12;
                dominated += c.tv <= roos_tv_bound(n - 1, p1, p2 - p1).best() + 1e-15;
            }
    std::size_t third = 0, third_n = 0;
    double worst_tv = 0;
    for (std::size_t n : {50, 100, 300})
        for (double p : {0.05, 0.25, 0.5}) {
            const std::size_t m = (n - 1) * (n - 1);
            const double tv = tv_distance(binomial_pmf(m, p), binomial_pmf(m, p + 0.1 * std::sqrt(p) / double(n)));
            worst_tv = std::max(worst_tv, tv);
            third += tv < 0.2;
            ++third_n;
        }
    return {points == 200 && exact == points && dominated == points && third == third_n,
            fmt("grid points=%zu, mixture residual max=%.3g (limit 1e-12) ok %zu, Roos dominates %zu, "
                "third-term TV max=%.4f (<0.2) ok %zu/%zu",
                points, worst_residual, exact, dominated, worst_tv, third, third_n)};
}

// 10. Indistinguishability demo.
Verdict c10() {
    auto rep = indistinguishability_demo(200, 0.3, 0.2, 10000, 100, RandomStream(1010));
    const auto rej = rep.rejections(0.01);
    return {rej <= 5, fmt("rejections at 0.01: %zu/100 (allowed 5)", rej)};
}

// 11. Concentration audit and the coarse-estimate implication at n=12.
Verdict c11() {
    const RateConstants k;
    std::size_t rows = 0, viol = 0, regular = 0, implied = 0, trials = 0;
    for (double p : {0.25, 0.5}) {
        auto audit = concentration_audit(12, p, {0.0, 0.1, 0.25, 0.5}, 200, RandomStream::derive(1111, {double_bits(p)}));
        for (const auto& r : audit) {
            ++rows;
            viol += !r.holds;
        }
        for (std::uint64_t t = 0; t < 200; ++t) {
            auto g = sample_er({12, p, 0.0, 0}, RandomStream::derive(1112, {double_bits(p), t}));
            ++trials;
            if (!check_regularity(g, NodeSet::all(12), p, 0.0, 0.25, k).holds()) continue;
            ++regular;
            implied += coarse_estimate_worst_ratio(g, p, 0.0, k) <= 1.0;
        }
    }
    const double rate = double(viol) / double(rows);
    return {rate <= 0.05 && implied == regular && regular > 0,
            fmt("concentration violations %zu/%zu (%.4f, limit 0.05); regular graphs %zu/%zu, "
                "coarse-estimate bound held on %zu of them (c=%.1f c1=%.1f)",
                viol, rows, rate, regular, trials, implied, k.c_eta, k.c_kappa)};
}

// 12. Byte-identical CSV across thread counts.
Verdict c12() {
    ExperimentConfig c;
    c.n = {60, 150};
    c.p = {0.05, 0.5, 0.9};
    c.gamma = {0.0, 0.05};
    c.adversary = {"five-set", 1.0};
    c.estimators = {{"mean"}, {"median"}, {"prune-mean"}, {"prune-median"}, {"spectral"}, {"spectral-sym"}};
    c.trials = 3;
    c.master_seed = 1212;
    std::vector<std::string> csv;
    for (unsigned th : {1u, 2u, 3u, 8u}) {
        c.threads = th;
        csv.push_back(to_csv(run_experiment(c)));
    }
    // degree-rewire goes through the directed path
    c.adversary = {"degree-rewire", 1.0};
    c.p = {0.3};
    c.threads = 1;
    const auto d1 = to_csv(run_experiment(c));
    c.threads = 4;
    const auto d4 = to_csv(run_experiment(c));
    const bool same = std::all_of(csv.begin(), csv.end(), [&](const auto& s) { return s == csv[0]; }) && d1 == d4;
    return {same, fmt("threads 1/2/3/8 five-set CSV identical=%s (%zu bytes); degree-rewire 1 vs 4 identical=%s",
                      std::all_of(csv.begin(), csv.end(), [&](const auto& s) { return s == csv[0]; }) ? "yes" : "no",
                      csv[0].size(), d1 == d4 ? "yes" : "no")};
}

const std::vector<std::pair<const char*, std::function<Verdict()>>> kCriteria{
    {"matrix lemmas", c01},
    {"eigenvector mass", c02},
    {"uncorrupted baselines", c03},
    {"coin adversary breaks mean/median", c04},
    {"prune-then gamma^2 scaling", c05},
    {"spectral vs prune-mean separation", c06},
    {"spectral structural guarantees", c07},
    {"exhaustive oracle equivalence", c08},
    {"coupling exactness", c09},
    {"indistinguishability demo", c10},
    {"regularity/concentration audits", c11},
    {"determinism across threads", c12},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    if (only < 0 || only > int(kCriteria.size())) {
        std::fprintf(stderr, "criterion must be in 1..%zu\n", kCriteria.size());
        return 2;
    }
    bool all = true;
    for (std::size_t i = 0; i < kCriteria.size(); ++i) {
        if (only && int(i + 1) != only) continue;
        Verdict v;
        try {
            v = kCriteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s c%02zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, kCriteria[i].first, v.detail.c_str());
        std::fflush(stdout);
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
