#include "rer/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "rer/error.hpp"

namespace rer {

double quantile_lower(std::span<const double> values, double q) {
    if (values.empty()) throw DomainError("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("quantile level must lie in [0,1]");
    std::vector<double> v(values.begin(), values.end());
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

namespace {

double chi_sf(double stat, std::size_t dof) {
    if (dof == 0) return 1.0;
    boost::math::chi_squared_distribution<double> d(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(d, std::max(stat, 0.0)));
}

// Groups [begin, end) of adjacent bins; a group closes once ok(group) holds and
// a trailing group that never satisfies ok joins the previous one.
template <class Ok>
std::vector<std::pair<std::size_t, std::size_t>> merge_bins(std::size_t count, Ok ok) {
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::size_t start = 0;
    for (std::size_t i = 0; i < count; ++i)
        if (ok(start, i + 1)) {
            groups.emplace_back(start, i + 1);
            start = i + 1;
        }
    if (start < count) {
        if (groups.empty()) groups.emplace_back(start, count);
        else groups.back().second = count;
    }
    return groups;
}

}  // namespace

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts, std::span<const double> pmf) {
    if (counts.size() != pmf.size()) throw DomainError("histogram and pmf have different sizes");
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    if (total == 0.0) throw DomainError("empty histogram");
    std::vector<double> cum_e(pmf.size() + 1, 0.0), cum_o(pmf.size() + 1, 0.0);
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        cum_e[i + 1] = cum_e[i] + total * pmf[i];
        cum_o[i + 1] = cum_o[i] + static_cast<double>(counts[i]);
    }
    const auto groups = merge_bins(pmf.size(), [&](std::size_t b, std::size_t e) { return cum_e[e] - cum_e[b] >= 5.0; });
    ChiSquareResult r;
    r.bins = groups.size();
    for (auto [b, e] : groups) {
        const double ex = cum_e[e] - cum_e[b], ob = cum_o[e] - cum_o[b];
        if (ex > 0.0) r.statistic += (ob - ex) * (ob - ex) / ex;
    }
    r.dof = r.bins > 0 ? r.bins - 1 : 0;
    r.p_value = chi_sf(r.statistic, r.dof);
    return r;
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.size() != b.size()) throw DomainError("histograms have different sizes");
    double na = 0.0, nb = 0.0;
    for (auto c : a) na += static_cast<double>(c);
    for (auto c : b) nb += static_cast<double>(c);
    if (na == 0.0 || nb == 0.0) throw DomainError("empty histogram");
    const double n = na + nb;
    std::vector<double> ca(a.size() + 1, 0.0), cb(a.size() + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca[i + 1] = ca[i] + static_cast<double>(a[i]);
        cb[i + 1] = cb[i] + static_cast<double>(b[i]);
    }
    const double small = std::min(na, nb) / n;
    const auto groups = merge_bins(a.size(), [&](std::size_t s, std::size_t e) {
        return (ca[e] - ca[s] + cb[e] - cb[s]) * small >= 5.0;
    });
    ChiSquareResult r;
    r.bins = groups.size();
    for (auto [s, e] : groups) {
        const double oa = ca[e] - ca[s], ob = cb[e] - cb[s], t = oa + ob;
        if (t == 0.0) continue;
        const double ea = t * na / n, eb = t * nb / n;
        r.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    r.dof = r.bins > 0 ? r.bins - 1 : 0;
    r.p_value = chi_sf(r.statistic, r.dof);
    return r;
}

double binomial_upper_tail(std::uint64_t n, double p, std::uint64_t k) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("binomial p must lie in [0,1]");
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    boost::math::binomial_distribution<double> d(static_cast<double>(n), p);
    return boost::math::cdf(boost::math::complement(d, static_cast<double>(k - 1)));
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs at least two paired points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("log-log slope needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= double(x.size());
    my /= double(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw DomainError("log-log slope needs distinct x values");
    return sxy / sxx;
}

}  // namespace rer
