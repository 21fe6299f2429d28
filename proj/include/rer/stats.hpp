#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rer {

/// Lower-interpolation quantile: sorted[floor(q (N - 1))]. Throws on empty input.
double quantile_lower(std::span<const double> values, double q);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::size_t bins = 0;  // after merging
};

/// Goodness of fit of integer observations against a pmf on {0..size-1}.
/// Adjacent bins are merged left to right until each expected count is >= 5.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts, std::span<const double> pmf);

/// Two-sample homogeneity test of two count histograms over the same bins.
/// Adjacent bins are merged until both expected counts are >= 5.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// Pr[Bin(n,p) >= k].
double binomial_upper_tail(std::uint64_t n, double p, std::uint64_t k);

/// Least-squares slope of log y on log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace rer
