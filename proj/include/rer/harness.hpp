#pragma once

#include <cstddef>
#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "rer/estimators.hpp"
#include "rer/regularity.hpp"

namespace rer {

struct AdversarySpec {
    /// none | fill | empty | coin | five-set | degree-rewire
    std::string id = "none";
    /// five-set: the prune constant c the partition is built against.
    double c = 1.0;
};

struct EstimatorSpec {
    /// mean | median | prune-mean | prune-median | spectral | spectral-sym | exhaustive
    std::string id;
    double c = 1.0;        // prune-*: prune constant
    double alpha1 = 0.0;   // spectral*: 0 maps gamma to clamp(gamma, 1/n, 1/60)
    int repeats = 0;       // spectral*: 0 picks the default
    double eig_tol = 0.01;
    /// Stable name used in output and stream derivation, e.g. "prune-mean" or "prune-mean:c=2".
    std::string label() const;
};

struct ExperimentConfig {
    std::vector<std::size_t> n;
    std::vector<double> p;
    std::vector<double> gamma;
    AdversarySpec adversary;
    std::vector<EstimatorSpec> estimators;
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    unsigned threads = 1;

    /// Throws ParameterError naming the first offending field.
    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct GridPoint {
    std::size_t n = 0;
    double p = 0.0;
    double gamma = 0.0;
};

struct TrialResult {
    GridPoint point;
    std::size_t trial = 0;
    std::string adversary;
    std::size_t corrupted = 0;
    bool over_budget = false;
    std::string estimator;
    bool ok = true;
    double estimate = 0.0;
    double abs_error = 0.0;
    double wall_ms = 0.0;
    /// Structural checks of the spectral stages: "ok", "na" or "fail:<what>".
    std::string checks = "na";
    /// Deterministic key=value;... summary of the estimator's trace, or the error message.
    std::string digest;
};

struct ExperimentResult {
    std::vector<TrialResult> rows;  // grid order, then trial, then estimator order
    std::size_t error_rows() const;
};

/// Grid points in n-major, then p, then gamma order.
std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg);

/// alpha1 used by the spectral estimators for a corruption level gamma.
double spectral_alpha1(double gamma, std::size_t n);

SpectralConfig spectral_config(const EstimatorSpec& spec, double gamma, std::size_t n);

/// Runs one registered estimator.
EstimatorReport estimate_with(const EstimatorSpec& spec, const AdjacencyMatrix& a, double gamma,
                              const RandomStream& rng);
nlohmann::json report_to_json(const EstimatorReport& r);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Frozen CSV ("# rer-csv v1"); wall times are excluded so runs are byte-identical.
std::string to_csv(const ExperimentResult& r);
/// Wall-time side table keyed like the main CSV.
std::string timings_csv(const ExperimentResult& r);

/// |p_hat - p| <= C (sqrt(p(1-p) ln n)/n + gamma sqrt(p(1-p) ln(1/gamma))/sqrt(n) + gamma ln n / n).
double theorem_band(std::size_t n, double p, double gamma, double c);

struct SummaryRow {
    GridPoint point;
    std::string estimator;
    std::size_t count = 0;
    std::size_t errors = 0;
    double median = 0.0, mean = 0.0, p95 = 0.0;
    double band_rate = 0.0;
};

/// Per (grid point, estimator): quantiles with the lower-interpolation rule.
/// Groups without a successful row are omitted and named in `warnings`.
std::vector<SummaryRow> summarize(const ExperimentResult& r, double band_c, std::vector<std::string>* warnings = nullptr);
std::string summary_csv(const std::vector<SummaryRow>& rows);
nlohmann::json summary_json(const std::vector<SummaryRow>& rows);

struct CalibrationConfig {
    std::vector<std::size_t> n{100, 400, 1600};
    std::vector<double> p{0.05, 0.5, 0.95};
    std::size_t trials = 500;
    std::vector<double> alpha2{0.02, 0.05, 0.1, 0.2, 0.5};
    double step = 0.5;
    double target = 0.99;
    double max_constant = 1000.0;
    std::uint64_t seed = 20240601;
    unsigned threads = 1;
    /// Random restarts per condition-3 search on top of the deterministic starts.
    std::size_t sampled_pairs = 8;
};

struct CalibrationResult {
    RateConstants constants;
    nlohmann::json artifact;
};

/// Smallest (c, c1) on the step grid for which conditions 1-3 hold with
/// F = [n] in at least `target` of the uncorrupted trials of every cell.
CalibrationResult calibrate_constants(const CalibrationConfig& cfg);

}  // namespace rer
