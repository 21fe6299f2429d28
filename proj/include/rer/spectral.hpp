#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "rer/graph.hpp"
#include "rer/random.hpp"

namespace rer {

inline constexpr std::size_t kExactSolverCap = 512;

/// M = (A - shift) restricted to S x S, zero elsewhere.
///
/// matvec is y = A_{SxS} x - shift * (sum_{i in S} x_i) 1_S. The 0/1 part is
/// evaluated with one 256-entry table of partial sums per byte of columns, so a
/// product costs about |S| * n / 8 table lookups.
class CenteredOperator {
public:
    CenteredOperator(const AdjacencyMatrix& a, NodeSet s, double shift);
    /// Shift set to p_S.
    static CenteredOperator with_density(const AdjacencyMatrix& a, NodeSet s);

    std::size_t n() const noexcept { return a_->n(); }
    const AdjacencyMatrix& graph() const noexcept { return *a_; }
    const NodeSet& set() const noexcept { return s_; }
    double shift() const noexcept { return shift_; }

    /// Reusable table storage; one per thread.
    struct Scratch {
        std::vector<double> table;
    };

    void apply(std::span<const double> x, std::span<double> y, Scratch& scratch) const;
    void apply(std::span<const double> x, std::span<double> y) const {
        Scratch s;
        apply(x, y, s);
    }

    /// Dense |S| x |S| matrix in ascending member order.
    Eigen::MatrixXd dense() const;

private:
    const AdjacencyMatrix* a_;
    NodeSet s_;
    double shift_;
};

struct EigenEstimate {
    double value = 0.0;          // signed Rayleigh quotient v^T M v
    std::vector<double> vector;  // unit, supported on S, length n
    double quality = 1.0;        // 1 - residual/|value|: lower-bound proxy for |v^T M v| / ||M||
    bool converged = true;
    std::size_t matvecs = 0;
};

struct EigenOptions {
    int restarts = 8;
    /// Optional start vector (length n); restart 0 uses it plus a random perturbation.
    const std::vector<double>* warm_start = nullptr;
    double perturbation = 0.01;
    /// 0 selects 50 * log2(n) / tol per restart.
    std::size_t max_matvecs = 0;
    std::size_t max_basis = 64;
    /// Lanczos steps before the stopping tests apply.
    std::size_t min_steps = 5;
};

/// max |eigenvalue| of a dense symmetric matrix. Throws ParameterError when the
/// matrix is larger than `cap` or not symmetric.
double spectral_norm_exact(const Eigen::MatrixXd& m, std::size_t cap = kExactSolverCap);

/// Eigenpair with the largest |eigenvalue|.
std::pair<double, Eigen::VectorXd> top_eigenpair_exact(const Eigen::MatrixXd& m, std::size_t cap = kExactSolverCap);

/// Unit v with |v^T M v| >= (1 - tol) ||M||, via Lanczos with full
/// reorthogonalisation and random restarts. Never throws on non-convergence:
/// the best iterate comes back with converged = false.
EigenEstimate top_eigvec_approx(const CenteredOperator& op, double tol, RandomStream rng, const EigenOptions& opts = {});

/// ||(A - p_S)_{SxS}||: exact up to the solver cap, Lanczos with tol 0.01 above it.
double spectral_norm_of_centered(const AdjacencyMatrix& a, const NodeSet& s, std::size_t exact_cap = kExactSolverCap);

}  // namespace rer
