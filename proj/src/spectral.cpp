#include "rer/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "rer/error.hpp"

namespace rer {

CenteredOperator::CenteredOperator(const AdjacencyMatrix& a, NodeSet s, double shift)
    : a_(&a), s_(std::move(s)), shift_(shift) {
    if (s_.universe() != a.n()) throw ParameterError("node set universe does not match graph size");
}

CenteredOperator CenteredOperator::with_density(const AdjacencyMatrix& a, NodeSet s) {
    const double ps = empirical_density(a, s);
    return CenteredOperator(a, std::move(s), ps);
}

void CenteredOperator::apply(std::span<const double> x, std::span<double> y, Scratch& scratch) const {
    const std::size_t n = a_->n();
    const std::size_t groups = a_->stride() * 8;
    scratch.table.resize(groups * 256);
    double* T = scratch.table.data();
    const auto sw = s_.words();

    double sx = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
        double xs[8];
        const unsigned sbyte = static_cast<unsigned>((sw[g >> 3] >> ((g & 7) * 8)) & 0xff);
        for (unsigned k = 0; k < 8; ++k) {
            const std::size_t col = g * 8 + k;
            xs[k] = (col < n && ((sbyte >> k) & 1u)) ? x[col] : 0.0;
            sx += xs[k];
        }
        double* t = T + g * 256;
        t[0] = 0.0;
        for (unsigned b = 1; b < 256; ++b) t[b] = t[b & (b - 1)] + xs[std::countr_zero(b)];
    }

    std::fill(y.begin(), y.end(), 0.0);
    const double off = shift_ * sx;
    s_.for_each([&](std::uint32_t i) {
        // Row bytes in memory order are column groups 0,1,2,... on little-endian.
        const auto* rb = reinterpret_cast<const unsigned char*>(a_->row(i));
        double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
        std::size_t g = 0;
        for (; g + 4 <= groups; g += 4) {
            s0 += T[(g + 0) * 256 + rb[g + 0]];
            s1 += T[(g + 1) * 256 + rb[g + 1]];
            s2 += T[(g + 2) * 256 + rb[g + 2]];
            s3 += T[(g + 3) * 256 + rb[g + 3]];
        }
        for (; g < groups; ++g) s0 += T[g * 256 + rb[g]];
        y[i] = (s0 + s1) + (s2 + s3) - off;
    });
}

Eigen::MatrixXd CenteredOperator::dense() const {
    const auto idx = s_.members();
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd m(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
        for (Eigen::Index c = 0; c < k; ++c) m(r, c) = (a_->has_edge(idx[r], idx[c]) ? 1.0 : 0.0) - shift_;
    return m;
}

namespace {

void check_dense(const Eigen::MatrixXd& m, std::size_t cap) {
    if (m.rows() != m.cols()) throw ParameterError("matrix is not square");
    if (static_cast<std::size_t>(m.rows()) > cap)
        throw ParameterError("matrix of size " + std::to_string(m.rows()) + " exceeds the exact solver cap " +
                             std::to_string(cap) + "; use the iterative solver");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ParameterError("matrix is not symmetric");
}

}  // namespace

double spectral_norm_exact(const Eigen::MatrixXd& m, std::size_t cap) {
    check_dense(m, cap);
    if (m.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

std::pair<double, Eigen::VectorXd> top_eigenpair_exact(const Eigen::MatrixXd& m, std::size_t cap) {
    check_dense(m, cap);
    if (m.rows() == 0) return {0.0, Eigen::VectorXd()};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto& ev = es.eigenvalues();
    const Eigen::Index last = ev.size() - 1;
    const Eigen::Index k = std::abs(ev(0)) > std::abs(ev(last)) ? 0 : last;
    return {ev(k), es.eigenvectors().col(k)};
}

namespace {

struct LanczosOutcome {
    double theta = 0.0;
    std::vector<double> vec;
    double residual = 0.0;
    bool converged = false;
};

double dot_on(const std::vector<std::uint32_t>& idx, const double* a, const double* b) {
    double s = 0.0;
    for (auto i : idx) s += a[i] * b[i];
    return s;
}

// One Lanczos run with explicit restarts from the current Ritz vector.
LanczosOutcome lanczos(const CenteredOperator& op, const std::vector<std::uint32_t>& idx, std::vector<double> start,
                       double tol, std::size_t cap, std::size_t max_basis, std::size_t min_steps_req, std::size_t& matvecs,
                       CenteredOperator::Scratch& scratch) {
    const std::size_t n = op.n();
    const std::size_t dim = idx.size();
    const std::size_t kmax = std::min(max_basis, dim);
    const std::size_t min_steps = std::min<std::size_t>(std::max<std::size_t>(min_steps_req, 2), dim);

    LanczosOutcome out;
    std::vector<std::vector<double>> Q;
    std::vector<double> w(n), alpha, beta;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;

    auto normalize = [&](std::vector<double>& v) {
        const double nv = std::sqrt(dot_on(idx, v.data(), v.data()));
        if (nv == 0.0) return false;
        for (auto i : idx) v[i] /= nv;
        return true;
    };
    if (!normalize(start)) {
        std::fill(start.begin(), start.end(), 0.0);
        start[idx.front()] = 1.0;
    }

    std::size_t used = 0;
    while (true) {
        Q.assign(1, start);
        alpha.clear();
        beta.clear();
        for (std::size_t k = 0;; ++k) {
            op.apply(Q[k], w, scratch);
            ++matvecs;
            ++used;
            const double a = dot_on(idx, Q[k].data(), w.data());
            alpha.push_back(a);
            for (auto i : idx) w[i] -= a * Q[k][i];
            if (k > 0)
                for (auto i : idx) w[i] -= beta[k - 1] * Q[k - 1][i];
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : Q) {
                    const double c = dot_on(idx, q.data(), w.data());
                    for (auto i : idx) w[i] -= c * q[i];
                }
            const double b = std::sqrt(dot_on(idx, w.data(), w.data()));

            const auto m = static_cast<Eigen::Index>(alpha.size());
            Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
            Eigen::VectorXd e = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
                                      : Eigen::VectorXd();
            tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
            const auto& ev = tri.eigenvalues();
            const Eigen::Index top = std::abs(ev(0)) > std::abs(ev(m - 1)) ? 0 : m - 1;
            const double theta = ev(top);
            const double resid = std::abs(b * tri.eigenvectors()(m - 1, top));

            const double mag = std::abs(theta);
            const bool invariant = b <= 1e-13 * std::max(1.0, mag) || alpha.size() == dim;
            const bool done = invariant || (alpha.size() >= min_steps && resid <= 0.1 * tol * mag);
            const bool out_of_budget = used >= cap;

            if (done || out_of_budget || alpha.size() == kmax) {
                std::vector<double> y(n, 0.0);
                for (Eigen::Index j = 0; j < m; ++j) {
                    const double c = tri.eigenvectors()(j, top);
                    for (auto i : idx) y[i] += c * Q[static_cast<std::size_t>(j)][i];
                }
                normalize(y);
                out.theta = theta;
                out.vec = std::move(y);
                out.residual = invariant ? 0.0 : resid;
                out.converged = done;
                if (done || out_of_budget) return out;
                start = out.vec;  // explicit restart
                break;
            }
            Q.emplace_back(n, 0.0);
            for (auto i : idx) Q.back()[i] = w[i] / b;
            beta.push_back(b);
        }
    }
}

}  // namespace

EigenEstimate top_eigvec_approx(const CenteredOperator& op, double tol, RandomStream rng, const EigenOptions& opts) {
    if (!(tol > 0.0 && tol <= 0.01)) throw ParameterError("eigen tolerance must lie in (0, 0.01]");
    if (op.set().empty()) throw DomainError("operator restricted to an empty node set");
    const std::size_t n = op.n();
    const auto idx = op.set().members();
    const std::size_t cap = opts.max_matvecs > 0
                                ? opts.max_matvecs
                                : static_cast<std::size_t>(std::ceil(50.0 * std::max(1.0, std::log2(double(n))) / tol));
    const int restarts = std::max(1, opts.restarts);

    EigenEstimate best;
    bool have = false;
    CenteredOperator::Scratch scratch;
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> start(n, 0.0);
        const bool warm = r == 0 && opts.warm_start && opts.warm_start->size() == n;
        for (auto i : idx) {
            const double u = 2.0 * rng.uniform() - 1.0;
            start[i] = warm ? (*opts.warm_start)[i] + opts.perturbation * u / std::sqrt(double(idx.size())) : u;
        }
        std::size_t mv = 0;
        auto res = lanczos(op, idx, std::move(start), tol, cap, std::max<std::size_t>(opts.max_basis, 8),
                          warm ? opts.min_steps : std::max<std::size_t>(opts.min_steps, 5), mv, scratch);
        best.matvecs += mv;
        if (!have || std::abs(res.theta) > std::abs(best.value)) {
            best.value = res.theta;
            best.vector = std::move(res.vec);
            best.converged = res.converged;
            best.quality = res.theta == 0.0 ? 1.0 : std::max(0.0, 1.0 - res.residual / std::abs(res.theta));
            have = true;
        }
    }
    return best;
}

double spectral_norm_of_centered(const AdjacencyMatrix& a, const NodeSet& s, std::size_t exact_cap) {
    auto op = CenteredOperator::with_density(a, s);
    if (s.size() <= exact_cap) return spectral_norm_exact(op.dense(), exact_cap);
    auto est = top_eigvec_approx(op, 0.01, RandomStream(hash_tag("spectral-norm")));
    return std::abs(est.value);
}

}  // namespace rer
