#include "rer/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "rer/adversary.hpp"
#include "rer/error.hpp"
#include "rer/lowerbound.hpp"
#include "rer/spectral.hpp"
#include "rer/stats.hpp"

namespace rer {

namespace {

const std::vector<std::string> kAdversaries{"none", "fill", "empty", "coin", "five-set", "degree-rewire"};
const std::vector<std::string> kEstimators{"mean",     "median",       "prune-mean", "prune-median",
                                           "spectral", "spectral-sym", "exhaustive"};

bool known(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

std::string EstimatorSpec::label() const {
    std::string s = id;
    std::string extra;
    auto add = [&](const std::string& kv) { extra += (extra.empty() ? "" : ",") + kv; };
    if ((id == "prune-mean" || id == "prune-median") && c != 1.0) add("c=" + short_num(c));
    if (id == "spectral" || id == "spectral-sym") {
        if (alpha1 > 0.0) add("alpha1=" + short_num(alpha1));
        if (repeats > 0) add("repeats=" + std::to_string(repeats));
        if (eig_tol != 0.01) add("tol=" + short_num(eig_tol));
    }
    return extra.empty() ? s : s + ":" + extra;
}

void ExperimentConfig::validate() const {
    if (n.empty() || p.empty() || gamma.empty()) throw ParameterError("grid: n, p and gamma need at least one value");
    for (auto v : n)
        if (v < 1) throw ParameterError("grid: n must be positive");
    for (auto v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("grid: p must lie in [0,1]");
    for (auto v : gamma)
        if (!(v >= 0.0 && v < 0.5)) throw ParameterError("grid: gamma must lie in [0, 1/2)");
    if (trials < 1) throw ParameterError("trials must be at least 1");
    if (!known(kAdversaries, adversary.id)) throw ParameterError("unknown adversary '" + adversary.id + "'");
    if (estimators.empty()) throw ParameterError("at least one estimator is required");
    std::vector<std::string> labels;
    for (const auto& e : estimators) {
        if (!known(kEstimators, e.id)) throw ParameterError("unknown estimator '" + e.id + "'");
        if (!(e.c > 0.0)) throw ParameterError("estimator " + e.id + ": c must be positive");
        if (!(e.eig_tol > 0.0 && e.eig_tol <= 0.01)) throw ParameterError("estimator " + e.id + ": eig_tol must lie in (0, 0.01]");
        labels.push_back(e.label());
    }
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
        throw ParameterError("duplicate estimator entries");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        auto list = [&](const char* key, auto& out) {
            if (!j.contains(key)) return;
            const auto& v = j.at(key);
            if (v.is_array()) v.get_to(out);
            else out = {v.get<typename std::decay_t<decltype(out)>::value_type>()};
        };
        list("n", c.n);
        list("p", c.p);
        list("gamma", c.gamma);
        if (j.contains("adversary")) {
            const auto& a = j.at("adversary");
            if (a.is_string()) c.adversary.id = a.get<std::string>();
            else {
                c.adversary.id = a.at("id").get<std::string>();
                c.adversary.c = a.value("c", 1.0);
            }
        }
        if (j.contains("estimators"))
            for (const auto& e : j.at("estimators")) {
                EstimatorSpec s;
                if (e.is_string()) s.id = e.get<std::string>();
                else {
                    s.id = e.at("id").get<std::string>();
                    s.c = e.value("c", 1.0);
                    s.alpha1 = e.value("alpha1", 0.0);
                    s.repeats = e.value("repeats", 0);
                    s.eig_tol = e.value("eig_tol", 0.01);
                }
                c.estimators.push_back(s);
            }
        c.trials = j.value("trials", std::size_t{1});
        c.master_seed = j.value("seed", std::uint64_t{0});
        c.threads = j.value("threads", 1u);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("config: ") + e.what());
    }
    return c;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["n"] = cfg.n;
    j["p"] = cfg.p;
    j["gamma"] = cfg.gamma;
    j["adversary"] = {{"id", cfg.adversary.id}, {"c", cfg.adversary.c}};
    j["estimators"] = nlohmann::json::array();
    for (const auto& e : cfg.estimators)
        j["estimators"].push_back(
            {{"id", e.id}, {"c", e.c}, {"alpha1", e.alpha1}, {"repeats", e.repeats}, {"eig_tol", e.eig_tol}});
    j["trials"] = cfg.trials;
    j["seed"] = cfg.master_seed;
    j["threads"] = cfg.threads;
    return j;
}

std::size_t ExperimentResult::error_rows() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.ok; }));
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg) {
    std::vector<GridPoint> g;
    for (auto n : cfg.n)
        for (auto p : cfg.p)
            for (auto gm : cfg.gamma) g.push_back({n, p, gm});
    return g;
}

double spectral_alpha1(double gamma, std::size_t n) {
    const double lo = 1.0 / static_cast<double>(std::max<std::size_t>(n, 1));
    return std::clamp(gamma, std::min(lo, 1.0 / 60.0), 1.0 / 60.0);
}

SpectralConfig spectral_config(const EstimatorSpec& spec, double gamma, std::size_t n) {
    SpectralConfig sc;
    sc.alpha1 = spec.alpha1 > 0.0 ? spec.alpha1 : spectral_alpha1(gamma, n);
    sc.repeats = spec.repeats;
    sc.eig_tol = spec.eig_tol;
    return sc;
}

EstimatorReport estimate_with(const EstimatorSpec& spec, const AdjacencyMatrix& a, double gamma,
                              const RandomStream& rng) {
    if (spec.id == "mean") return mean_estimator(a);
    if (spec.id == "median") return median_estimator(a);
    if (spec.id == "prune-mean") return prune_then(a, gamma, spec.c, InnerEstimator::mean);
    if (spec.id == "prune-median") return prune_then(a, gamma, spec.c, InnerEstimator::median);
    if (spec.id == "spectral") return robust_estimate(a, spectral_config(spec, gamma, a.n()), rng);
    if (spec.id == "spectral-sym") return robust_estimate_symmetric(a, spectral_config(spec, gamma, a.n()), rng);
    if (spec.id == "exhaustive") return exhaustive_estimate(a);
    throw ParameterError("unknown estimator '" + spec.id + "'");
}

nlohmann::json report_to_json(const EstimatorReport& r) {
    nlohmann::json j{{"method", r.method}, {"estimate", r.estimate}, {"raw", r.raw}};
    if (r.spectral) {
        const auto& st = *r.spectral;
        j["spectral"] = {{"repeats", st.runs.size()},
                         {"best_run", st.best_run},
                         {"best_index", st.best_index},
                         {"best_norm", st.best_norm},
                         {"s_star", st.s_star.members()},
                         {"unconverged", st.unconverged},
                         {"matvecs", st.matvecs}};
    }
    if (r.trim) {
        j["trim"] = {{"s_star_size", r.trim->s_star.size()},
                     {"s_f", r.trim->s_f.members()},
                     {"p_s_star", r.trim->p_s_star},
                     {"removed", r.trim->removed},
                     {"removed_scores", r.trim->removed_scores}};
    }
    if (!r.pruned.empty()) j["pruned"] = r.pruned;
    if (r.p_star) j["p_star"] = *r.p_star;
    if (r.q_star) j["q_star"] = *r.q_star;
    if (!r.stages.empty()) {
        j["stages"] = nlohmann::json::array();
        for (const auto& s : r.stages) j["stages"].push_back(report_to_json(s));
    }
    if (r.best_mask) j["best_mask"] = *r.best_mask;
    if (r.best_norm) j["best_norm"] = *r.best_norm;
    return j;
}

namespace {

RandomStream stage_stream(std::uint64_t seed, const GridPoint& g, std::size_t trial, std::string_view tag,
                          std::uint64_t extra = 0) {
    return RandomStream::derive(seed, {g.n, double_bits(g.p), double_bits(g.gamma), trial, hash_tag(tag), extra});
}

std::string check_trace(const SpectralTrace& st, const TrimTrace& tt, std::size_t n, double alpha1) {
    std::vector<std::string> bad;
    const std::size_t t = std::min(floor_count(9.0 * alpha1 * double(n)), n - 1);
    if (st.s_star.size() + t < n) bad.push_back("s_star_size");
    if (!tt.s_f.subset_of(tt.s_star)) bad.push_back("s_f_subset");
    if (tt.s_star.size() - tt.s_f.size() != floor_count(3.0 * alpha1 * double(n))) bad.push_back("trim_count");
    // argmin: first strict minimum over (run, index) in order
    double best = INFINITY;
    std::size_t br = 0, bi = 0;
    for (std::size_t r = 0; r < st.runs.size(); ++r)
        for (std::size_t i = 0; i < st.runs[r].size(); ++i)
            if (st.runs[r][i].norm < best) best = st.runs[r][i].norm, br = r, bi = i;
    if (br != st.best_run || bi != st.best_index || best != st.best_norm ||
        st.runs[br][bi].size != st.s_star.size())
        bad.push_back("argmin");
    if (bad.empty()) return "ok";
    std::string s = "fail:";
    for (std::size_t i = 0; i < bad.size(); ++i) s += (i ? "+" : "") + bad[i];
    return s;
}

std::string spectral_digest(const EstimatorReport& r) {
    std::ostringstream os;
    os << "s_star=" << r.trim->s_star.size() << ";s_f=" << r.trim->s_f.size()
       << ";p_s_star=" << short_num(r.trim->p_s_star) << ";best_norm=" << short_num(r.spectral->best_norm)
       << ";repeats=" << r.spectral->runs.size() << ";unconverged=" << r.spectral->unconverged
       << ";matvecs=" << r.spectral->matvecs;
    return os.str();
}

struct EstimatorOutcome {
    double estimate = 0.0;
    std::string checks = "na";
    std::string digest;
};

EstimatorOutcome run_estimator(const EstimatorSpec& spec, const AdjacencyMatrix& a, const GridPoint& g,
                               const RandomStream& rng) {
    EstimatorOutcome o;
    const auto r = estimate_with(spec, a, g.gamma, rng);
    o.estimate = r.estimate;
    if (spec.id == "prune-mean" || spec.id == "prune-median") {
        o.digest = "pruned=" + std::to_string(r.pruned.size());
    } else if (spec.id == "spectral") {
        o.checks = check_trace(*r.spectral, *r.trim, a.n(), spectral_config(spec, g.gamma, a.n()).alpha1);
        o.digest = spectral_digest(r);
    } else if (spec.id == "spectral-sym") {
        const double alpha1 = spectral_config(spec, g.gamma, a.n()).alpha1;
        o.checks = "ok";
        std::string d = "p_star=" + short_num(*r.p_star);
        if (r.q_star) d += ";q_star=" + short_num(*r.q_star);
        for (std::size_t s = 0; s < r.stages.size(); ++s) {
            const auto& st = r.stages[s];
            const auto c = check_trace(*st.spectral, *st.trim, a.n(), alpha1);
            if (c != "ok") o.checks = (s ? "q:" : "p:") + c;
            d += std::string(s ? ";q." : ";p.") + spectral_digest(st);
        }
        o.digest = d;
    } else if (spec.id == "exhaustive") {
        o.digest = "mask=" + std::to_string(*r.best_mask) + ";best_norm=" + short_num(*r.best_norm);
    }
    return o;
}

struct Corrupted {
    AdjacencyMatrix graph;
    CorruptionRecord record;
};

Corrupted generate(const ExperimentConfig& cfg, const GridPoint& g, std::size_t trial) {
    const GraphParams gp{g.n, g.p, g.gamma, cfg.master_seed};
    gp.validate();
    const auto gen = stage_stream(cfg.master_seed, g, trial, "gen");
    const auto adv = stage_stream(cfg.master_seed, g, trial, "adv");
    const auto& id = cfg.adversary.id;
    if (id == "degree-rewire") {
        const auto dg = sample_directed_er(gp, gen);
        const auto coupling = construct_coupling(g.n, g.p, lower_bound_p2(g.n, g.p, g.gamma), 0.15 * g.gamma);
        auto out = degree_rewiring_adversary(dg, g.gamma, coupling.dist1.mass, adv);
        return {directed_to_undirected(out.graph), out.record};
    }
    auto a = sample_er(gp, gen);
    if (id == "none") {
        CorruptionRecord rec;
        rec.corrupted = NodeSet::none(g.n);
        rec.strategy = "none";
        rec.gamma_requested = g.gamma;
        return {std::move(a), rec};
    }
    UndirectedOutcome out;
    if (id == "fill") out = fill_or_empty_adversary(a, g.gamma, FillMode::fill, adv);
    else if (id == "empty") out = fill_or_empty_adversary(a, g.gamma, FillMode::empty, adv);
    else if (id == "coin") out = fill_or_empty_adversary(a, g.gamma, FillMode::coin, adv);
    else out = five_set_adversary(a, g.gamma, cfg.adversary.c, adv);
    return {std::move(out.graph), out.record};
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch == '\n' ? ' ' : ch;
    }
    return q + "\"";
}

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) body(i);
    };
    if (workers == 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto grid = expand_grid(cfg);
    const std::size_t tasks = grid.size() * cfg.trials;
    std::vector<std::vector<TrialResult>> slots(tasks);

    parallel_for(tasks, cfg.threads, [&](std::size_t task) {
        const auto& g = grid[task / cfg.trials];
        const std::size_t trial = task % cfg.trials;
        auto& out = slots[task];
        TrialResult base;
        base.point = g;
        base.trial = trial;
        base.adversary = cfg.adversary.id;

        Corrupted cg;
        try {
            cg = generate(cfg, g, trial);
        } catch (const std::exception& e) {
            for (const auto& spec : cfg.estimators) {
                TrialResult r = base;
                r.estimator = spec.label();
                r.ok = false;
                r.checks = "na";
                r.digest = std::string("generation failed: ") + e.what();
                out.push_back(std::move(r));
            }
            return;
        }
        base.corrupted = cg.record.corrupted.size();
        base.over_budget = cg.record.over_budget;
        for (const auto& spec : cfg.estimators) {
            TrialResult r = base;
            r.estimator = spec.label();
            const auto t0 = std::chrono::steady_clock::now();
            try {
                auto o = run_estimator(spec, cg.graph, g,
                                       stage_stream(cfg.master_seed, g, trial, "est", hash_tag(r.estimator)));
                r.estimate = o.estimate;
                r.abs_error = std::abs(o.estimate - g.p);
                r.checks = o.checks;
                r.digest = std::move(o.digest);
            } catch (const Error& e) {
                r.ok = false;
                r.digest = std::string(to_string(e.kind())) + ": " + e.what();
            }
            r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            out.push_back(std::move(r));
        }
    });

    ExperimentResult res;
    for (auto& s : slots)
        for (auto& r : s) res.rows.push_back(std::move(r));
    return res;
}

std::string to_csv(const ExperimentResult& r) {
    std::string s = "# rer-csv v1\n";
    s += "n,p,gamma,trial,adversary,corrupted,over_budget,estimator,status,estimate,abs_error,checks,digest\n";
    for (const auto& x : r.rows) {
        s += std::to_string(x.point.n) + "," + num(x.point.p) + "," + num(x.point.gamma) + "," +
             std::to_string(x.trial) + "," + x.adversary + "," + std::to_string(x.corrupted) + "," +
             (x.over_budget ? "1" : "0") + "," + csv_cell(x.estimator) + "," + (x.ok ? "ok" : "error") + "," +
             (x.ok ? num(x.estimate) : "nan") + "," + (x.ok ? num(x.abs_error) : "nan") + "," + x.checks + "," +
             csv_cell(x.digest) + "\n";
    }
    return s;
}

std::string timings_csv(const ExperimentResult& r) {
    std::string s = "n,p,gamma,trial,estimator,wall_ms\n";
    for (const auto& x : r.rows)
        s += std::to_string(x.point.n) + "," + num(x.point.p) + "," + num(x.point.gamma) + "," +
             std::to_string(x.trial) + "," + csv_cell(x.estimator) + "," + short_num(x.wall_ms) + "\n";
    return s;
}

double theorem_band(std::size_t n, double p, double gamma, double c) {
    const double dn = static_cast<double>(n);
    const double v = p * (1.0 - p);
    const double mid = gamma > 0.0 ? gamma * std::sqrt(v * std::log(1.0 / gamma)) / std::sqrt(dn) : 0.0;
    return c * (std::sqrt(v * std::log(dn)) / dn + mid + gamma * std::log(dn) / dn);
}

std::vector<SummaryRow> summarize(const ExperimentResult& r, double band_c, std::vector<std::string>* warnings) {
    struct Group {
        SummaryRow row;
        std::vector<double> errs;
    };
    std::vector<Group> groups;
    std::map<std::tuple<std::size_t, std::uint64_t, std::uint64_t, std::string>, std::size_t> index;
    for (const auto& x : r.rows) {
        const auto key = std::make_tuple(x.point.n, double_bits(x.point.p), double_bits(x.point.gamma), x.estimator);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, groups.size()).first;
            groups.push_back({});
            groups.back().row.point = x.point;
            groups.back().row.estimator = x.estimator;
        }
        auto& g = groups[it->second];
        if (x.ok) g.errs.push_back(x.abs_error);
        else ++g.row.errors;
    }
    std::vector<SummaryRow> out;
    for (auto& g : groups) {
        if (g.errs.empty()) {
            if (warnings)
                warnings->push_back("no successful rows for n=" + std::to_string(g.row.point.n) + " p=" +
                                    short_num(g.row.point.p) + " gamma=" + short_num(g.row.point.gamma) + " " +
                                    g.row.estimator + "; group omitted");
            continue;
        }
        auto& s = g.row;
        s.count = g.errs.size();
        s.median = quantile_lower(g.errs, 0.5);
        s.p95 = quantile_lower(g.errs, 0.95);
        double sum = 0.0;
        std::size_t in_band = 0;
        const double band = theorem_band(s.point.n, s.point.p, s.point.gamma, band_c);
        for (double e : g.errs) {
            sum += e;
            in_band += e <= band;
        }
        s.mean = sum / double(s.count);
        s.band_rate = double(in_band) / double(s.count);
        out.push_back(s);
    }
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string s = "n,p,gamma,estimator,count,errors,median,mean,p95,band_rate\n";
    for (const auto& x : rows)
        s += std::to_string(x.point.n) + "," + num(x.point.p) + "," + num(x.point.gamma) + "," + csv_cell(x.estimator) +
             "," + std::to_string(x.count) + "," + std::to_string(x.errors) + "," + num(x.median) + "," + num(x.mean) +
             "," + num(x.p95) + "," + num(x.band_rate) + "\n";
    return s;
}

nlohmann::json summary_json(const std::vector<SummaryRow>& rows) {
    auto j = nlohmann::json::array();
    for (const auto& x : rows)
        j.push_back({{"n", x.point.n},
                     {"p", x.point.p},
                     {"gamma", x.point.gamma},
                     {"estimator", x.estimator},
                     {"count", x.count},
                     {"errors", x.errors},
                     {"median", x.median},
                     {"mean", x.mean},
                     {"p95", x.p95},
                     {"band_rate", x.band_rate}});
    return j;
}

namespace {

// Smallest multiple of step that is >= x (and >= step).
double grid_ceil(double x, double step) {
    const double k = std::max(1.0, std::ceil(x / step - 1e-12));
    return k * step;
}

}  // namespace

CalibrationResult calibrate_constants(const CalibrationConfig& cfg) {
    if (cfg.n.empty() || cfg.p.empty() || cfg.trials < 1 || cfg.alpha2.empty())
        throw ParameterError("calibration grid is empty");
    if (!(cfg.step > 0.0) || !(cfg.target > 0.0 && cfg.target <= 1.0)) throw ParameterError("bad step or target");
    for (auto n : cfg.n)
        if (n < 2) throw ParameterError("calibration needs n >= 2");
    for (auto a : cfg.alpha2)
        if (!(a > 0.0 && a <= 0.5)) throw ParameterError("alpha2 values must lie in (0, 1/2]");

    struct Cell {
        std::size_t n;
        double p;
        std::vector<double> need_c, need_c1;
    };
    std::vector<Cell> cells;
    for (auto n : cfg.n)
        for (auto p : cfg.p) cells.push_back({n, p, std::vector<double>(cfg.trials), std::vector<double>(cfg.trials)});

    const RateConstants unit{1.0, 1.0};
    RegularityOptions ro;
    ro.sampled_pairs = cfg.sampled_pairs;
    const std::size_t tasks = cells.size() * cfg.trials;
    parallel_for(tasks, cfg.threads, [&](std::size_t task) {
        auto& cell = cells[task / cfg.trials];
        const std::size_t t = task % cfg.trials;
        const auto rng = RandomStream::derive(cfg.seed, {cell.n, double_bits(cell.p), t, hash_tag("calibrate")});
        const auto a = sample_er({cell.n, cell.p, 0.0, cfg.seed}, rng.split("gen"));
        const auto f = NodeSet::all(cell.n);
        const double dn = static_cast<double>(cell.n);
        const double norm = centered_norm_at(a, f, cell.p);
        cell.need_c[t] = norm / (dn * eta(cell.p, cell.n, unit));
        double worst = 0.0;
        for (std::size_t i = 0; i < cfg.alpha2.size(); ++i) {
            bool sampled = false;
            const auto r = max_centered_block_sum(a, f, cell.p, cfg.alpha2[i], rng.split(i), ro, sampled);
            worst = std::max(worst, r.lhs / (dn * dn * kappa(cfg.alpha2[i], cell.p, cell.n, unit)));
        }
        cell.need_c1[t] = worst;
    });

    auto rate = [&](const Cell& c, double ce, double ck) {
        std::size_t ok = 0;
        for (std::size_t t = 0; t < cfg.trials; ++t) ok += c.need_c[t] <= ce && c.need_c1[t] <= ck;
        return double(ok) / double(cfg.trials);
    };
    // Per-condition minimum, then raise one constant at a time until the joint rate is met everywhere.
    const auto need_index = static_cast<std::size_t>(std::ceil(cfg.target * double(cfg.trials) - 1e-9));
    const std::size_t idx = std::max<std::size_t>(need_index, 1) - 1;
    double ce = cfg.step, ck = cfg.step;
    nlohmann::json cells_json = nlohmann::json::array();
    for (const auto& c : cells) {
        auto a = c.need_c, b = c.need_c1;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        ce = std::max(ce, grid_ceil(a[idx], cfg.step));
        ck = std::max(ck, grid_ceil(b[idx], cfg.step));
        cells_json.push_back({{"n", c.n},
                              {"p", c.p},
                              {"need_c_eta_quantile", a[idx]},
                              {"need_c_eta_max", a.back()},
                              {"need_c_kappa_quantile", b[idx]},
                              {"need_c_kappa_max", b.back()}});
    }
    auto worst_rate = [&](double x, double y) {
        double w = 1.0;
        for (const auto& c : cells) w = std::min(w, rate(c, x, y));
        return w;
    };
    while (worst_rate(ce, ck) < cfg.target) {
        if (ce > cfg.max_constant || ck > cfg.max_constant)
            throw InfeasibleError("no constant up to " + num(cfg.max_constant) + " reaches the target rate " +
                                  num(cfg.target) + "; choose a coarser target");
        if (worst_rate(ce + cfg.step, ck) >= worst_rate(ce, ck + cfg.step)) ce += cfg.step;
        else ck += cfg.step;
    }
    if (ce > cfg.max_constant || ck > cfg.max_constant)
        throw InfeasibleError("calibrated constants exceed " + num(cfg.max_constant) + "; choose a coarser target");

    for (std::size_t i = 0; i < cells.size(); ++i) cells_json[i]["joint_rate"] = rate(cells[i], ce, ck);

    CalibrationResult out;
    out.constants = {ce, ck};
    out.artifact = {{"format", "rer-calibration v1"},
                    {"seed", cfg.seed},
                    {"n", cfg.n},
                    {"p", cfg.p},
                    {"trials", cfg.trials},
                    {"alpha2", cfg.alpha2},
                    {"step", cfg.step},
                    {"target", cfg.target},
                    {"sampled_pairs", cfg.sampled_pairs},
                    {"c_eta", ce},
                    {"c_kappa", ck},
                    {"cells", cells_json}};
    return out;
}

}  // namespace rer
