#include "rer/rer.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <string_view>

#include "rer/adversary.hpp"
#include "rer/error.hpp"
#include "rer/graph.hpp"
#include "rer/harness.hpp"
#include "rer/lowerbound.hpp"
#include "rer/regularity.hpp"

struct rer_graph {
    rer::AnyGraph g;
};

namespace {

thread_local std::string last_error;

// Malformed JSON text is a parse error on the line nlohmann stopped at.
nlohmann::json parse_json(const char* text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const std::string_view sv(text);
        const auto upto = sv.substr(0, std::min<std::size_t>(e.byte, sv.size()));
        const auto line = 1 + static_cast<std::size_t>(std::count(upto.begin(), upto.end(), '\n'));
        throw rer::ParseError(line, std::string(what) + " is not valid JSON: " + e.what());
    }
}

rer_status status_of(rer::ErrorKind k) {
    switch (k) {
        case rer::ErrorKind::parameter: return RER_E_PARAMETER;
        case rer::ErrorKind::domain: return RER_E_DOMAIN;
        case rer::ErrorKind::parse: return RER_E_PARSE;
        case rer::ErrorKind::io: return RER_E_IO;
        case rer::ErrorKind::contract: return RER_E_CONTRACT;
        case rer::ErrorKind::budget: return RER_E_BUDGET;
        case rer::ErrorKind::infeasible: return RER_E_INFEASIBLE;
    }
    return RER_E_INTERNAL;
}

template <class F>
rer_status guard(F&& f) {
    try {
        f();
        return RER_OK;
    } catch (const rer::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return RER_E_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return RER_E_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) throw rer::ParameterError(std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void give(char** slot, const std::string& s) {
    if (slot) *slot = dup(s);
}

const rer::AdjacencyMatrix& undirected(const rer_graph* g) {
    need(g, "graph");
    if (const auto* a = std::get_if<rer::AdjacencyMatrix>(&g->g)) return *a;
    throw rer::DomainError("operation needs an undirected graph");
}

rer::RandomStream stream(std::uint64_t seed, std::string_view tag) {
    return rer::RandomStream::derive(seed, {rer::hash_tag(tag)});
}

}  // namespace

extern "C" {

const char* rer_version(void) { return "1.0.0"; }

const char* rer_last_error(void) { return last_error.c_str(); }

const char* rer_status_name(rer_status s) {
    switch (s) {
        case RER_OK: return "ok";
        case RER_E_PARAMETER: return "parameter";
        case RER_E_DOMAIN: return "domain";
        case RER_E_PARSE: return "parse";
        case RER_E_IO: return "io";
        case RER_E_CONTRACT: return "contract";
        case RER_E_BUDGET: return "budget";
        case RER_E_INFEASIBLE: return "infeasible";
        case RER_E_INTERNAL: return "internal";
    }
    return "unknown";
}

void rer_string_free(char* s) { std::free(s); }

rer_status rer_graph_sample(size_t n, double p, uint64_t seed, rer_graph** out) {
    return guard([&] {
        need(out, "out");
        rer::GraphParams gp{n, p, 0.0, seed};
        gp.validate();
        *out = new rer_graph{rer::sample_er(gp, stream(seed, "gen"))};
    });
}

rer_status rer_graph_sample_directed(size_t n, double p, uint64_t seed, rer_graph** out) {
    return guard([&] {
        need(out, "out");
        rer::GraphParams gp{n, p, 0.0, seed};
        gp.validate();
        *out = new rer_graph{rer::sample_directed_er(gp, stream(seed, "gen"))};
    });
}

rer_status rer_graph_from_edges(size_t n, const uint32_t* edges, size_t m, rer_graph** out) {
    return guard([&] {
        need(out, "out");
        if (m > 0) need(edges, "edges");
        std::vector<std::pair<std::uint32_t, std::uint32_t>> e(m);
        for (size_t k = 0; k < m; ++k) e[k] = {edges[2 * k], edges[2 * k + 1]};
        *out = new rer_graph{rer::AdjacencyMatrix::from_edges(n, e)};
    });
}

rer_status rer_graph_read(const char* path, rer_graph** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new rer_graph{rer::read_any_graph(path)};
    });
}

rer_status rer_graph_write(const rer_graph* g, const char* path, int binary) {
    return guard([&] {
        need(g, "graph");
        need(path, "path");
        const auto fmt = binary ? rer::GraphFormat::binary : rer::GraphFormat::text;
        std::visit([&](const auto& x) { rer::write_graph(x, path, fmt); }, g->g);
    });
}

rer_status rer_graph_format_text(const rer_graph* g, char** text) {
    return guard([&] {
        need(g, "graph");
        need(text, "text");
        *text = dup(std::visit([](const auto& x) { return rer::format_graph_text(x); }, g->g));
    });
}

void rer_graph_free(rer_graph* g) { delete g; }

size_t rer_graph_n(const rer_graph* g) {
    if (!g) return 0;
    return std::visit([](const auto& x) { return x.n(); }, g->g);
}

size_t rer_graph_edge_count(const rer_graph* g) {
    if (!g) return 0;
    return std::visit([](const auto& x) { return x.edge_count(); }, g->g);
}

int rer_graph_has_edge(const rer_graph* g, size_t i, size_t j) {
    if (!g) return 0;
    return std::visit([&](const auto& x) { return i < x.n() && j < x.n() && x.has_edge(i, j) ? 1 : 0; }, g->g);
}

int rer_graph_is_directed(const rer_graph* g) {
    return g && std::holds_alternative<rer::DirectedAdjacencyMatrix>(g->g) ? 1 : 0;
}

rer_status rer_graph_to_undirected(const rer_graph* g, rer_graph** out) {
    return guard([&] {
        need(g, "graph");
        need(out, "out");
        if (const auto* d = std::get_if<rer::DirectedAdjacencyMatrix>(&g->g))
            *out = new rer_graph{rer::directed_to_undirected(*d)};
        else
            *out = new rer_graph{g->g};
    });
}

rer_status rer_corrupt(const rer_graph* g, const char* adversary, double gamma, double c, uint64_t seed,
                       rer_graph** out, size_t* corrupted) {
    return guard([&] {
        need(adversary, "adversary");
        need(out, "out");
        const auto& a = undirected(g);
        const std::string id = adversary;
        const auto rng = stream(seed, "adv");
        rer::UndirectedOutcome r;
        if (id == "fill") r = rer::fill_or_empty_adversary(a, gamma, rer::FillMode::fill, rng);
        else if (id == "empty") r = rer::fill_or_empty_adversary(a, gamma, rer::FillMode::empty, rng);
        else if (id == "coin") r = rer::fill_or_empty_adversary(a, gamma, rer::FillMode::coin, rng);
        else if (id == "five-set") r = rer::five_set_adversary(a, gamma, c, rng);
        else if (id == "degree-rewire")
            throw rer::DomainError("degree-rewire acts on directed graphs; use rer_corrupt_degree_rewire");
        else throw rer::ParameterError("unknown adversary '" + id + "'");
        if (corrupted) *corrupted = r.record.corrupted.size();
        *out = new rer_graph{std::move(r.graph)};
    });
}

rer_status rer_corrupt_degree_rewire(const rer_graph* g, double gamma, double p1, uint64_t seed, rer_graph** out,
                                     size_t* corrupted) {
    return guard([&] {
        need(g, "graph");
        need(out, "out");
        const auto* d = std::get_if<rer::DirectedAdjacencyMatrix>(&g->g);
        if (!d) throw rer::DomainError("degree-rewire needs a directed graph");
        const auto coupling =
            rer::construct_coupling(d->n(), p1, rer::lower_bound_p2(d->n(), p1, gamma), 0.15 * gamma);
        auto r = rer::degree_rewiring_adversary(*d, gamma, coupling.dist1.mass, stream(seed, "adv"));
        if (corrupted) *corrupted = r.record.corrupted.size();
        *out = new rer_graph{std::move(r.graph)};
    });
}

void rer_estimator_options_init(rer_estimator_options* o) {
    if (!o) return;
    o->c = 1.0;
    o->alpha1 = 0.0;
    o->repeats = 0;
    o->eig_tol = 0.01;
}

rer_status rer_estimate(const rer_graph* g, const char* estimator, double gamma, const rer_estimator_options* opts,
                        uint64_t seed, double* estimate, char** report_json) {
    return guard([&] {
        need(estimator, "estimator");
        need(estimate, "estimate");
        const auto& a = undirected(g);
        rer::EstimatorSpec spec;
        spec.id = estimator;
        if (opts) {
            spec.c = opts->c;
            spec.alpha1 = opts->alpha1;
            spec.repeats = opts->repeats;
            spec.eig_tol = opts->eig_tol;
        }
        const auto r = rer::estimate_with(spec, a, gamma, stream(seed, "est"));
        *estimate = r.estimate;
        give(report_json, rer::report_to_json(r).dump(2));
    });
}

rer_status rer_bench(const char* config_json, char** csv, char** timings_csv, char** summary_json, double band_c,
                     size_t* error_rows) {
    return guard([&] {
        need(config_json, "config");
        const auto j = parse_json(config_json, "config");
        const auto cfg = rer::config_from_json(j);
        const auto res = rer::run_experiment(cfg);
        std::vector<std::string> warnings;
        const auto sum = rer::summarize(res, band_c, &warnings);
        give(csv, rer::to_csv(res));
        give(timings_csv, rer::timings_csv(res));
        nlohmann::json sj{{"band_c", band_c}, {"groups", rer::summary_json(sum)}, {"warnings", warnings}};
        give(summary_json, sj.dump(2));
        if (error_rows) *error_rows = res.error_rows();
    });
}

rer_status rer_regularity_audit(size_t n, double p, const double* alphas, size_t alpha_count, size_t trials,
                                uint64_t seed, char** csv) {
    return guard([&] {
        if (alpha_count > 0) need(alphas, "alphas");
        const std::vector<double> grid(alphas, alphas + alpha_count);
        const auto rows = rer::concentration_audit(n, p, grid, trials, stream(seed, "audit"));
        std::ostringstream os;
        os.precision(17);
        os << "n,p,alpha,trial,lhs,bound,holds,sampled\n";
        for (const auto& r : rows)
            os << r.n << ',' << r.p << ',' << r.alpha << ',' << r.trial << ',' << r.lhs << ',' << r.bound << ','
               << (r.holds ? 1 : 0) << ',' << (r.sampled ? 1 : 0) << '\n';
        give(csv, os.str());
    });
}

rer_status rer_lb_demo(size_t n, double p1, double gamma, size_t nodes_per_side, size_t trials, uint64_t seed,
                       char** pmf_csv, char** report_json) {
    return guard([&] {
        const auto rep = rer::indistinguishability_demo(n, p1, gamma, nodes_per_side, trials, stream(seed, "lb-demo"));
        const auto& c = rep.coupling;
        const auto d1 = rer::binomial_pmf(n - 1, c.p1), d2 = rer::binomial_pmf(n - 1, c.p2);
        std::ostringstream os;
        os.precision(17);
        os << "degree,bin_p1,bin_p2,dist1,dist2,mixture1,mixture2,pooled1,pooled2\n";
        for (size_t k = 0; k < n; ++k)
            os << k << ',' << d1.mass[k] << ',' << d2.mass[k] << ',' << c.dist1.mass[k] << ',' << c.dist2.mass[k] << ','
               << (1 - c.epsilon) * d1.mass[k] + c.epsilon * c.dist1.mass[k] << ','
               << (1 - c.epsilon) * d2.mass[k] + c.epsilon * c.dist2.mass[k] << ',' << rep.pooled1[k] << ','
               << rep.pooled2[k] << '\n';
        give(pmf_csv, os.str());
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& r : rep.runs)
            runs.push_back({{"statistic", r.statistic}, {"dof", r.dof}, {"p_value", r.p_value}, {"bins", r.bins}});
        const auto pooled = rer::chi_square_two_sample(rep.pooled1, rep.pooled2);
        nlohmann::json j{{"n", n},
                         {"p1", c.p1},
                         {"p2", c.p2},
                         {"gamma", gamma},
                         {"epsilon", c.epsilon},
                         {"tv", c.tv},
                         {"mixture_residual", c.mixture_residual()},
                         {"nodes_per_side", nodes_per_side},
                         {"trials", trials},
                         {"rejections_at_0.01", rep.rejections(0.01)},
                         {"pooled", {{"statistic", pooled.statistic}, {"dof", pooled.dof}, {"p_value", pooled.p_value}}},
                         {"runs", runs}};
        give(report_json, j.dump(2));
    });
}

rer_status rer_calibrate(const char* config_json, char** artifact_json, double* c_eta, double* c_kappa) {
    return guard([&] {
        rer::CalibrationConfig cfg;
        if (config_json && *config_json) {
            const auto j = parse_json(config_json, "calibration config");
            try {
                if (j.contains("n")) j.at("n").get_to(cfg.n);
                if (j.contains("p")) j.at("p").get_to(cfg.p);
                if (j.contains("alpha2")) j.at("alpha2").get_to(cfg.alpha2);
                cfg.trials = j.value("trials", cfg.trials);
                cfg.step = j.value("step", cfg.step);
                cfg.target = j.value("target", cfg.target);
                cfg.seed = j.value("seed", cfg.seed);
                cfg.threads = j.value("threads", cfg.threads);
                cfg.sampled_pairs = j.value("sampled_pairs", cfg.sampled_pairs);
                cfg.max_constant = j.value("max_constant", cfg.max_constant);
            } catch (const nlohmann::json::exception& e) {
                throw rer::ParameterError(std::string("calibration config: ") + e.what());
            }
        }
        const auto r = rer::calibrate_constants(cfg);
        if (c_eta) *c_eta = r.constants.c_eta;
        if (c_kappa) *c_kappa = r.constants.c_kappa;
        give(artifact_json, r.artifact.dump(2));
    });
}

rer_status rer_binomial_tv(size_t n, double p1, double p2, double* tv) {
    return guard([&] {
        need(tv, "tv");
        *tv = rer::tv_distance(rer::binomial_pmf(n, p1), rer::binomial_pmf(n, p2));
    });
}

}  // extern "C"
