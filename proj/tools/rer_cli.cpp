// Command-line front end over the C API.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rer/rer.h"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kPartial = 2;

struct Global {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
    std::string format = "csv";
};

struct CError {
    rer_status status;
    std::string message;
};

void check(rer_status s) {
    if (s != RER_OK) throw CError{s, rer_last_error()};
}

struct Owned {
    char* p = nullptr;
    ~Owned() { rer_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

using GraphPtr = std::unique_ptr<rer_graph, decltype(&rer_graph_free)>;
GraphPtr wrap(rer_graph* g) { return GraphPtr(g, &rer_graph_free); }

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw CError{RER_E_IO, "cannot open " + path + " for writing"};
    f << text;
    if (!f) throw CError{RER_E_IO, "write to " + path + " failed"};
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CError{RER_E_IO, "cannot open " + path};
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

GraphPtr load(const std::string& path) {
    rer_graph* g = nullptr;
    check(rer_graph_read(path.c_str(), &g));
    return wrap(g);
}

void save(const rer_graph* g, const std::string& path, bool binary) {
    if (path.empty() || path == "-") {
        if (binary) throw CError{RER_E_PARAMETER, "binary output needs --out"};
        Owned text;
        check(rer_graph_format_text(g, &text.p));
        std::cout << text.str();
        return;
    }
    check(rer_graph_write(g, path.c_str(), binary ? 1 : 0));
}

std::string with_suffix(const std::string& out, const std::string& suffix) {
    if (out.empty() || out == "-") return "";
    return out + suffix;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust estimation of the Erdos-Renyi edge probability under node corruption"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--out", g.out, "Output path ('-' or empty for stdout)");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    // gen
    auto* gen = app.add_subcommand("gen", "Sample G(n,p) (or the directed model)");
    std::size_t gen_n = 0;
    double gen_p = 0.5;
    bool gen_directed = false, gen_binary = false;
    gen->add_option("--n", gen_n, "Nodes")->required();
    gen->add_option("--p", gen_p, "Edge probability")->required();
    gen->add_flag("--directed", gen_directed, "Directed ER model");
    gen->add_flag("--binary", gen_binary, "Packed binary output");

    // corrupt
    auto* cor = app.add_subcommand("corrupt", "Apply an adversary to a graph file");
    std::string cor_in, cor_adv = "coin";
    double cor_gamma = 0.1, cor_c = 1.0, cor_p1 = -1.0;
    bool cor_binary = false;
    cor->add_option("--in", cor_in, "Input graph")->required();
    cor->add_option("--adversary", cor_adv, "fill|empty|coin|five-set|degree-rewire")
        ->check(CLI::IsMember({"fill", "empty", "coin", "five-set", "degree-rewire"}));
    cor->add_option("--gamma", cor_gamma, "Corruption level")->required();
    cor->add_option("--c", cor_c, "five-set prune constant");
    cor->add_option("--p1", cor_p1, "degree-rewire: edge probability of the coupling");
    cor->add_flag("--binary", cor_binary, "Packed binary output");

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate p from a graph file");
    std::string est_in, est_id = "spectral-sym";
    double est_gamma = 0.0;
    rer_estimator_options eo;
    rer_estimator_options_init(&eo);
    est->add_option("--in", est_in, "Input graph")->required();
    est->add_option("--estimator", est_id, "Estimator id")
        ->check(CLI::IsMember({"mean", "median", "prune-mean", "prune-median", "spectral", "spectral-sym", "exhaustive"}));
    est->add_option("--gamma", est_gamma, "Assumed corruption level");
    est->add_option("--c", eo.c, "Prune constant");
    est->add_option("--alpha1", eo.alpha1, "Spectral alpha1 (0 derives it from gamma)");
    est->add_option("--repeats", eo.repeats, "Spectral repeats (0 = default)");
    est->add_option("--eig-tol", eo.eig_tol, "Eigenvector tolerance");

    // bench
    auto* bench = app.add_subcommand("bench", "Run an adversary x estimator sweep");
    std::string bench_config;
    std::vector<std::size_t> b_n;
    std::vector<double> b_p, b_gamma;
    std::string b_adv;
    std::vector<std::string> b_est;
    std::size_t b_trials = 0;
    double band_c = 1.0;
    bench->add_option("--config", bench_config, "JSON config file");
    bench->add_option("--n", b_n, "Grid values of n");
    bench->add_option("--p", b_p, "Grid values of p");
    bench->add_option("--gamma", b_gamma, "Grid values of gamma");
    bench->add_option("--adversary", b_adv, "Adversary id");
    bench->add_option("--estimators", b_est, "Estimator ids");
    bench->add_option("--trials", b_trials, "Trials per grid point");
    bench->add_option("--band-c", band_c, "Constant C of the theorem band column");

    // regularity-audit
    auto* audit = app.add_subcommand("regularity-audit", "Concentration audit of centered submatrix sums");
    std::size_t a_n = 12, a_trials = 200;
    double a_p = 0.5;
    std::vector<double> a_alpha{0.1, 0.25, 0.5};
    audit->add_option("--n", a_n, "Nodes");
    audit->add_option("--p", a_p, "Edge probability");
    audit->add_option("--alpha", a_alpha, "alpha grid");
    audit->add_option("--trials", a_trials, "Trials");

    // lb-demo
    auto* lb = app.add_subcommand("lb-demo", "Indistinguishability demo of the lower-bound coupling");
    std::size_t l_n = 200, l_trials = 100, l_nodes = 10000;
    double l_p = 0.3, l_gamma = 0.2;
    lb->add_option("--n", l_n, "Nodes");
    lb->add_option("--p", l_p, "p1");
    lb->add_option("--gamma", l_gamma, "Corruption level");
    lb->add_option("--trials", l_trials, "Demo runs");
    lb->add_option("--nodes", l_nodes, "Pooled nodes per side in each run");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Calibrate the rate constants c and c1");
    std::string cal_config;
    std::size_t cal_trials = 0;
    cal->add_option("--config", cal_config, "JSON overrides of the calibration sweep");
    cal->add_option("--trials", cal_trials, "Trials per cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*gen) {
            rer_graph* out = nullptr;
            check(gen_directed ? rer_graph_sample_directed(gen_n, gen_p, g.seed, &out)
                               : rer_graph_sample(gen_n, gen_p, g.seed, &out));
            auto keep = wrap(out);
            save(out, g.out, gen_binary);
        } else if (*cor) {
            auto in = load(cor_in);
            rer_graph* out = nullptr;
            std::size_t corrupted = 0;
            if (cor_adv == "degree-rewire") {
                if (cor_p1 < 0.0) throw CError{RER_E_PARAMETER, "degree-rewire needs --p1"};
                check(rer_corrupt_degree_rewire(in.get(), cor_gamma, cor_p1, g.seed, &out, &corrupted));
            } else {
                check(rer_corrupt(in.get(), cor_adv.c_str(), cor_gamma, cor_c, g.seed, &out, &corrupted));
            }
            auto keep = wrap(out);
            save(out, g.out, cor_binary);
            std::cerr << "corrupted nodes: " << corrupted << "\n";
        } else if (*est) {
            auto in = load(est_in);
            double value = 0.0;
            Owned report;
            check(rer_estimate(in.get(), est_id.c_str(), est_gamma, &eo, g.seed, &value, &report.p));
            if (g.format == "json") {
                emit(g.out, report.str() + "\n");
            } else {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.17g", value);
                emit(g.out, "estimator,estimate\n" + est_id + "," + buf + "\n");
            }
        } else if (*bench) {
            nlohmann::json cfg = nlohmann::json::object();
            if (!bench_config.empty()) {
                try {
                    cfg = nlohmann::json::parse(read_file(bench_config));
                } catch (const nlohmann::json::exception& e) {
                    throw CError{RER_E_PARSE, bench_config + ": " + e.what()};
                }
            }
            if (!b_n.empty()) cfg["n"] = b_n;
            if (!b_p.empty()) cfg["p"] = b_p;
            if (!b_gamma.empty()) cfg["gamma"] = b_gamma;
            if (!b_adv.empty()) cfg["adversary"] = b_adv;
            if (!b_est.empty()) cfg["estimators"] = b_est;
            if (b_trials > 0) cfg["trials"] = b_trials;
            if (app.count("--seed")) cfg["seed"] = g.seed;
            if (app.count("--threads")) cfg["threads"] = g.threads;
            Owned csv, timings, summary;
            std::size_t errors = 0;
            check(rer_bench(cfg.dump().c_str(), &csv.p, &timings.p, &summary.p, band_c, &errors));
            if (g.format == "json") {
                emit(g.out, summary.str() + "\n");
            } else {
                emit(g.out, csv.str());
                if (auto t = with_suffix(g.out, ".timings.csv"); !t.empty()) emit(t, timings.str());
                if (auto s = with_suffix(g.out, ".summary.json"); !s.empty()) emit(s, summary.str() + "\n");
            }
            if (errors > 0) {
                std::cerr << errors << " row(s) failed; see the status column\n";
                return kPartial;
            }
        } else if (*audit) {
            Owned csv;
            check(rer_regularity_audit(a_n, a_p, a_alpha.data(), a_alpha.size(), a_trials, g.seed, &csv.p));
            emit(g.out, csv.str());
        } else if (*lb) {
            Owned pmf, report;
            check(rer_lb_demo(l_n, l_p, l_gamma, l_nodes, l_trials, g.seed, &pmf.p, &report.p));
            if (g.out.empty() || g.out == "-") {
                emit("", g.format == "json" ? report.str() + "\n" : pmf.str());
            } else {
                emit(g.out + ".pmf.csv", pmf.str());
                emit(g.out + ".report.json", report.str() + "\n");
            }
        } else if (*cal) {
            nlohmann::json cfg = nlohmann::json::object();
            if (!cal_config.empty()) {
                try {
                    cfg = nlohmann::json::parse(read_file(cal_config));
                } catch (const nlohmann::json::exception& e) {
                    throw CError{RER_E_PARSE, cal_config + ": " + e.what()};
                }
            }
            if (cal_trials > 0) cfg["trials"] = cal_trials;
            if (app.count("--seed")) cfg["seed"] = g.seed;
            if (app.count("--threads")) cfg["threads"] = g.threads;
            Owned artifact;
            double ce = 0, ck = 0;
            check(rer_calibrate(cfg.dump().c_str(), &artifact.p, &ce, &ck));
            emit(g.out, artifact.str() + "\n");
            std::cerr << "c_eta = " << ce << ", c_kappa = " << ck << "\n";
        }
    } catch (const CError& e) {
        std::cerr << "error (" << rer_status_name(e.status) << "): " << e.message << "\n";
        return kConfigError;
    }
    return kOk;
}
