/* C interface to the robust Erdos-Renyi estimation library.
 *
 * Every call returns an rer_status; on failure rer_last_error() holds a
 * message for the calling thread until its next failing call. Strings handed
 * out through char** parameters are owned by the caller and released with
 * rer_string_free. */
#ifndef RER_H
#define RER_H

#include <stddef.h>
#include <stdint.h>

#if defined(RER_BUILDING_LIBRARY)
#define RER_API __attribute__((visibility("default")))
#else
#define RER_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rer_status {
    RER_OK = 0,
    RER_E_PARAMETER = 1,
    RER_E_DOMAIN = 2,
    RER_E_PARSE = 3,
    RER_E_IO = 4,
    RER_E_CONTRACT = 5,
    RER_E_BUDGET = 6,
    RER_E_INFEASIBLE = 7,
    RER_E_INTERNAL = 8
} rer_status;

typedef struct rer_graph rer_graph;

RER_API const char* rer_version(void);
RER_API const char* rer_last_error(void);
RER_API const char* rer_status_name(rer_status s);
RER_API void rer_string_free(char* s);

/* Graphs */
RER_API rer_status rer_graph_sample(size_t n, double p, uint64_t seed, rer_graph** out);
RER_API rer_status rer_graph_sample_directed(size_t n, double p, uint64_t seed, rer_graph** out);
/* edges: m pairs (i, j) flattened to 2m entries. */
RER_API rer_status rer_graph_from_edges(size_t n, const uint32_t* edges, size_t m, rer_graph** out);
RER_API rer_status rer_graph_read(const char* path, rer_graph** out);
/* binary != 0 writes the packed format, otherwise the text edge list. */
RER_API rer_status rer_graph_write(const rer_graph* g, const char* path, int binary);
/* Text edge-list rendering. */
RER_API rer_status rer_graph_format_text(const rer_graph* g, char** text);
RER_API void rer_graph_free(rer_graph* g);
RER_API size_t rer_graph_n(const rer_graph* g);
RER_API size_t rer_graph_edge_count(const rer_graph* g);
RER_API int rer_graph_has_edge(const rer_graph* g, size_t i, size_t j);
RER_API int rer_graph_is_directed(const rer_graph* g);
/* Keeps i->j with i < j as the undirected edge {i, j}. */
RER_API rer_status rer_graph_to_undirected(const rer_graph* g, rer_graph** out);

/* Corruption of an undirected graph. adversary: "fill", "empty", "coin" or "five-set".
 * c is the five-set prune constant (ignored otherwise). corrupted may be NULL. */
RER_API rer_status rer_corrupt(const rer_graph* g, const char* adversary, double gamma, double c, uint64_t seed,
                               rer_graph** out, size_t* corrupted);
/* Degree rewiring of a directed graph with the lower-bound coupling pmf built at p1. */
RER_API rer_status rer_corrupt_degree_rewire(const rer_graph* g, double gamma, double p1, uint64_t seed,
                                             rer_graph** out, size_t* corrupted);

/* Estimation */
typedef struct rer_estimator_options {
    double c;       /* prune constant */
    double alpha1;  /* 0: derived from gamma */
    int repeats;    /* 0: default */
    double eig_tol;
} rer_estimator_options;

RER_API void rer_estimator_options_init(rer_estimator_options* o);

/* estimator: "mean", "median", "prune-mean", "prune-median", "spectral",
 * "spectral-sym" or "exhaustive". report_json may be NULL. */
RER_API rer_status rer_estimate(const rer_graph* g, const char* estimator, double gamma,
                                const rer_estimator_options* opts, uint64_t seed, double* estimate,
                                char** report_json);

/* Experiments. config_json follows the bench config schema. Any output pointer may be NULL.
 * error_rows receives the number of rows that failed. */
RER_API rer_status rer_bench(const char* config_json, char** csv, char** timings_csv, char** summary_json,
                             double band_c, size_t* error_rows);

/* Concentration audit CSV with columns n,p,alpha,trial,lhs,bound,holds,sampled. */
RER_API rer_status rer_regularity_audit(size_t n, double p, const double* alphas, size_t alpha_count, size_t trials,
                                        uint64_t seed, char** csv);

/* Lower-bound demo: coupling pmfs as CSV and a JSON report of the chi-square runs. */
RER_API rer_status rer_lb_demo(size_t n, double p1, double gamma, size_t nodes_per_side, size_t trials,
                               uint64_t seed, char** pmf_csv, char** report_json);

/* Calibration sweep; config_json may be NULL or "{}" for the defaults. */
RER_API rer_status rer_calibrate(const char* config_json, char** artifact_json, double* c_eta, double* c_kappa);

/* Numerics */
RER_API rer_status rer_binomial_tv(size_t n, double p1, double p2, double* tv);

#ifdef __cplusplus
}
#endif

#endif
