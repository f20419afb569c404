#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "qlab/analytics.hpp"
#include "qlab/deletion.hpp"
#include "qlab/metrics.hpp"
#include "qlab/path.hpp"
#include "qlab/policies.hpp"

namespace qlab {

// One replication's worth of estimates. runtime_ms is informational only and
// never serialized, so CSV output is reproducible byte for byte.
struct RunResult {
    PolicySpec policy;
    ModelParams params;
    Slot horizon_slots = 0;
    std::uint64_t seed = 0;
    double avg_queue = 0.0;
    double deletion_rate_discrete = 0.0;
    double deletion_rate_continuous = 0.0;
    bool feasible = false;
    std::optional<double> epoch_mean;
    std::int64_t runtime_ms = 0;
    std::string error;  // per-row failure, empty on success
};

struct ExperimentConfig {
    std::vector<double> lambdas;
    double p = 0.1;
    std::vector<PolicySpec> policies;
    Slot horizon_slots = 10'000'000;
    int replications = 1;
    std::uint64_t seed_base = 1;
    Slot burn_in = 10'000;
    double window_c = 2.0;   // w = window_c * ln(1/(1-lambda)) for nob-window rows in sweeps
    Slot greedy_budget = 0;  // 0: largest feasible count floor(N*p/(lambda+1-p))
    std::string output_path;
};

inline RunResult run_single(const ModelParams& params, const PolicySpec& policy, Slot slots,
                            std::uint64_t seed, Slot burn_in) {
    if (slots < 1) throw parameter_error("run_single: horizon must be positive");
    if (burn_in >= slots) throw parameter_error("run_single: burn_in must be < horizon");
    const auto t0 = std::chrono::steady_clock::now();
    RunResult r;
    r.policy = policy;
    r.params = params;
    r.horizon_slots = slots;
    r.seed = seed;

    const SamplePath path = generate_initial_path(params, slots, seed);
    const DeletionSequence M = apply_policy(path, policy);
    const std::vector<QueueLen> post = multi_delete(path.q, M);

    r.avg_queue = time_avg_queue(post, burn_in);
    const FeasibilityReport fr = check_feasible(path, M, slots);
    r.deletion_rate_discrete = fr.discrete_rate;
    r.deletion_rate_continuous = fr.continuous_rate;
    r.feasible = fr.feasible;
    if (M.size() >= 2) r.epoch_mean = deletion_epochs(post, M).mean_length();

    r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    return r;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Parameter columns: threshold fills L, the window policies fill w, greedy
// records its budget in the integer column L.
inline void policy_columns(const PolicySpec& spec, std::string& L, std::string& w) {
    struct Visitor {
        std::string& L;
        std::string& w;
        void operator()(const ThresholdPolicy& p) const { L = std::to_string(p.L); }
        void operator()(const NobPolicy&) const {}
        void operator()(const NobWindowPolicy& p) const { w = fmt_double(p.w); }
        void operator()(const SigmaWindowPolicy& p) const { w = fmt_double(p.w); }
        void operator()(const GreedyPolicy& p) const { L = std::to_string(p.budget); }
    };
    std::visit(Visitor{L, w}, spec);
}

}  // namespace detail

inline std::string csv_header() {
    return "policy,lambda,p,L,w,horizon_slots,seed,avg_queue,del_rate_discrete,"
           "del_rate_continuous,feasible,epoch_mean,error";
}

inline std::string csv_row(const RunResult& r) {
    std::string L, w;
    detail::policy_columns(r.policy, L, w);
    std::string row = policy_name(r.policy);
    row += ',' + detail::fmt_double(r.params.lambda);
    row += ',' + detail::fmt_double(r.params.p);
    row += ',' + L;
    row += ',' + w;
    row += ',' + std::to_string(r.horizon_slots);
    row += ',' + std::to_string(r.seed);
    if (r.error.empty()) {
        row += ',' + detail::fmt_double(r.avg_queue);
        row += ',' + detail::fmt_double(r.deletion_rate_discrete);
        row += ',' + detail::fmt_double(r.deletion_rate_continuous);
        row += r.feasible ? ",true" : ",false";
        row += ',' + (r.epoch_mean ? detail::fmt_double(*r.epoch_mean) : std::string());
        row += ',';
    } else {
        std::string msg = r.error;
        for (char& c : msg)
            if (c == ',' || c == '\n') c = ';';
        row += ",,,,,," + msg;
    }
    return row;
}

inline std::string csv_document(const std::vector<RunResult>& rows) {
    std::string doc = csv_header() + '\n';
    for (const auto& r : rows) doc += csv_row(r) + '\n';
    return doc;
}

inline void write_csv(const std::vector<RunResult>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parameter_error("cannot open output file: " + path);
    out << csv_document(rows);
}

namespace detail {

inline Slot default_greedy_budget(const ModelParams& params, Slot slots) {
    return static_cast<Slot>(static_cast<double>(slots) * params.p / params.event_rate());
}

// Replication k runs with seed seed_base + k; a failed row keeps its place in
// the output with the error column filled.
inline void run_replications(const ModelParams& params, const PolicySpec& policy,
                             const ExperimentConfig& cfg, std::vector<RunResult>& rows) {
    for (int k = 0; k < cfg.replications; ++k) {
        const std::uint64_t seed = cfg.seed_base + static_cast<std::uint64_t>(k);
        try {
            rows.push_back(run_single(params, policy, cfg.horizon_slots, seed, cfg.burn_in));
        } catch (const std::exception& e) {
            RunResult r;
            r.policy = policy;
            r.params = params;
            r.horizon_slots = cfg.horizon_slots;
            r.seed = seed;
            r.error = e.what();
            rows.push_back(r);
        }
    }
}

}  // namespace detail

// Lambda grid x policy grid, replications innermost. Policies holding
// lambda-dependent parameters (threshold L, window w) are resolved per grid
// point when their parameter is left at zero.
inline std::vector<RunResult> sweep(const ExperimentConfig& cfg) {
    if (cfg.lambdas.empty()) throw parameter_error("sweep: empty lambda grid");
    if (cfg.policies.empty()) throw parameter_error("sweep: no policies");
    if (cfg.replications < 1) throw parameter_error("sweep: replications must be >= 1");
    std::vector<RunResult> rows;
    for (double lambda : cfg.lambdas) {
        const ModelParams params{lambda, cfg.p};
        for (PolicySpec policy : cfg.policies) {
            if (auto* th = std::get_if<ThresholdPolicy>(&policy); th && th->L == 0)
                th->L = optimal_threshold(cfg.p, lambda);
            if (auto* nw = std::get_if<NobWindowPolicy>(&policy); nw && nw->w == 0.0)
                nw->w = lookahead_window(cfg.p, lambda, cfg.window_c);
            if (auto* sw = std::get_if<SigmaWindowPolicy>(&policy); sw && sw->w == 0.0)
                sw->w = lookahead_window(cfg.p, lambda, cfg.window_c);
            if (auto* g = std::get_if<GreedyPolicy>(&policy); g && g->budget == 0)
                g->budget = cfg.greedy_budget > 0
                                ? cfg.greedy_budget
                                : detail::default_greedy_budget(params, cfg.horizon_slots);
            detail::run_replications(params, policy, cfg, rows);
        }
    }
    return rows;
}

// Fixed lambda, grid over lookahead windows. Deletions shrink as w grows, so
// the deletion rate is nonincreasing and the average queue nondecreasing in w
// (path-wise, when rows share a seed).
inline std::vector<RunResult> duality_sweep(const ExperimentConfig& cfg,
                                            const std::vector<double>& w_grid) {
    if (cfg.lambdas.size() != 1) throw parameter_error("duality: exactly one lambda");
    if (w_grid.empty()) throw parameter_error("duality: empty window grid");
    const ModelParams params{cfg.lambdas[0], cfg.p};
    std::vector<RunResult> rows;
    for (double w : w_grid)
        detail::run_replications(params, NobWindowPolicy{w}, cfg, rows);
    return rows;
}

}  // namespace qlab
