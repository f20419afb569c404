#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "qlab/analytics.hpp"
#include "qlab/path.hpp"
#include "qlab/rng.hpp"

namespace qlab {

enum class Scheduler : std::uint8_t { LQF, DistributedThreshold };

// N stations, each with a Poisson(lambda) arrival stream and a local
// rate-(1-p) server, plus a central rate-pN resource. Under LQF the central
// token serves the longest local queue; under DistributedThreshold each
// station runs a threshold policy with budget p-epsilon and redirected jobs
// join a central FIFO queue that the central tokens drain.
struct PoolingConfig {
    int n_stations = 1;
    ModelParams params;           // lambda, p
    double epsilon = 0.0;         // 0: defaults to p/5
    Scheduler scheduler = Scheduler::DistributedThreshold;
    std::int64_t horizon_events = 1'000'000;
    std::int64_t burn_in_events = 10'000;
    std::uint64_t seed = 1;
};

struct PoolingStats {
    double mean_local_queue = 0.0;    // averaged over stations and event slots
    double mean_central_queue = 0.0;  // event-slot average of the central queue
    double central_rate_in = 0.0;     // redirected jobs per unit time
    std::vector<double> per_station_redirect_rates;
    Slot threshold_L = 0;                        // resolved threshold (threshold mode)
    std::int64_t central_tokens_wasted = 0;      // central tokens with nothing to serve
    std::int64_t central_wasted_while_loaded = 0;  // must stay 0 under LQF
    double sim_time = 0.0;
};

namespace detail {

// Queue lengths bucketed by value so an LQF pick (longest queue, lowest
// station index on ties) costs O(log N) per update.
class LqfIndex {
public:
    explicit LqfIndex(int n) : level_of_(static_cast<std::size_t>(n), 0) {
        levels_.resize(1);
        for (int s = 0; s < n; ++s) levels_[0].insert(s);
        max_level_ = 0;
    }

    void increment(int s) {
        const QueueLen lv = level_of_[static_cast<std::size_t>(s)];
        levels_[static_cast<std::size_t>(lv)].erase(s);
        if (static_cast<std::size_t>(lv + 1) >= levels_.size()) levels_.resize(lv + 2);
        levels_[static_cast<std::size_t>(lv + 1)].insert(s);
        level_of_[static_cast<std::size_t>(s)] = lv + 1;
        if (lv + 1 > max_level_) max_level_ = lv + 1;
    }

    void decrement(int s) {
        const QueueLen lv = level_of_[static_cast<std::size_t>(s)];
        levels_[static_cast<std::size_t>(lv)].erase(s);
        levels_[static_cast<std::size_t>(lv - 1)].insert(s);
        level_of_[static_cast<std::size_t>(s)] = lv - 1;
        while (max_level_ > 0 && levels_[static_cast<std::size_t>(max_level_)].empty())
            --max_level_;
    }

    QueueLen level(int s) const { return level_of_[static_cast<std::size_t>(s)]; }
    QueueLen max_level() const { return max_level_; }
    int longest() const { return *levels_[static_cast<std::size_t>(max_level_)].begin(); }

private:
    std::vector<std::set<int>> levels_;
    std::vector<QueueLen> level_of_;
    QueueLen max_level_ = 0;
};

}  // namespace detail

inline PoolingStats run_pooling(const PoolingConfig& cfg) {
    validate(cfg.params);
    if (cfg.n_stations < 1) throw parameter_error("pooling: need at least one station");
    if (cfg.horizon_events < 1) throw parameter_error("pooling: horizon_events must be positive");
    if (cfg.burn_in_events < 0 || cfg.burn_in_events >= cfg.horizon_events)
        throw parameter_error("pooling: burn_in_events out of range");
    const double p = cfg.params.p;
    const double lambda = cfg.params.lambda;
    const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : p / 5.0;
    if (!(eps < p)) throw parameter_error("pooling: epsilon must lie in (0,p)");

    const int N = cfg.n_stations;
    PoolingStats st;
    if (cfg.scheduler == Scheduler::DistributedThreshold)
        st.threshold_L = min_feasible_threshold(p - eps, cfg.params);

    // merged event stream: station arrivals (N*lambda), local tokens
    // (N*(1-p)), central tokens (p*N)
    const double total_rate = static_cast<double>(N) * (lambda + 1.0);
    const double pr_arrival = lambda / (lambda + 1.0);
    const double pr_local = (1.0 - p) / (lambda + 1.0);

    std::mt19937_64 eng = make_engine(cfg.seed);
    detail::LqfIndex stations(N);
    std::int64_t central = 0;
    std::int64_t total_local = 0;
    std::vector<std::int64_t> redirects(static_cast<std::size_t>(N), 0);

    const auto pick_station = [&](double u) {
        const int s = static_cast<int>(u * N);
        return s < N ? s : N - 1;
    };

    double t = 0.0;
    double stat_t0 = 0.0;
    std::int64_t sum_local = 0, sum_central = 0, measured = 0, redirected_total = 0;

    for (std::int64_t ev = 1; ev <= cfg.horizon_events; ++ev) {
        t += exp_draw(eng, total_rate);
        const double u = u01(eng);
        if (u < pr_arrival) {
            const int s = pick_station(u01(eng));
            if (cfg.scheduler == Scheduler::DistributedThreshold &&
                stations.level(s) >= st.threshold_L) {
                ++central;  // redirect instead of admitting
                if (ev > cfg.burn_in_events) {
                    ++redirects[static_cast<std::size_t>(s)];
                    ++redirected_total;
                }
            } else {
                stations.increment(s);
                ++total_local;
            }
        } else if (u < pr_arrival + pr_local) {
            const int s = pick_station(u01(eng));
            if (stations.level(s) > 0) {
                stations.decrement(s);
                --total_local;
            }
        } else {
            // central token
            if (cfg.scheduler == Scheduler::LQF) {
                if (stations.max_level() > 0) {
                    stations.decrement(stations.longest());
                    --total_local;
                } else {
                    ++st.central_tokens_wasted;
                    if (total_local > 0) ++st.central_wasted_while_loaded;
                }
            } else {
                if (central > 0)
                    --central;
                else
                    ++st.central_tokens_wasted;
            }
        }
        if (ev == cfg.burn_in_events) stat_t0 = t;
        if (ev > cfg.burn_in_events) {
            sum_local += total_local;
            sum_central += central;
            ++measured;
        }
    }

    const double span = t - stat_t0;
    st.mean_local_queue =
        static_cast<double>(sum_local) / (static_cast<double>(measured) * static_cast<double>(N));
    st.mean_central_queue = static_cast<double>(sum_central) / static_cast<double>(measured);
    st.central_rate_in = static_cast<double>(redirected_total) / span;
    st.per_station_redirect_rates.reserve(static_cast<std::size_t>(N));
    for (int s = 0; s < N; ++s)
        st.per_station_redirect_rates.push_back(
            static_cast<double>(redirects[static_cast<std::size_t>(s)]) / span);
    st.sim_time = span;
    return st;
}

}  // namespace qlab
