#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "qlab/errors.hpp"
#include "qlab/rng.hpp"

namespace qlab {

using Slot = std::int64_t;
using QueueLen = std::int32_t;

// Arrival rate lambda and redirection budget p, both in (0,1).
struct ModelParams {
    double lambda = 0.0;
    double p = 0.0;

    double event_rate() const { return lambda + 1.0 - p; }          // total Poisson rate
    double arrival_prob() const { return lambda / event_rate(); }   // per-slot up probability
    bool heavy_traffic() const { return lambda > 1.0 - p; }
};

inline void validate(const ModelParams& m) {
    if (!(m.lambda > 0.0 && m.lambda < 1.0))
        throw parameter_error("lambda must lie in (0,1)");
    if (!(m.p > 0.0 && m.p < 1.0))
        throw parameter_error("p must lie in (0,1)");
}

enum class EventKind : std::uint8_t { Arrival, Token };

// Embedded queue-length walk with no deletions applied. q is indexed by slot
// 0..N with q[0] = 0; events/times are 1-based (events[n-1], times[n-1] belong
// to slot n). Immutable after generation; extend() returns a longer copy that
// continues the same RNG stream.
struct SamplePath {
    std::vector<QueueLen> q;         // length N+1
    std::vector<EventKind> events;   // length N
    std::vector<double> times;       // length N, strictly increasing
    ModelParams params;
    std::uint64_t seed = 0;

    Slot n_slots() const { return static_cast<Slot>(events.size()); }
    EventKind event(Slot n) const { return events[static_cast<std::size_t>(n - 1)]; }
    double time(Slot n) const { return times[static_cast<std::size_t>(n - 1)]; }

    // engine state after the last generated slot, kept so extension is O(extra)
    std::mt19937_64 rng_state;
};

namespace detail {

inline void append_slots(SamplePath& path, Slot extra) {
    const double p_up = path.params.arrival_prob();
    const double rate = path.params.event_rate();
    double t = path.times.empty() ? 0.0 : path.times.back();
    QueueLen q = path.q.back();
    for (Slot i = 0; i < extra; ++i) {
        t += exp_draw(path.rng_state, rate);
        const bool up = u01(path.rng_state) < p_up;
        if (up) {
            ++q;
            path.events.push_back(EventKind::Arrival);
        } else {
            if (q > 0) --q;
            path.events.push_back(EventKind::Token);
        }
        path.q.push_back(q);
        path.times.push_back(t);
    }
}

}  // namespace detail

inline SamplePath generate_initial_path(const ModelParams& params, Slot n_slots,
                                        std::uint64_t seed) {
    validate(params);
    if (n_slots < 0) throw parameter_error("n_slots must be nonnegative");
    SamplePath path;
    path.params = params;
    path.seed = seed;
    path.rng_state = make_engine(seed);
    path.q.reserve(static_cast<std::size_t>(n_slots) + 1);
    path.events.reserve(static_cast<std::size_t>(n_slots));
    path.times.reserve(static_cast<std::size_t>(n_slots));
    path.q.push_back(0);
    detail::append_slots(path, n_slots);
    return path;
}

// Longer path continuing the same stream: extend(generate(n), k) is
// bit-identical to generate(n + k).
inline SamplePath extend(const SamplePath& path, Slot extra_slots) {
    if (extra_slots < 0) throw parameter_error("extra_slots must be nonnegative");
    SamplePath out = path;
    detail::append_slots(out, extra_slots);
    return out;
}

// Slots where q increases (all admitted-or-not arrival instants).
inline std::vector<Slot> arrival_slots(const std::vector<QueueLen>& q) {
    std::vector<Slot> out;
    for (std::size_t n = 1; n < q.size(); ++n)
        if (q[n] > q[n - 1]) out.push_back(static_cast<Slot>(n));
    return out;
}

inline std::vector<Slot> arrival_slots(const SamplePath& path) { return arrival_slots(path.q); }

// Largest k with T_{n+k} <= T_n + w. Throws if the generated horizon cannot
// certify the answer (caller should extend the path).
inline Slot window_size(const SamplePath& path, Slot n, double w) {
    const Slot N = path.n_slots();
    if (n < 1 || n > N) throw parameter_error("window_size: slot out of range");
    if (w < 0.0) throw parameter_error("window_size: w must be nonnegative");
    if (w == 0.0) return 0;  // times are strictly increasing
    const double cutoff = path.time(n) + w;
    Slot k = 0;
    while (n + k + 1 <= N && path.time(n + k + 1) <= cutoff) ++k;
    if (n + k + 1 > N)
        throw insufficient_horizon_error("window_size: window extends past generated horizon");
    return k;
}

// Text form used for golden files: one "index,event,q,time" line per slot,
// time printed to 12 significant digits.
inline std::string serialize(const SamplePath& path) {
    std::string out;
    char buf[96];
    for (Slot n = 1; n <= path.n_slots(); ++n) {
        const char ev = path.event(n) == EventKind::Arrival ? 'A' : 'T';
        std::snprintf(buf, sizeof(buf), "%lld,%c,%d,%.12g\n", static_cast<long long>(n), ev,
                      static_cast<int>(path.q[static_cast<std::size_t>(n)]), path.time(n));
        out += buf;
    }
    return out;
}

}  // namespace qlab
