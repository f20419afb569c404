#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "qlab/deletion.hpp"
#include "qlab/path.hpp"

namespace qlab {

// Mean of q[burn_in+1 .. N].
inline double time_avg_queue(const std::vector<QueueLen>& q, Slot burn_in) {
    const Slot N = static_cast<Slot>(q.size()) - 1;
    if (burn_in < 0 || burn_in >= N) throw parameter_error("time_avg_queue: burn_in >= horizon");
    std::int64_t s = 0;
    for (Slot k = burn_in + 1; k <= N; ++k) s += q[static_cast<std::size_t>(k)];
    return static_cast<double>(s) / static_cast<double>(N - burn_in);
}

struct DeletionRates {
    double discrete = 0.0;
    double continuous = 0.0;
};

inline DeletionRates empirical_deletion_rate(const DeletionSequence& M, Slot n,
                                             const ModelParams& params) {
    if (n < 1) throw parameter_error("empirical_deletion_rate: n must be >= 1");
    DeletionRates r;
    r.discrete = static_cast<double>(counting(M, n)) / static_cast<double>(n);
    r.continuous = params.event_rate() * r.discrete;
    return r;
}

struct Histogram {
    std::vector<std::int64_t> counts;  // counts[v] = slots with q == v
    std::int64_t total = 0;

    double freq(Slot v) const {
        if (v < 0 || v >= static_cast<Slot>(counts.size())) return 0.0;
        return static_cast<double>(counts[static_cast<std::size_t>(v)]) /
               static_cast<double>(total);
    }
};

inline Histogram empirical_distribution(const std::vector<QueueLen>& q, Slot burn_in) {
    const Slot N = static_cast<Slot>(q.size()) - 1;
    if (burn_in < 0 || burn_in >= N)
        throw parameter_error("empirical_distribution: burn_in >= horizon");
    Histogram h;
    for (Slot k = burn_in + 1; k <= N; ++k) {
        const QueueLen v = q[static_cast<std::size_t>(k)];
        if (static_cast<Slot>(h.counts.size()) <= v) h.counts.resize(v + 1, 0);
        ++h.counts[static_cast<std::size_t>(v)];
    }
    h.total = N - burn_in;
    return h;
}

// Max absolute deviation between the empirical CDF and the geometric law
// with parameter rho (P(i) = (1-rho) rho^i).
inline double max_cdf_dev_geometric(const Histogram& h, double rho) {
    double dev = 0.0;
    double emp = 0.0;
    double model = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        emp += static_cast<double>(h.counts[i]) / static_cast<double>(h.total);
        model = 1.0 - std::pow(rho, static_cast<double>(i) + 1.0);
        dev = std::max(dev, std::abs(emp - model));
    }
    return dev;
}

struct TransitionFrequencies {
    double up_at_positive = 0.0;
    double up_at_zero = 0.0;
    std::int64_t n_positive = 0;  // transitions observed from a positive state
    std::int64_t n_zero = 0;      // transitions observed from zero
};

// Empirical frequency of +1 steps, conditioned on the current state being
// positive and on it being zero.
inline TransitionFrequencies transition_frequencies(const std::vector<QueueLen>& q) {
    if (q.size() < 2) throw parameter_error("transition_frequencies: need length >= 2");
    std::int64_t up_pos = 0, up_zero = 0;
    TransitionFrequencies f;
    for (std::size_t n = 0; n + 1 < q.size(); ++n) {
        const bool up = q[n + 1] == q[n] + 1;
        if (q[n] > 0) {
            ++f.n_positive;
            up_pos += up;
        } else {
            ++f.n_zero;
            up_zero += up;
        }
    }
    if (f.n_positive > 0)
        f.up_at_positive = static_cast<double>(up_pos) / static_cast<double>(f.n_positive);
    if (f.n_zero > 0) f.up_at_zero = static_cast<double>(up_zero) / static_cast<double>(f.n_zero);
    return f;
}

struct BatchMeans {
    double mean = 0.0;
    double se = 0.0;  // standard error from batch-to-batch variation
};

// Confidence for autocorrelated series: split into batches and use the
// batch-mean spread.
inline BatchMeans batch_means(const std::vector<QueueLen>& q, Slot burn_in, int n_batches = 100) {
    const Slot N = static_cast<Slot>(q.size()) - 1;
    if (burn_in < 0 || burn_in >= N) throw parameter_error("batch_means: burn_in >= horizon");
    const std::int64_t len = N - burn_in;
    if (n_batches < 2 || len < n_batches) throw parameter_error("batch_means: too few samples");
    const std::int64_t bs = len / n_batches;
    std::vector<double> bm;
    bm.reserve(static_cast<std::size_t>(n_batches));
    for (int b = 0; b < n_batches; ++b) {
        std::int64_t s = 0;
        const Slot start = burn_in + 1 + b * bs;
        for (Slot k = start; k < start + bs; ++k) s += q[static_cast<std::size_t>(k)];
        bm.push_back(static_cast<double>(s) / static_cast<double>(bs));
    }
    BatchMeans out;
    for (double v : bm) out.mean += v;
    out.mean /= static_cast<double>(n_batches);
    double var = 0.0;
    for (double v : bm) var += (v - out.mean) * (v - out.mean);
    var /= static_cast<double>(n_batches - 1);
    out.se = std::sqrt(var / static_cast<double>(n_batches));
    return out;
}

// Lag-1 autocorrelation of a real-valued series.
template <typename T>
double lag1_autocorr(const std::vector<T>& xs) {
    if (xs.size() < 3) throw parameter_error("lag1_autocorr: need at least 3 values");
    double mean = 0.0;
    for (T v : xs) mean += static_cast<double>(v);
    mean /= static_cast<double>(xs.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = static_cast<double>(xs[i]) - mean;
        den += d * d;
        if (i + 1 < xs.size()) num += d * (static_cast<double>(xs[i + 1]) - mean);
    }
    return num / den;
}

}  // namespace qlab
