#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qlab/errors.hpp"
#include "qlab/path.hpp"

namespace qlab {

// Strictly increasing arrival-slot indices. Policies return these; the
// deletion maps below consume them.
using DeletionSequence = std::vector<Slot>;

// Count of deletions in slots 1..n.
inline Slot counting(const DeletionSequence& M, Slot n) {
    return static_cast<Slot>(std::upper_bound(M.begin(), M.end(), n) - M.begin());
}

inline bool is_arrival_slot(const std::vector<QueueLen>& q, Slot m) {
    return m >= 1 && m < static_cast<Slot>(q.size()) &&
           q[static_cast<std::size_t>(m)] > q[static_cast<std::size_t>(m - 1)];
}

inline void validate_deletions(const std::vector<QueueLen>& q, const DeletionSequence& M) {
    Slot prev = 0;
    for (Slot m : M) {
        if (m <= prev)
            throw invalid_deletion_error("deletion slots must be strictly increasing");
        if (!is_arrival_slot(q, m))
            throw invalid_deletion_error("deletion slot is not an arrival of the path");
        prev = m;
    }
}

// Remove the arrival at slot m: decrement q[n] for n >= m as long as the
// input path stays positive on {m..n}.
inline std::vector<QueueLen> point_delete(const std::vector<QueueLen>& q, Slot m) {
    if (!is_arrival_slot(q, m)) throw invalid_deletion_error("point_delete: not an arrival slot");
    std::vector<QueueLen> out = q;
    for (std::size_t n = static_cast<std::size_t>(m); n < q.size(); ++n) {
        if (q[n] <= 0) break;
        --out[n];
    }
    return out;
}

// Apply every deletion in M. Equivalent to folding point_delete in any order;
// implemented as one pass carrying the number of still-active decrements.
// An active decrement dies when the running path touches zero.
inline std::vector<QueueLen> multi_delete(const std::vector<QueueLen>& q,
                                          const DeletionSequence& M) {
    validate_deletions(q, M);
    std::vector<QueueLen> out(q.size());
    out[0] = q[0];
    QueueLen active = 0;
    std::size_t next = 0;
    for (std::size_t n = 1; n < q.size(); ++n) {
        if (next < M.size() && static_cast<std::size_t>(M[next]) == n) {
            ++active;
            ++next;
        }
        active = std::min(active, q[n]);
        out[n] = q[n] - active;
    }
    return out;
}

// Sum of q[1..n].
inline std::int64_t partial_sum(const std::vector<QueueLen>& q, Slot n) {
    if (n < 0 || n >= static_cast<Slot>(q.size()))
        throw parameter_error("partial_sum: index out of range");
    std::int64_t s = 0;
    for (Slot k = 1; k <= n; ++k) s += q[static_cast<std::size_t>(k)];
    return s;
}

struct FeasibilityReport {
    double discrete_rate = 0.0;    // I(M,horizon)/horizon
    double continuous_rate = 0.0;  // (lambda+1-p) * discrete_rate
    double bound = 0.0;            // p/(lambda+1-p)
    bool feasible = false;
    double slack_sigmas = 0.0;     // (bound - rate)/SE, positive when under the bound
};

// Finite-horizon surrogate for the long-run rate constraint: feasible iff the
// empirical rate is no more than three binomial standard errors above the
// bound p/(lambda+1-p).
inline FeasibilityReport check_feasible(const SamplePath& path, const DeletionSequence& M,
                                        Slot horizon) {
    if (horizon < 1 || horizon > path.n_slots())
        throw parameter_error("check_feasible: horizon out of range");
    FeasibilityReport r;
    r.bound = path.params.p / path.params.event_rate();
    r.discrete_rate = static_cast<double>(counting(M, horizon)) / static_cast<double>(horizon);
    r.continuous_rate = path.params.event_rate() * r.discrete_rate;
    const double se = std::sqrt(r.bound * (1.0 - r.bound) / static_cast<double>(horizon));
    r.feasible = r.discrete_rate <= r.bound + 3.0 * se;
    r.slack_sigmas = (r.bound - r.discrete_rate) / se;
    return r;
}

// Maximal run {l..u} with q[l-1] = 0, q[u] = 0 and q > 0 in between. A path
// that is still positive at the horizon closes its last period at N.
struct BusyPeriod {
    Slot l = 0;
    Slot u = 0;
};

inline std::vector<BusyPeriod> busy_periods(const std::vector<QueueLen>& q) {
    if (q.empty() || q[0] != 0) throw parameter_error("busy_periods: path must start at 0");
    std::vector<BusyPeriod> out;
    const Slot N = static_cast<Slot>(q.size()) - 1;
    Slot l = 0;
    for (Slot n = 1; n <= N; ++n) {
        const QueueLen v = q[static_cast<std::size_t>(n)];
        if (l == 0 && v > 0) l = n;
        if (l != 0 && v == 0) {
            out.push_back({l, n});
            l = 0;
        }
    }
    if (l != 0) out.push_back({l, N});
    return out;
}

// Per-epoch summaries between adjacent deletions: lengths m_{i+1}-m_i and the
// post-deletion area over each epoch. The tail after the last deletion is an
// incomplete epoch and is dropped.
struct EpochStats {
    std::vector<Slot> boundaries;       // the deletion slots
    std::vector<Slot> lengths;          // size |M|-1
    std::vector<std::int64_t> areas;    // size |M|-1
    double mean_length() const {
        std::int64_t s = 0;
        for (Slot v : lengths) s += v;
        return lengths.empty() ? 0.0 : static_cast<double>(s) / static_cast<double>(lengths.size());
    }
};

inline EpochStats deletion_epochs(const std::vector<QueueLen>& q_after,
                                  const DeletionSequence& M) {
    if (M.size() < 2)
        throw insufficient_data_error("deletion_epochs: need at least two deletions");
    EpochStats st;
    st.boundaries = M;
    st.lengths.reserve(M.size() - 1);
    st.areas.reserve(M.size() - 1);
    for (std::size_t i = 0; i + 1 < M.size(); ++i) {
        st.lengths.push_back(M[i + 1] - M[i]);
        std::int64_t a = 0;
        for (Slot n = M[i]; n < M[i + 1]; ++n) a += q_after[static_cast<std::size_t>(n)];
        st.areas.push_back(a);
    }
    return st;
}

}  // namespace qlab
