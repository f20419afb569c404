#pragma once

#include <deque>
#include <string>
#include <variant>
#include <vector>

#include "qlab/deletion.hpp"
#include "qlab/path.hpp"

namespace qlab {

// Online policy: simulate forward on the running post-deletion queue length c
// and delete an arrival iff c >= L at its instant.
inline DeletionSequence threshold_policy(const SamplePath& path, Slot L) {
    if (L < 1) throw parameter_error("threshold_policy: L must be >= 1");
    DeletionSequence out;
    QueueLen c = 0;
    const Slot N = path.n_slots();
    for (Slot n = 1; n <= N; ++n) {
        if (path.event(n) == EventKind::Arrival) {
            if (static_cast<Slot>(c) >= L)
                out.push_back(n);
            else
                ++c;
        } else if (c > 0) {
            --c;
        }
    }
    return out;
}

// Definition-following form of the offline policy: an arrival is deleted iff
// the path never drops below its level again within the horizon. Quadratic;
// kept as the oracle the linear scan is tested against.
inline DeletionSequence nob_reference(const SamplePath& path) {
    const auto& q = path.q;
    const Slot N = path.n_slots();
    DeletionSequence out;
    for (Slot n = 1; n <= N; ++n) {
        const QueueLen level = q[static_cast<std::size_t>(n)];
        if (level <= q[static_cast<std::size_t>(n - 1)]) continue;
        bool del = true;
        for (Slot t = n + 1; t <= N; ++t) {
            if (q[static_cast<std::size_t>(t)] < level) {
                del = false;
                break;
            }
        }
        if (del) out.push_back(n);
    }
    return out;
}

// Linear-time equivalent: collect the slots that set a new minimum when the
// path is scanned in reverse time. The scan runs down to slot 0 so that a
// first-slot deletion (q[0] = 0 below the whole suffix) is picked up too.
inline DeletionSequence nob_offline(const SamplePath& path) {
    const auto& q = path.q;
    const Slot N = path.n_slots();
    DeletionSequence out;
    if (N == 0) return out;
    QueueLen s = q[static_cast<std::size_t>(N)];
    for (Slot n = N - 1; n >= 0; --n) {
        if (q[static_cast<std::size_t>(n)] < s) {
            out.push_back(n + 1);
            s = q[static_cast<std::size_t>(n)];
        }
    }
    std::reverse(out.begin(), out.end());
    return out;
}

namespace detail {

// Largest k with T_{n+k} <= T_n + w, truncated at the horizon. The truncation
// makes every windowed decision at least as aggressive as the full-horizon
// one, so the superset property versus nob_offline holds path-wise.
class ClampedWindow {
public:
    ClampedWindow(const SamplePath& path, double w) : path_(path), w_(w), j_(1) {}

    Slot right_edge(Slot n) {  // window covers slots (n .. right_edge]
        const Slot N = path_.n_slots();
        if (j_ < n) j_ = n;
        const double cutoff = path_.time(n) + w_;
        while (j_ + 1 <= N && path_.time(j_ + 1) <= cutoff) ++j_;
        return j_;
    }

private:
    const SamplePath& path_;
    double w_;
    Slot j_;
};

}  // namespace detail

// Finite-lookahead variant: delete arrival n iff the path does not return
// below its level within the next W(n) slots (window measured in continuous
// time, truncated at the horizon).
inline DeletionSequence nob_window(const SamplePath& path, double w) {
    if (w < 0.0) throw parameter_error("nob_window: w must be nonnegative");
    const auto& q = path.q;
    const Slot N = path.n_slots();
    DeletionSequence out;
    detail::ClampedWindow window(path, w);
    std::deque<Slot> minq;  // indices in (n, j], q-values increasing front to back
    Slot pushed = 0;
    for (Slot n = 1; n <= N; ++n) {
        if (q[static_cast<std::size_t>(n)] <= q[static_cast<std::size_t>(n - 1)]) continue;
        const Slot j = window.right_edge(n);
        if (pushed < n) pushed = n;
        while (pushed < j) {
            ++pushed;
            const QueueLen v = q[static_cast<std::size_t>(pushed)];
            while (!minq.empty() && q[static_cast<std::size_t>(minq.back())] >= v)
                minq.pop_back();
            minq.push_back(pushed);
        }
        while (!minq.empty() && minq.front() <= n) minq.pop_front();
        const bool returns_below =
            !minq.empty() &&
            q[static_cast<std::size_t>(minq.front())] < q[static_cast<std::size_t>(n)];
        if (!returns_below) out.push_back(n);
    }
    return out;
}

// Epoch-level relaxation: within each offline deletion epoch, delete only the
// leading arrival when the epoch fits inside the lookahead window at its
// start, otherwise delete every arrival of the epoch. Implementable with w
// units of lookahead; deletion set is a superset of the offline policy's.
inline DeletionSequence sigma_window(const SamplePath& path, double w) {
    if (w < 0.0) throw parameter_error("sigma_window: w must be nonnegative");
    const auto& q = path.q;
    const Slot N = path.n_slots();
    const DeletionSequence nob = nob_offline(path);
    DeletionSequence out;
    detail::ClampedWindow window(path, w);
    for (std::size_t i = 0; i < nob.size(); ++i) {
        const Slot m = nob[i];
        const Slot epoch_end = (i + 1 < nob.size()) ? nob[i + 1] : N + 1;
        const Slot len = epoch_end - m;
        const Slot W = window.right_edge(m) - m;
        if (len <= W) {
            out.push_back(m);
        } else {
            for (Slot n = m; n < epoch_end; ++n)
                if (q[static_cast<std::size_t>(n)] > q[static_cast<std::size_t>(n - 1)])
                    out.push_back(n);
        }
    }
    return out;
}

// Finite-horizon greedy rule: repeatedly delete the first arrival of a busy
// period with the largest marginal area decrease (earliest such period on
// ties); a period still open at the horizon counts width N+1-l. Deleting a
// period's first arrival exposes the sub-periods one level up, and a
// sub-period is always strictly narrower than its parent, so the iteration
// is equivalent to picking the K widest runs of the path's level
// decomposition. That decomposition is one stack scan.
inline DeletionSequence greedy_delete(const std::vector<QueueLen>& q, Slot N, Slot K) {
    if (N < 0 || N >= static_cast<Slot>(q.size()))
        throw parameter_error("greedy_delete: horizon out of range");
    if (K < 0) throw parameter_error("greedy_delete: budget must be nonnegative");

    struct Slab {
        Slot width;
        Slot start;
        QueueLen level;
    };
    std::vector<Slab> slabs;
    std::vector<Slot> starts;  // run start per active level
    for (Slot n = 1; n <= N + 1; ++n) {
        const QueueLen h = n <= N ? q[static_cast<std::size_t>(n)] : 0;
        const QueueLen prev = q[static_cast<std::size_t>(n - 1)];
        for (QueueLen lv = prev + 1; lv <= h; ++lv) starts.push_back(n);
        for (QueueLen lv = prev; lv > h; --lv) {
            slabs.push_back({n - starts.back(), starts.back(), lv});
            starts.pop_back();
        }
    }

    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(K), slabs.size());
    const auto wider = [](const Slab& a, const Slab& b) {
        if (a.width != b.width) return a.width > b.width;
        if (a.start != b.start) return a.start < b.start;
        return a.level < b.level;
    };
    std::nth_element(slabs.begin(), slabs.begin() + take, slabs.end(), wider);
    DeletionSequence out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(slabs[i].start);
    std::sort(out.begin(), out.end());
    return out;
}

// --- Policy tags -----------------------------------------------------------

struct ThresholdPolicy {
    Slot L = 1;
};
struct NobPolicy {};
struct NobWindowPolicy {
    double w = 0.0;
};
struct SigmaWindowPolicy {
    double w = 0.0;
};
struct GreedyPolicy {
    Slot horizon = 0;  // 0: use the path horizon
    Slot budget = 0;
};

using PolicySpec =
    std::variant<ThresholdPolicy, NobPolicy, NobWindowPolicy, SigmaWindowPolicy, GreedyPolicy>;

inline DeletionSequence apply_policy(const SamplePath& path, const PolicySpec& spec) {
    struct Visitor {
        const SamplePath& path;
        DeletionSequence operator()(const ThresholdPolicy& p) const {
            return threshold_policy(path, p.L);
        }
        DeletionSequence operator()(const NobPolicy&) const { return nob_offline(path); }
        DeletionSequence operator()(const NobWindowPolicy& p) const {
            return nob_window(path, p.w);
        }
        DeletionSequence operator()(const SigmaWindowPolicy& p) const {
            return sigma_window(path, p.w);
        }
        DeletionSequence operator()(const GreedyPolicy& p) const {
            const Slot N = p.horizon > 0 ? p.horizon : path.n_slots();
            return greedy_delete(path.q, N, p.budget);
        }
    };
    return std::visit(Visitor{path}, spec);
}

inline std::string policy_name(const PolicySpec& spec) {
    struct Visitor {
        std::string operator()(const ThresholdPolicy&) const { return "threshold"; }
        std::string operator()(const NobPolicy&) const { return "nob"; }
        std::string operator()(const NobWindowPolicy&) const { return "nob-window"; }
        std::string operator()(const SigmaWindowPolicy&) const { return "sigma-window"; }
        std::string operator()(const GreedyPolicy&) const { return "greedy"; }
    };
    return std::visit(Visitor{}, spec);
}

}  // namespace qlab
