#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "qlab/analytics.hpp"
#include "qlab/metrics.hpp"
#include "qlab/policies.hpp"
#include "test_util.hpp"

using namespace qlab;

namespace {

// Step-by-step greedy rule, kept as an oracle for the slab-selection
// implementation: scan the current path for the widest busy period (earliest
// on ties), delete its first arrival, repeat.
DeletionSequence greedy_reference(const std::vector<QueueLen>& q, Slot N, Slot K) {
    std::vector<QueueLen> cur(q.begin(), q.begin() + N + 1);
    DeletionSequence out;
    for (Slot step = 0; step < K; ++step) {
        Slot best_l = -1, best_delta = 0, l = 0;
        for (Slot n = 1; n <= N; ++n) {
            const QueueLen v = cur[static_cast<std::size_t>(n)];
            if (l == 0 && v > 0) l = n;
            if (l != 0 && v == 0) {
                if (n - l > best_delta) {
                    best_delta = n - l;
                    best_l = l;
                }
                l = 0;
            }
        }
        if (l != 0 && N + 1 - l > best_delta) {
            best_delta = N + 1 - l;
            best_l = l;
        }
        if (best_l < 0) break;
        for (Slot n = best_l; n < best_l + best_delta; ++n) --cur[static_cast<std::size_t>(n)];
        out.push_back(best_l);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Smallest area over every size-k arrival subset; the dominance oracle.
std::int64_t brute_force_min_area(const std::vector<QueueLen>& q, Slot N, int k) {
    std::vector<Slot> arrivals;
    for (Slot n = 1; n <= N; ++n)
        if (q[static_cast<std::size_t>(n)] > q[static_cast<std::size_t>(n - 1)])
            arrivals.push_back(n);
    const int A = static_cast<int>(arrivals.size());
    REQUIRE(A >= k);
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    std::int64_t best = -1;
    while (true) {
        DeletionSequence M;
        for (int j : idx) M.push_back(arrivals[static_cast<std::size_t>(j)]);
        const std::int64_t area = partial_sum(multi_delete(q, M), N);
        if (best < 0 || area < best) best = area;
        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == A - k + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return best;
}

}  // namespace

TEST_CASE("threshold policy simulates the running queue") {
    // events A,A,T,A with L=1: only the second arrival sees c >= 1
    const SamplePath p = testutil::path_from_q({0, 1, 2, 1, 2});
    CHECK(threshold_policy(p, 1) == DeletionSequence{2});
    CHECK(threshold_policy(p, 1'000'000'000).empty());
    CHECK_THROWS_AS(threshold_policy(p, 0), parameter_error);
}

TEST_CASE("threshold policy caps the post-deletion queue at L") {
    const SamplePath path = generate_initial_path({0.9, 0.5}, 100'000, 12);
    for (Slot L : {1, 3, 7}) {
        const std::vector<QueueLen> post = multi_delete(path.q, threshold_policy(path, L));
        CHECK(*std::max_element(post.begin(), post.end()) <= L);
    }
}

TEST_CASE("threshold simulation tracks the closed forms") {
    const ModelParams params{0.75, 0.5};
    const SamplePath path = generate_initial_path(params, 1'000'000, 2);
    const DeletionSequence M = threshold_policy(path, 2);
    const std::vector<QueueLen> post = multi_delete(path.q, M);
    CHECK(time_avg_queue(post, 10'000) == doctest::Approx(24.0 / 19.0).epsilon(0.01));
    const DeletionRates rates = empirical_deletion_rate(M, path.n_slots(), params);
    CHECK(rates.continuous == doctest::Approx(27.0 / 76.0).epsilon(0.01));
}

TEST_CASE("offline reference on hand paths") {
    CHECK(nob_reference(testutil::path_from_q({0, 1, 0, 1, 2, 1, 2})) == DeletionSequence{3, 6});
    CHECK(nob_reference(testutil::path_from_q({0, 1, 2, 3})) == DeletionSequence{1, 2, 3});
    CHECK(nob_reference(testutil::path_from_q({0, 1, 0})).empty());
}

TEST_CASE("linear scan equals the reference oracle") {
    CHECK(nob_offline(testutil::path_from_q({0, 1, 0, 1, 2, 1, 2})) == DeletionSequence{3, 6});
    CHECK(nob_offline(testutil::path_from_q({0})).empty());
    CHECK(nob_offline(testutil::path_from_q({0, 1, 2, 3})) == DeletionSequence{1, 2, 3});

    for (int len = 1; len <= 12; ++len)
        for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
            const SamplePath p = testutil::path_from_q(testutil::q_from_bits(bits, len));
            CHECK(nob_offline(p) == nob_reference(p));
        }

    for (int i = 0; i < 40; ++i) {
        const SamplePath p = generate_initial_path({0.9, 0.5}, 3'000, 100 + i);
        CHECK(nob_offline(p) == nob_reference(p));
    }
}

TEST_CASE("offline deletions sit on arrivals and at future minima") {
    const SamplePath path = generate_initial_path({0.95, 0.1}, 20'000, 6);
    const DeletionSequence M = nob_offline(path);
    const auto arrivals = arrival_slots(path);
    for (Slot m : M) CHECK(std::binary_search(arrivals.begin(), arrivals.end(), m));
}

TEST_CASE("windowed policy: degenerate windows") {
    const SamplePath p = testutil::path_from_q({0, 1, 0, 1, 2, 1, 2});
    CHECK(nob_window(p, 0.0) == DeletionSequence{1, 3, 4, 6});  // every arrival
    CHECK(nob_window(p, 100.0) == nob_offline(p));              // spans the horizon
    CHECK(nob_window(p, 1.0) == DeletionSequence{3, 6});
    CHECK_THROWS_AS(nob_window(p, -1.0), parameter_error);
}

TEST_CASE("windowed deletions contain the offline ones, queue no larger") {
    std::mt19937_64 eng(31);
    for (int i = 0; i < 25; ++i) {
        const SamplePath path = generate_initial_path({0.9, 0.5}, 5'000, 300 + i);
        const DeletionSequence off = nob_offline(path);
        const double w = 0.25 * static_cast<double>(1 + (eng() % 40));
        const DeletionSequence win = nob_window(path, w);
        CHECK(std::includes(win.begin(), win.end(), off.begin(), off.end()));

        const std::vector<QueueLen> post_w = multi_delete(path.q, win);
        const std::vector<QueueLen> post_o = multi_delete(path.q, off);
        for (std::size_t n = 0; n < post_w.size(); ++n) CHECK(post_w[n] <= post_o[n]);
        CHECK(time_avg_queue(post_w, 0) <= time_avg_queue(post_o, 0));
    }
}

TEST_CASE("server never idles after the first offline deletion") {
    const SamplePath path = generate_initial_path({0.9, 0.5}, 200'000, 17);
    const DeletionSequence M = nob_offline(path);
    REQUIRE(!M.empty());
    const std::vector<QueueLen> post = multi_delete(path.q, M);
    std::int64_t wasted = 0;
    for (Slot n = M.front() + 1; n <= path.n_slots(); ++n)
        if (path.event(n) == EventKind::Token && post[static_cast<std::size_t>(n - 1)] == 0)
            ++wasted;
    CHECK(wasted == 0);
}

TEST_CASE("epoch-level relaxation on a hand path") {
    const SamplePath p = testutil::path_from_q({0, 1, 0, 1, 2, 1, 2});
    // offline deletions {3,6}; epochs [3..5] (length 3) and [6..6]
    CHECK(sigma_window(p, 5.0) == DeletionSequence{3, 6});    // both epochs fit
    CHECK(sigma_window(p, 0.0) == DeletionSequence{3, 4, 6}); // all arrivals inside epochs
    CHECK_THROWS_AS(sigma_window(p, -0.5), parameter_error);
}

TEST_CASE("epoch-level relaxation is a superset of offline deletions") {
    for (int i = 0; i < 20; ++i) {
        const SamplePath path = generate_initial_path({0.95, 0.1}, 5'000, 900 + i);
        const DeletionSequence off = nob_offline(path);
        for (double w : {0.0, 1.0, 5.0, 25.0}) {
            const DeletionSequence sig = sigma_window(path, w);
            CHECK(std::includes(sig.begin(), sig.end(), off.begin(), off.end()));
            validate_deletions(path.q, sig);  // strictly increasing arrivals only
        }
    }
}

TEST_CASE("big windows make the relaxation collapse onto offline deletions") {
    const SamplePath path = generate_initial_path({0.9, 0.5}, 2'000, 77);
    CHECK(sigma_window(path, 1e7) == nob_offline(path));
}

TEST_CASE("greedy on the worked example") {
    const std::vector<QueueLen> q{0, 1, 2, 1, 0, 1, 0};
    CHECK(greedy_delete(q, 6, 1) == DeletionSequence{1});  // longest busy period starts at 1
    CHECK(greedy_delete(q, 6, 0).empty());

    // marginal decrease of a first-arrival deletion is the busy-period width
    const std::int64_t before = partial_sum(q, 6);
    const std::int64_t after = partial_sum(multi_delete(q, {1}), 6);
    CHECK(before - after == 3);  // busy period {1..4}: u - l = 3
}

TEST_CASE("greedy exhausts arrivals gracefully") {
    const std::vector<QueueLen> q{0, 1, 0, 1, 0};
    const DeletionSequence M = greedy_delete(q, 4, 10);
    CHECK(M == DeletionSequence{1, 3});
}

TEST_CASE("slab selection reproduces the step-by-step greedy rule") {
    for (int len = 1; len <= 13; ++len)
        for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
            const std::vector<QueueLen> q = testutil::q_from_bits(bits, len);
            for (Slot k : {1, 2, 4})
                CHECK(greedy_delete(q, len, k) == greedy_reference(q, len, k));
        }
    std::mt19937_64 eng(91);
    for (int i = 0; i < 40; ++i) {
        const SamplePath path = generate_initial_path({0.85, 0.4}, 400, eng());
        for (Slot k : {1, 5, 25})
            CHECK(greedy_delete(path.q, 400, k) == greedy_reference(path.q, 400, k));
    }
}

TEST_CASE("greedy matches the brute-force minimum on random instances") {
    std::mt19937_64 eng(55);
    int instances = 0;
    while (instances < 60) {
        const Slot len = 20 + static_cast<Slot>(eng() % 21);
        const SamplePath path = generate_initial_path({0.5 + 0.4 * u01(eng), 0.5}, len, eng());
        const int k = 1 + static_cast<int>(eng() % 4);
        if (static_cast<int>(arrival_slots(path).size()) < k) continue;
        ++instances;
        const DeletionSequence g = greedy_delete(path.q, len, k);
        REQUIRE(static_cast<int>(g.size()) == k);
        validate_deletions(path.q, g);
        const std::int64_t greedy_area = partial_sum(multi_delete(path.q, g), len);
        CHECK(greedy_area == brute_force_min_area(path.q, len, k));
    }
}

TEST_CASE("policies handle degenerate horizons") {
    const SamplePath empty = testutil::path_from_q({0});
    CHECK(threshold_policy(empty, 1).empty());
    CHECK(nob_offline(empty).empty());
    CHECK(nob_reference(empty).empty());
    CHECK(nob_window(empty, 1.0).empty());
    CHECK(sigma_window(empty, 1.0).empty());
    CHECK(greedy_delete(empty.q, 0, 3).empty());

    const SamplePath one = testutil::path_from_q({0, 1});
    CHECK(nob_offline(one) == DeletionSequence{1});
    CHECK(greedy_delete(one.q, 1, 1) == DeletionSequence{1});
}

TEST_CASE("smallest feasible threshold is feasible in simulation") {
    const ModelParams params{0.95, 0.1};
    const Slot L = optimal_threshold(params.p, params.lambda);
    const SamplePath path = generate_initial_path(params, 1'000'000, 41);
    const FeasibilityReport fr = check_feasible(path, threshold_policy(path, L), path.n_slots());
    CHECK(fr.feasible);
    CHECK(fr.continuous_rate == doctest::Approx(0.099).epsilon(0.03));
}

TEST_CASE("policy dispatch and names") {
    const SamplePath p = testutil::path_from_q({0, 1, 0, 1, 2, 1, 2});
    CHECK(apply_policy(p, ThresholdPolicy{1}) == threshold_policy(p, 1));
    CHECK(apply_policy(p, NobPolicy{}) == nob_offline(p));
    CHECK(apply_policy(p, NobWindowPolicy{1.0}) == nob_window(p, 1.0));
    CHECK(apply_policy(p, SigmaWindowPolicy{5.0}) == sigma_window(p, 5.0));
    CHECK(apply_policy(p, GreedyPolicy{0, 1}) == greedy_delete(p.q, 6, 1));

    CHECK(policy_name(ThresholdPolicy{2}) == "threshold");
    CHECK(policy_name(NobPolicy{}) == "nob");
    CHECK(policy_name(NobWindowPolicy{}) == "nob-window");
    CHECK(policy_name(SigmaWindowPolicy{}) == "sigma-window");
    CHECK(policy_name(GreedyPolicy{}) == "greedy");
}

TEST_CASE("post-offline transition frequencies follow the reversed walk") {
    const ModelParams params{0.9, 0.5};
    const SamplePath path = generate_initial_path(params, 1'000'000, 23);
    const DeletionSequence M = nob_offline(path);
    REQUIRE(!M.empty());
    const std::vector<QueueLen> post = multi_delete(path.q, M);
    const std::vector<QueueLen> shifted(post.begin() + M.front(), post.end());
    const TransitionFrequencies tf = transition_frequencies(shifted);
    const double target = (1.0 - params.p) / params.event_rate();  // 0.35714...
    const double se_pos = std::sqrt(target * (1 - target) / tf.n_positive);
    const double se_zero = std::sqrt(target * (1 - target) / tf.n_zero);
    CHECK(std::abs(tf.up_at_positive - target) < 3 * se_pos);
    CHECK(std::abs(tf.up_at_zero - target) < 3 * se_zero);
}

TEST_CASE("offline deletion slots grow like the mean epoch length") {
    const SamplePath path = generate_initial_path({0.9, 0.5}, 1'000'000, 29);
    const DeletionSequence M = nob_offline(path);
    REQUIRE(M.size() > 1000);
    const double ratio = static_cast<double>(M[M.size() - 1]) / static_cast<double>(M.size());
    CHECK(ratio == doctest::Approx(3.5).epsilon(0.02));  // (lambda+1-p)/(lambda-(1-p))
}
