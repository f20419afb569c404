#include "doctest.h"

#include <cmath>
#include <random>

#include "qlab/metrics.hpp"
#include "qlab/policies.hpp"
#include "test_util.hpp"

using namespace qlab;

TEST_CASE("time_avg_queue") {
    CHECK(time_avg_queue({0, 1, 2, 1, 0, 1, 0}, 0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(time_avg_queue(std::vector<QueueLen>(100, 0), 10) == 0.0);
    CHECK_THROWS_AS(time_avg_queue({0, 1}, 1), parameter_error);
    CHECK_THROWS_AS(time_avg_queue({0, 1}, -1), parameter_error);
}

TEST_CASE("burn-in shifts the average by at most burn*max/(N-burn)") {
    const SamplePath path = generate_initial_path({0.9, 0.5}, 200'000, 3);
    const std::vector<QueueLen> post = multi_delete(path.q, nob_offline(path));
    const double a = time_avg_queue(post, 0);
    const double b = time_avg_queue(post, 10'000);
    const double maxq = *std::max_element(post.begin(), post.end());
    CHECK(std::abs(a - b) <= 10'000.0 * maxq / (200'000.0 - 10'000.0));
}

TEST_CASE("empirical_deletion_rate") {
    const ModelParams params{0.9, 0.5};
    const DeletionRates empty = empirical_deletion_rate({}, 100, params);
    CHECK(empty.discrete == 0.0);
    CHECK(empty.continuous == 0.0);

    const DeletionRates r = empirical_deletion_rate({3, 6, 50}, 10, params);
    CHECK(r.discrete == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.continuous == doctest::Approx(1.4 * 0.2).epsilon(1e-12));
    CHECK_THROWS_AS(empirical_deletion_rate({}, 0, params), parameter_error);
}

TEST_CASE("empirical_distribution") {
    const Histogram h = empirical_distribution({0, 1, 2, 1, 0, 1, 0}, 0);
    CHECK(h.total == 6);
    CHECK(h.freq(0) == doctest::Approx(2.0 / 6.0));
    CHECK(h.freq(1) == doctest::Approx(3.0 / 6.0));
    CHECK(h.freq(2) == doctest::Approx(1.0 / 6.0));
    CHECK(h.freq(5) == 0.0);
    std::int64_t total = 0;
    for (std::int64_t c : h.counts) total += c;
    CHECK(total == h.total);

    const Histogram zeros = empirical_distribution(std::vector<QueueLen>(50, 0), 0);
    CHECK(zeros.freq(0) == 1.0);

    // threshold-L paths put no mass above L
    const SamplePath path = generate_initial_path({0.9, 0.5}, 50'000, 5);
    const std::vector<QueueLen> post = multi_delete(path.q, threshold_policy(path, 3));
    const Histogram ht = empirical_distribution(post, 0);
    CHECK(static_cast<Slot>(ht.counts.size()) <= 4);
}

TEST_CASE("geometric CDF deviation is small for a geometric sample") {
    std::mt19937_64 eng(99);
    const double rho = 5.0 / 9.0;
    std::vector<QueueLen> q{0};
    std::geometric_distribution<int> geo(1.0 - rho);
    for (int i = 0; i < 200'000; ++i) q.push_back(static_cast<QueueLen>(geo(eng)));
    const double dev = max_cdf_dev_geometric(empirical_distribution(q, 0), rho);
    CHECK(dev < 0.01);
    // and it flags a wrong parameter
    CHECK(max_cdf_dev_geometric(empirical_distribution(q, 0), 0.75) > 0.05);
}

TEST_CASE("transition_frequencies") {
    const TransitionFrequencies alt = transition_frequencies({0, 1, 0, 1, 0, 1});
    CHECK(alt.up_at_zero == 1.0);
    CHECK(alt.up_at_positive == 0.0);

    const SamplePath p = generate_initial_path({0.9, 0.5}, 100'000, 13);
    const TransitionFrequencies tf = transition_frequencies(p.q);
    CHECK(tf.up_at_positive == doctest::Approx(0.9 / 1.4).epsilon(0.02));
    CHECK(tf.n_positive + tf.n_zero == 100'000);
    CHECK_THROWS_AS(transition_frequencies({0}), parameter_error);
}

TEST_CASE("batch means agree with the plain mean and give a sane SE") {
    const SamplePath path = generate_initial_path({0.9, 0.5}, 500'000, 19);
    const std::vector<QueueLen> post = multi_delete(path.q, nob_offline(path));
    const BatchMeans bm = batch_means(post, 10'000);
    // batches cover a truncated range; means agree loosely
    CHECK(bm.mean == doctest::Approx(time_avg_queue(post, 10'000)).epsilon(0.01));
    CHECK(bm.se > 0.0);
    CHECK(bm.se < 0.05);
    CHECK_THROWS_AS(batch_means(post, 499'999), parameter_error);
}

TEST_CASE("lag-1 autocorrelation near zero for i.i.d. data") {
    std::mt19937_64 eng(123);
    std::vector<double> xs;
    for (int i = 0; i < 100'000; ++i) xs.push_back(u01(eng));
    CHECK(std::abs(lag1_autocorr(xs)) < 0.02);

    std::vector<double> trend;
    for (int i = 0; i < 1000; ++i) trend.push_back(i);
    CHECK(lag1_autocorr(trend) > 0.9);
    CHECK_THROWS_AS(lag1_autocorr(std::vector<double>{1.0, 2.0}), parameter_error);
}
