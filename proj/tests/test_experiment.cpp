#include "doctest.h"

#include <algorithm>

#include "qlab/experiment.hpp"
#include "qlab/validate.hpp"
#include "test_util.hpp"

using namespace qlab;

TEST_CASE("run_single is deterministic and validates inputs") {
    const ModelParams params{0.9, 0.5};
    const RunResult a = run_single(params, NobPolicy{}, 50'000, 7, 1'000);
    const RunResult b = run_single(params, NobPolicy{}, 50'000, 7, 1'000);
    CHECK(a.avg_queue == b.avg_queue);
    CHECK(a.deletion_rate_discrete == b.deletion_rate_discrete);
    CHECK(a.epoch_mean.has_value());
    CHECK(*a.epoch_mean == *b.epoch_mean);
    CHECK(a.deletion_rate_continuous ==
          doctest::Approx(params.event_rate() * a.deletion_rate_discrete).epsilon(1e-15));
    CHECK(a.avg_queue >= 0.0);

    CHECK_THROWS_AS(run_single(params, NobPolicy{}, 0, 1, 0), parameter_error);
    CHECK_THROWS_AS(run_single(params, NobPolicy{}, 100, 1, 100), parameter_error);
}

TEST_CASE("csv schema and row shape") {
    CHECK(csv_header() ==
          "policy,lambda,p,L,w,horizon_slots,seed,avg_queue,del_rate_discrete,"
          "del_rate_continuous,feasible,epoch_mean,error");
    const RunResult r = run_single({0.9, 0.5}, ThresholdPolicy{2}, 10'000, 3, 100);
    const std::string row = csv_row(r);
    CHECK(std::count(row.begin(), row.end(), ',') == 12);
    CHECK(row.rfind("threshold,0.9,0.5,2,,10000,3,", 0) == 0);
}

TEST_CASE("sweep with one lambda equals repeated run_single rows") {
    ExperimentConfig cfg;
    cfg.lambdas = {0.9};
    cfg.p = 0.5;
    cfg.policies = {NobPolicy{}};
    cfg.horizon_slots = 20'000;
    cfg.replications = 2;
    cfg.seed_base = 40;
    cfg.burn_in = 500;
    const std::vector<RunResult> rows = sweep(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].seed == 40);
    CHECK(rows[1].seed == 41);
    CHECK(rows[0].avg_queue != rows[1].avg_queue);  // distinct streams
    const RunResult direct = run_single({0.9, 0.5}, NobPolicy{}, 20'000, 40, 500);
    CHECK(rows[0].avg_queue == direct.avg_queue);
}

TEST_CASE("sweep resolves lambda-dependent policy parameters") {
    ExperimentConfig cfg;
    cfg.lambdas = {0.95};
    cfg.p = 0.1;
    cfg.policies = {ThresholdPolicy{0}, NobWindowPolicy{0.0}};
    cfg.horizon_slots = 5'000;
    cfg.replications = 1;
    cfg.burn_in = 100;
    cfg.window_c = 2.0;
    const std::vector<RunResult> rows = sweep(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(std::get<ThresholdPolicy>(rows[0].policy).L == 12);
    CHECK(std::get<NobWindowPolicy>(rows[1].policy).w ==
          doctest::Approx(2.0 * std::log(20.0)).epsilon(1e-12));
}

TEST_CASE("duality sweep: deletions shrink and queue grows with w") {
    ExperimentConfig cfg;
    cfg.lambdas = {0.95};
    cfg.p = 0.1;
    cfg.horizon_slots = 50'000;
    cfg.replications = 1;
    cfg.seed_base = 5;
    cfg.burn_in = 1'000;
    const std::vector<double> grid{0.0, 0.5, 2.0, 8.0, 32.0};
    const std::vector<RunResult> rows = duality_sweep(cfg, grid);
    REQUIRE(rows.size() == grid.size());
    CHECK(rows[0].avg_queue == 0.0);  // w = 0 deletes every arrival
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].avg_queue >= rows[i - 1].avg_queue);
        CHECK(rows[i].deletion_rate_discrete <= rows[i - 1].deletion_rate_discrete);
    }
}

TEST_CASE("error rows keep their place in the sweep output") {
    ExperimentConfig cfg;
    cfg.lambdas = {0.95};
    cfg.p = 0.1;
    cfg.policies = {ThresholdPolicy{-3}, NobPolicy{}};  // first one is invalid
    cfg.horizon_slots = 2'000;
    cfg.replications = 1;
    cfg.burn_in = 10;
    const std::vector<RunResult> rows = sweep(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(!rows[0].error.empty());
    CHECK(rows[1].error.empty());
    const std::string row = csv_row(rows[0]);
    CHECK(std::count(row.begin(), row.end(), ',') == 12);
}

TEST_CASE("small sweep CSV is byte-stable") {
    ExperimentConfig cfg;
    cfg.lambdas = {0.92, 0.95};
    cfg.p = 0.1;
    cfg.policies = {ThresholdPolicy{0}, NobPolicy{}};
    cfg.horizon_slots = 20'000;
    cfg.replications = 1;
    cfg.seed_base = 77;
    cfg.burn_in = 500;
    const std::string doc = csv_document(sweep(cfg));
    const std::string want = testutil::read_file(testutil::golden_path("sweep_small.csv"));
    REQUIRE(!want.empty());
    CHECK(doc == want);
}

TEST_CASE("negative control: a corrupted target makes a criterion fail") {
    ValidationOptions opts;
    opts.quick = true;
    ValidationReport rep;
    // correct target passes at quick scale, a wrong one must not
    const CriterionResult bad = criterion_nob_rate(3, opts, rep, 0.37);
    CHECK(!bad.pass);
    const CriterionResult good = criterion_nob_rate(3, opts, rep);
    CHECK(good.pass);
}
