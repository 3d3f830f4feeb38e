#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "fidkit/afc.hpp"
#include "fidkit/models.hpp"

using namespace fidkit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<int>(values.size()));
    int i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

Vector laplace_observation(const LaplaceLocationScale& model, std::uint64_t seed) {
    RandomSource rng(seed, 999);
    const Vector z = model.sample_noise(rng);
    Vector x = model.forward(vec({0.0, 1.0}), z);
    std::sort(x.data(), x.data() + x.size());
    return x;
}

AfcConfig laplace_config() {
    AfcConfig cfg;
    cfg.sort_noise = true;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("afc");

TEST_CASE("distance basics") {
    CHECK(distance(vec({1, 2}), vec({1, 2})) == 0.0);
    CHECK(distance(vec({0, 0}), vec({3, 4})) == doctest::Approx(5.0));
    RandomSource rng(3);
    for (int i = 0; i < 50; ++i) {
        Vector a(4), b(4);
        for (int j = 0; j < 4; ++j) {
            a[j] = rng.normal();
            b[j] = rng.normal();
        }
        CHECK(distance(a, b) == distance(b, a));
    }
    CHECK_THROWS_AS(distance(vec({1}), vec({1, 2})), DimensionError);
}

TEST_CASE("infinite epsilon accepts every proposal") {
    LaplaceLocationScale model(20);
    const Vector x = laplace_observation(model, 1);
    AnalyticInverse inverse(model);
    AfcConfig cfg = laplace_config();
    cfg.epsilon = kInf;
    cfg.target_n = 500;
    cfg.max_itr = 500;
    const auto set = afc_run(model, inverse, x, cfg, RandomSource(10));
    CHECK(set.n_accepted() == 500);
    CHECK(set.proposals_used == 500);
    CHECK(set.acceptance_rate == 1.0);
}

TEST_CASE("m=2 analytic inverse interpolates, so any positive epsilon accepts") {
    LaplaceLocationScale model(2);
    const Vector x = laplace_observation(model, 2);
    AnalyticInverse inverse(model);
    AfcConfig cfg = laplace_config();
    cfg.epsilon = 1e-9;
    cfg.target_n = 200;
    cfg.max_itr = 200;
    const auto set = afc_run(model, inverse, x, cfg, RandomSource(11));
    CHECK(set.n_accepted() == 200);
    for (double d : set.distances) CHECK(d < 1e-9);
}

TEST_CASE("accepted samples are admissible and re-checkable") {
    LaplaceLocationScale model(30);
    const Vector x = laplace_observation(model, 3);
    AnalyticInverse inverse(model);
    AfcConfig cfg = laplace_config();
    cfg.epsilon = 6.0;
    cfg.target_n = 100;
    cfg.max_itr = 100000;
    const auto set = afc_run(model, inverse, x, cfg, RandomSource(12));
    CHECK(set.n_accepted() >= 1);
    for (int j = 0; j < set.n_kept(); ++j) {
        CHECK(set.distances[j] < cfg.epsilon);
    }
    CHECK(set.proposals_used <= cfg.max_itr);
    CHECK(set.n_accepted() <= cfg.target_n);
}

TEST_CASE("monotone subset property on the same proposal stream") {
    LaplaceLocationScale model(15);
    const Vector x = laplace_observation(model, 4);
    AnalyticInverse inverse(model);

    AfcConfig wide = laplace_config();
    wide.epsilon = 5.0;
    wide.target_n = 4000;  // target equals the budget: the full pool is classified
    wide.max_itr = 4000;
    wide.keep_rejected = true;

    AfcConfig narrow = wide;
    narrow.epsilon = 2.5;

    const RandomSource rng(13);
    const auto big = afc_run(model, inverse, x, wide, rng);
    const auto small = afc_run(model, inverse, x, narrow, rng);

    std::set<long long> accepted_big, accepted_small;
    for (int j = 0; j < big.n_kept(); ++j) {
        if (big.accepted[j]) accepted_big.insert(big.proposal_index[j]);
    }
    for (int j = 0; j < small.n_kept(); ++j) {
        if (small.accepted[j]) accepted_small.insert(small.proposal_index[j]);
    }
    CHECK(accepted_small.size() <= accepted_big.size());
    CHECK(std::includes(accepted_big.begin(), accepted_big.end(), accepted_small.begin(),
                        accepted_small.end()));

    // filtered() reproduces the narrow run from the wide pool exactly.
    const auto refiltered = big.filtered(2.5);
    CHECK(static_cast<std::size_t>(refiltered.n_accepted()) == accepted_small.size());
}

TEST_CASE("unconditional distribution matches the large-epsilon accepted set") {
    LaplaceLocationScale model(10);
    const Vector x = laplace_observation(model, 5);
    AnalyticInverse inverse(model);

    AfcConfig unconditional = laplace_config();
    unconditional.epsilon = kInf;
    unconditional.target_n = 300;
    unconditional.max_itr = 300;

    AfcConfig huge = laplace_config();
    huge.epsilon = 1e12;
    huge.target_n = 300;
    huge.max_itr = 300;

    const RandomSource rng(14);
    const auto a = afc_run(model, inverse, x, unconditional, rng);
    const auto b = afc_run(model, inverse, x, huge, rng);
    REQUIRE(a.n_kept() == b.n_kept());
    CHECK((a.samples - b.samples).norm() == 0.0);
}

TEST_CASE("deterministic under a fixed seed and across thread counts") {
    LaplaceLocationScale model(25);
    const Vector x = laplace_observation(model, 6);
    AnalyticInverse inverse(model);
    AfcConfig cfg = laplace_config();
    cfg.epsilon = 4.0;
    cfg.target_n = 400;
    cfg.max_itr = 50000;
    cfg.block_size = 64;

    const auto one = afc_run(model, inverse, x, cfg, RandomSource(15), 1);
    const auto again = afc_run(model, inverse, x, cfg, RandomSource(15), 1);
    const auto four = afc_run(model, inverse, x, cfg, RandomSource(15), 4);

    CHECK(one.proposals_used == again.proposals_used);
    CHECK((one.samples - again.samples).norm() == 0.0);
    CHECK(one.proposals_used == four.proposals_used);
    REQUIRE(one.n_kept() == four.n_kept());
    CHECK((one.samples - four.samples).norm() == 0.0);
    CHECK(one.distances == four.distances);
    CHECK(one.proposal_index == four.proposal_index);
}

TEST_CASE("budget exhaustion with zero acceptances raises a diagnostic error") {
    LaplaceLocationScale model(40);
    const Vector x = laplace_observation(model, 7);
    AnalyticInverse inverse(model);
    AfcConfig cfg = laplace_config();
    cfg.epsilon = 1e-12;  // unreachable for m = 40
    cfg.target_n = 10;
    cfg.max_itr = 2000;
    try {
        afc_run(model, inverse, x, cfg, RandomSource(16));
        FAIL("expected AfcNoAcceptError");
    } catch (const AfcNoAcceptError& e) {
        CHECK_FALSE(e.observed_distances.empty());
        CHECK(std::string(e.what()).find("observed distances") != std::string::npos);
    }
}

TEST_CASE("select_threshold hits the requested acceptance band") {
    LaplaceLocationScale model(100);
    const Vector x = laplace_observation(model, 8);
    AnalyticInverse inverse(model);

    AfcConfig cfg = laplace_config();
    cfg.threshold_quantile = 0.05;
    cfg.pilot_size = 10000;
    const RandomSource rng(17);
    const double eps = select_threshold(model, inverse, x, cfg, rng);
    CHECK(eps > 0.0);

    cfg.epsilon = eps;
    cfg.target_n = 20000;  // target equals the budget: classify everything
    cfg.max_itr = 20000;
    const auto set = afc_run(model, inverse, x, cfg, rng);
    const double rate = set.acceptance_rate;
    CHECK(rate > 0.03);
    CHECK(rate < 0.07);
}

TEST_CASE("threshold_quantile of one accepts nearly everything") {
    LaplaceLocationScale model(50);
    const Vector x = laplace_observation(model, 9);
    AnalyticInverse inverse(model);
    AfcConfig cfg = laplace_config();
    cfg.threshold_quantile = 1.0;
    cfg.pilot_size = 2000;
    const RandomSource rng(18);
    const double eps = select_threshold(model, inverse, x, cfg, rng);

    cfg.epsilon = eps;
    cfg.target_n = 5000;
    cfg.max_itr = 5000;
    const auto set = afc_run(model, inverse, x, cfg, rng);
    CHECK(set.acceptance_rate > 0.95);
}

TEST_CASE("auto-threshold pipeline uses disjoint pilot and run streams") {
    LaplaceLocationScale model(60);
    const Vector x = laplace_observation(model, 10);
    AnalyticInverse inverse(model);
    AfcConfig cfg = laplace_config();
    cfg.auto_threshold = true;
    cfg.threshold_quantile = 0.10;
    cfg.pilot_size = 2000;
    cfg.target_n = 200;
    const auto set = afc_sample(model, inverse, x, cfg, RandomSource(19));
    CHECK(set.n_accepted() == 200);
    CHECK(std::isfinite(set.epsilon));
    // Acceptance close to the quantile, not exactly its pilot value.
    CHECK(set.acceptance_rate > 0.03);
    CHECK(set.acceptance_rate < 0.3);
}

TEST_CASE("config validation rejects inconsistent settings") {
    AfcConfig cfg;
    cfg.target_n = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = AfcConfig{};
    cfg.max_itr = 5;
    cfg.target_n = 10;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = AfcConfig{};
    cfg.threshold_quantile = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = AfcConfig{};
    cfg.epsilon = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("default budget rule caps at 1e8") {
    AfcConfig cfg;
    cfg.target_n = 1000;
    cfg.threshold_quantile = 0.05;
    CHECK(cfg.resolved_max_itr() == 2000000);
    cfg.threshold_quantile = 1e-6;
    CHECK(cfg.resolved_max_itr() == 100000000);
}

TEST_SUITE_END();
