#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fidkit/inference.hpp"
#include "fidkit/models.hpp"

using namespace fidkit;

namespace {

EmpiricalGFD gfd_from(const std::vector<double>& values) {
    Matrix m(1, static_cast<int>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) m(0, static_cast<int>(i)) = values[i];
    return EmpiricalGFD(m);
}

std::vector<double> one_to_hundred() {
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[i] = i + 1;
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("inference");

TEST_CASE("quantile interpolation on 1..100") {
    const auto gfd = gfd_from(one_to_hundred());
    CHECK(quantile(gfd, 0, 0.5) == doctest::Approx(50.5));
    // h = 99 * 0.05 + 1 = 5.95 under the order-statistic rule.
    CHECK(quantile(gfd, 0, 0.05) == doctest::Approx(5.95));
    CHECK(quantile(gfd, 0, 0.0) == 1.0);
    CHECK(quantile(gfd, 0, 1.0) == 100.0);
    CHECK_THROWS(quantile(gfd, 0, 1.5));
}

TEST_CASE("quantile is non-decreasing in p and intervals nest") {
    RandomSource rng(21);
    std::vector<double> values(257);
    for (auto& v : values) v = rng.laplace();
    const auto gfd = gfd_from(values);
    double prev = quantile(gfd, 0, 0.0);
    for (int i = 1; i <= 100; ++i) {
        const double q = quantile(gfd, 0, i / 100.0);
        CHECK(q >= prev);
        prev = q;
    }
    const auto inner = confidence_interval(gfd, 0, 0.5);
    const auto outer = confidence_interval(gfd, 0, 0.9);
    CHECK(outer.first <= inner.first);
    CHECK(inner.second <= outer.second);
    CHECK(inner.first <= inner.second);
}

TEST_CASE("confidence interval quantile pair and degenerate sample") {
    const auto gfd = gfd_from(one_to_hundred());
    const auto [lo, hi] = confidence_interval(gfd, 0, 0.9);
    CHECK(lo == doctest::Approx(quantile(gfd, 0, 0.05)));
    CHECK(hi == doctest::Approx(quantile(gfd, 0, 0.95)));

    const auto constant = gfd_from({3.3, 3.3, 3.3, 3.3});
    const auto [clo, chi] = confidence_interval(constant, 0, 0.9);
    CHECK(clo == 3.3);
    CHECK(chi == 3.3);
    CHECK_THROWS(confidence_interval(gfd, 0, 0.0));
}

TEST_CASE("point estimates") {
    const auto gfd = gfd_from({1, 2, 3});
    const auto [mean, median] = point_estimates(gfd, 0);
    CHECK(mean == doctest::Approx(2.0));
    CHECK(median == doctest::Approx(2.0));

    // Symmetric samples: mean = median = center.
    const auto sym = gfd_from({-2, -1, 0, 1, 2});
    const auto [smean, smedian] = point_estimates(sym, 0);
    CHECK(smean == doctest::Approx(0.0));
    CHECK(smedian == doctest::Approx(0.0));
}

TEST_CASE("mean matches a compensated-summation oracle") {
    RandomSource rng(22);
    std::vector<double> values(10001);
    for (auto& v : values) v = rng.uniform(-1e6, 1e6);
    const auto gfd = gfd_from(values);
    const auto [mean, median] = point_estimates(gfd, 0);
    (void)median;

    // Kahan summation as the independent route.
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const double oracle = sum / values.size();
    CHECK(std::abs(mean - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
}

TEST_CASE("confidence curve matches the brute-force CDF oracle") {
    RandomSource rng(23);
    std::vector<double> values(501);
    for (auto& v : values) v = rng.normal();
    const auto gfd = gfd_from(values);
    GridSpec spec;
    spec.n_points = 257;
    const ConfidenceCurve curve = confidence_curve(gfd, 0, spec);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        const double t = curve.grid[i];
        // Brute-force empirical CDF: direct count.
        int count = 0;
        for (double v : sorted) count += (v <= t) ? 1 : 0;
        const double r = static_cast<double>(count) / sorted.size();
        CHECK(curve.cc_values[i] == doctest::Approx(2.0 * std::abs(r - 0.5)).epsilon(1e-14));
        CHECK(curve.cc_values[i] >= 0.0);
        CHECK(curve.cc_values[i] <= 1.0);
    }
}

TEST_CASE("confidence curve touches zero at the median and is one outside") {
    RandomSource rng(24);
    std::vector<double> values(1001);
    for (auto& v : values) v = rng.laplace();
    const auto gfd = gfd_from(values);
    const ConfidenceCurve curve = confidence_curve(gfd, 0);

    const double at_median = 2.0 * std::abs(gfd.cdf(0, curve.median) - 0.5);
    CHECK(at_median <= 1.0 / gfd.n_fid() + 1e-12);

    const double below = curve.grid.front();
    CHECK(2.0 * std::abs(gfd.cdf(0, below - 1.0) - 0.5) == doctest::Approx(1.0));

    // The cc curve crossing at level alpha brackets the alpha interval.
    const auto [lo, hi] = curve.intervals.at(0.9);
    CHECK(lo <= hi);
    CHECK(gfd.cdf(0, lo) <= 0.05 + 1.0 / gfd.n_fid() + 1e-12);
    CHECK(gfd.cdf(0, hi) >= 0.95 - 1.0 / gfd.n_fid() - 1e-12);
}

TEST_CASE("coverage study on a degenerate single replicate") {
    LaplaceLocationScale model(2);
    AnalyticInverse inverse(model);
    CoverageConfig cfg;
    cfg.true_params.push_back((Vector(2) << 0.0, 1.0).finished());
    cfg.n_datasets = 1;
    cfg.afc.target_n = 50;
    cfg.afc.max_itr = 50;
    cfg.afc.sort_noise = true;
    const CoverageReport report = coverage_study(model, inverse, cfg, RandomSource(25));
    REQUIRE(report.rows.size() == 2);
    for (const auto& row : report.rows) {
        CHECK((row.coverage == 0.0 || row.coverage == 1.0));
        CHECK(row.n_replicates == 1);
    }
    CHECK(report.replicates.size() == 1);
}

TEST_CASE("coverage aggregates are recomputable from the replicate records") {
    LaplaceLocationScale model(20);
    AnalyticInverse inverse(model);
    CoverageConfig cfg;
    cfg.true_params.push_back((Vector(2) << 0.0, 1.0).finished());
    cfg.n_datasets = 40;
    cfg.afc.target_n = 200;
    cfg.afc.max_itr = 200;
    cfg.afc.sort_noise = true;
    const CoverageReport report = coverage_study(model, inverse, cfg, RandomSource(26), 2);

    for (int coord = 0; coord < 2; ++coord) {
        double cover = 0, len = 0;
        for (const auto& rec : report.replicates) {
            REQUIRE_FALSE(rec.failed);
            cover += rec.covered[coord];
            len += rec.ci_length[coord];
        }
        const auto& row = report.rows[coord];
        CHECK(row.coverage == doctest::Approx(cover / 40.0));
        CHECK(row.expected_ci_length == doctest::Approx(len / 40.0));
    }
}

TEST_CASE("coverage study is thread-count invariant") {
    LaplaceLocationScale model(10);
    AnalyticInverse inverse(model);
    CoverageConfig cfg;
    cfg.true_params.push_back((Vector(2) << 0.0, 1.0).finished());
    cfg.n_datasets = 12;
    cfg.afc.target_n = 100;
    cfg.afc.max_itr = 100;
    cfg.afc.sort_noise = true;
    const CoverageReport a = coverage_study(model, inverse, cfg, RandomSource(27), 1);
    const CoverageReport b = coverage_study(model, inverse, cfg, RandomSource(27), 4);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].coverage == b.rows[i].coverage);
        CHECK(a.rows[i].expected_ci_length == b.rows[i].expected_ci_length);
        CHECK(a.rows[i].expected_mean == b.rows[i].expected_mean);
        CHECK(a.rows[i].expected_median == b.rows[i].expected_median);
    }
}

TEST_SUITE_END();
