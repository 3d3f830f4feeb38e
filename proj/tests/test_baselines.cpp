#include <cmath>

#include "doctest.h"
#include "fidkit/baselines.hpp"
#include "fidkit/models.hpp"

using namespace fidkit;

namespace {

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<int>(values.size()));
    int i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

double d_of(const Matrix& a) { return std::sqrt((a.transpose() * a).determinant()); }

}  // namespace

TEST_SUITE_BEGIN("baselines");

TEST_CASE("jacobian factor hand values") {
    // Square identity gradient.
    CHECK(d_of(Matrix::Identity(2, 2)) == doctest::Approx(1.0));

    // Laplace with x=(0,2), mu=(0,1): implied z=(0,2), A=[[1,0],[1,2]],
    // A'A=[[2,2],[2,4]], det=4, D=2.
    LaplaceLocationScale model(2);
    CHECK(jacobian_factor(model, vec({0, 2}), vec({0, 1})) == doctest::Approx(2.0));
}

TEST_CASE("D is homogeneous of degree p in column scaling") {
    RandomSource rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a(5, 2);
        for (int i = 0; i < a.size(); ++i) a(i / 2, i % 2) = rng.normal();
        const double c = rng.uniform(0.1, 3.0);
        CHECK(d_of(c * a) == doctest::Approx(c * c * d_of(a)).epsilon(1e-9));
    }
}

TEST_CASE("D equals |det| for square matrices") {
    RandomSource rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix a(2, 2);
        a << rng.normal(), rng.normal(), rng.normal(), rng.normal();
        CHECK(d_of(a) == doctest::Approx(std::abs(a.determinant())).epsilon(1e-9));
    }
}

TEST_CASE("jacobian_factor matches a finite-difference gradient construction") {
    BodModel model;
    RandomSource rng(33);
    const Vector mu = vec({0.85, 0.12});
    const Vector z = model.sample_noise(rng);
    const Vector y = model.forward(mu, z);

    // Rebuild A by central differences of the forward map at the implied z.
    const Vector zi = model.implied_noise(y, mu);
    Matrix fd(model.data_dim(), 2);
    for (int c = 0; c < 2; ++c) {
        const double h = 1e-6 * (1.0 + std::abs(mu[c]));
        Vector hi = mu, lo = mu;
        hi[c] += h;
        lo[c] -= h;
        fd.col(c) = (model.forward(hi, zi) - model.forward(lo, zi)) / (2.0 * h);
    }
    const double expected = d_of(fd);
    CHECK(jacobian_factor(model, y, mu) ==
          doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("log likelihood closed forms") {
    SUBCASE("laplace m=1 at the mode") {
        LaplaceLocationScale model(1);
        CHECK(log_likelihood(model, vec({0.0}), vec({0.0, 1.0})) ==
              doctest::Approx(std::log(0.5)).epsilon(1e-14));
    }
    SUBCASE("laplace closed form at random points") {
        LaplaceLocationScale model(6);
        RandomSource rng(34);
        for (int trial = 0; trial < 25; ++trial) {
            Vector x(6);
            for (int i = 0; i < 6; ++i) x[i] = rng.uniform(-3, 3);
            const double theta = rng.uniform(-1, 1);
            const double sigma = rng.uniform(0.3, 2.5);
            double expected = 0.0;
            for (int i = 0; i < 6; ++i) {
                expected += -std::log(2.0 * sigma) - std::abs(x[i] - theta) / sigma;
            }
            CHECK(log_likelihood(model, x, vec({theta, sigma})) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
    SUBCASE("bod at the truth with zero residuals") {
        BodModel model;
        const Vector truth = vec({0.9, 0.1});
        const Vector y = model.forward(truth, Vector::Zero(5));
        const double sigma = model.sigma();
        const double expected = 5.0 * (-0.5 * std::log(2.0 * M_PI * sigma * sigma));
        CHECK(log_likelihood(model, y, truth) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("bod likelihood is invariant under a common permutation") {
        // i.i.d. product: permuting data together with design leaves it unchanged.
        BodModel base({2, 4, 6, 8, 10}, 0.015);
        BodModel permuted({10, 8, 6, 4, 2}, 0.015);
        const Vector y = vec({0.152, 0.296, 0.413, 0.482, 0.567});
        Vector y_rev(5);
        for (int i = 0; i < 5; ++i) y_rev[i] = y[4 - i];
        const Vector mu = vec({0.9, 0.1});
        CHECK(log_likelihood(base, y, mu) ==
              doctest::Approx(log_likelihood(permuted, y_rev, mu)).epsilon(1e-13));
    }
    SUBCASE("domain violations are errors") {
        LaplaceLocationScale model(3);
        CHECK_THROWS_AS(log_likelihood(model, Vector::Zero(3), vec({0.0, 0.0})), DomainError);
        NonlinearPower nl(3.0, 3);
        CHECK_THROWS_AS(log_likelihood(nl, Vector::Zero(3), vec({0.0})), DomainError);
    }
}

TEST_CASE("density grid normalizes to unit mass") {
    NonlinearPower model(3.0, 3);
    RandomSource rng(35);
    const Vector z = model.sample_noise(rng);
    const Vector x = model.forward(vec({2.0}), z);
    const DensityGrid grid = fiducial_density_grid(model, x, {{0.05, 8.0, 400}});
    CHECK(grid.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
    for (double v : grid.values) CHECK(v >= 0.0);
}

TEST_CASE("doubling the grid resolution moves the CDF by little") {
    NonlinearPower model(3.0, 3);
    RandomSource rng(36);
    const Vector z = model.sample_noise(rng);
    const Vector x = model.forward(vec({2.5}), z);
    const DensityGrid coarse = fiducial_density_grid(model, x, {{0.05, 9.0, 400}});
    const DensityGrid fine = fiducial_density_grid(model, x, {{0.05, 9.0, 799}});
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        CHECK(std::abs(coarse.marginal_quantile(0, p) - fine.marginal_quantile(0, p)) <=
              1e-3 * (9.0 - 0.05));
    }
}

TEST_CASE("grid missing the support is an error") {
    BodModel model;
    const Vector y = vec({0.152, 0.296, 0.413, 0.482, 0.567});
    CHECK_THROWS_AS(
        fiducial_density_grid(model, y, {{100.0, 200.0, 50}, {100.0, 200.0, 50}}),
        fidkit::Error);
}

TEST_CASE("metropolis recovers a standard normal") {
    MetropolisConfig cfg;
    cfg.initial = vec({0.0});
    cfg.step_scale = vec({2.4});
    cfg.chain_length = 55000;
    cfg.burn_in = 5000;
    RandomSource rng(37);
    const auto set = metropolis_sample(
        [](const Vector& v) { return -0.5 * v.squaredNorm(); }, cfg, rng);
    REQUIRE(set.n_kept() == 50000);
    double sum = 0, sq = 0;
    for (int j = 0; j < set.n_kept(); ++j) {
        sum += set.samples(0, j);
        sq += set.samples(0, j) * set.samples(0, j);
    }
    const double mean = sum / set.n_kept();
    const double var = sq / set.n_kept() - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);

    // Symmetric target: the empirical median sits near the center.
    std::vector<double> draws(set.samples.data(), set.samples.data() + set.n_kept());
    std::sort(draws.begin(), draws.end());
    CHECK(std::abs(draws[draws.size() / 2]) < 0.05);
}

TEST_CASE("metropolis with a hopeless step scale reports failure") {
    MetropolisConfig cfg;
    cfg.initial = vec({0.0});
    cfg.step_scale = vec({1e9});
    cfg.chain_length = 300;
    cfg.burn_in = 100;
    RandomSource rng(38);
    // A razor-thin target: virtually every huge jump is rejected.
    CHECK_THROWS_AS(metropolis_sample(
                        [](const Vector& v) { return -5e8 * v.squaredNorm(); }, cfg, rng),
                    fidkit::Error);
}

TEST_CASE("parametric bootstrap collapses as the noise vanishes") {
    BodModel tight({2, 4, 6, 8, 10}, 1e-6);
    const Vector y = tight.forward(vec({0.9, 0.1}), Vector::Zero(5));
    const BootstrapRun run = parametric_bootstrap(tight, y, 60, RandomSource(39));
    CHECK(run.n_dropped == 0);
    for (int j = 0; j < run.cloud.n_kept(); ++j) {
        CHECK(std::abs(run.cloud.samples(0, j) - run.estimate[0]) < 1e-4);
        CHECK(std::abs(run.cloud.samples(1, j) - run.estimate[1]) < 1e-4);
    }
}

TEST_CASE("bootstrap mean is consistent with the fit at small noise") {
    // Small sigma keeps the refit surface near-linear, where the bootstrap
    // mean of t1 tracks the estimate to within Monte Carlo error.
    BodModel model({2, 4, 6, 8, 10}, 0.003);
    RandomSource data_rng(99);
    const Vector y = model.forward(vec({0.9, 0.1}), model.sample_noise(data_rng));
    const BootstrapRun run = parametric_bootstrap(model, y, 400, RandomSource(40), 2);
    CHECK(run.cloud.n_kept() >= 380);

    double mean_t1 = 0;
    for (int j = 0; j < run.cloud.n_kept(); ++j) mean_t1 += run.cloud.samples(0, j);
    mean_t1 /= run.cloud.n_kept();
    double sd_t1 = 0;
    for (int j = 0; j < run.cloud.n_kept(); ++j) {
        sd_t1 += (run.cloud.samples(0, j) - mean_t1) * (run.cloud.samples(0, j) - mean_t1);
    }
    sd_t1 = std::sqrt(sd_t1 / run.cloud.n_kept());
    const double se = sd_t1 / std::sqrt(double(run.cloud.n_kept()));
    CHECK(std::abs(mean_t1 - run.estimate[0]) <= 3.0 * se + 1e-4);
}

TEST_CASE("bootstrap on the shipped BOD data produces the banana cloud") {
    BodModel model;
    const Vector y = vec({0.152, 0.296, 0.413, 0.482, 0.567});
    const BootstrapRun run = parametric_bootstrap(model, y, 400, RandomSource(40), 2);
    CHECK(run.cloud.n_kept() + run.n_dropped == 400);
    CHECK(run.cloud.n_kept() >= 350);
    CHECK(run.estimate[0] == doctest::Approx(0.9).epsilon(0.1));
    CHECK(run.estimate[1] == doctest::Approx(0.1).epsilon(0.1));

    // Banana signature: t1 and t2 are strongly negatively correlated.
    const int n = run.cloud.n_kept();
    double m1 = 0, m2 = 0;
    for (int j = 0; j < n; ++j) {
        m1 += run.cloud.samples(0, j);
        m2 += run.cloud.samples(1, j);
    }
    m1 /= n;
    m2 /= n;
    double c11 = 0, c22 = 0, c12 = 0;
    for (int j = 0; j < n; ++j) {
        const double d1 = run.cloud.samples(0, j) - m1;
        const double d2 = run.cloud.samples(1, j) - m2;
        c11 += d1 * d1;
        c22 += d2 * d2;
        c12 += d1 * d2;
    }
    CHECK(c12 / std::sqrt(c11 * c22) < -0.6);
}

TEST_SUITE_END();
