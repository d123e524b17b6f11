#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ssmrec/theory.hpp"

using namespace ssmrec;
using namespace ssmrec::theory;

TEST_CASE("finite differences recover known derivatives") {
    auto square = [](std::span<const double> x) { return x[0] * x[0]; };
    std::vector<double> at = {3.0};
    auto g = finite_diff_grad(square, at, 1e-6);
    CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-7));

    auto affine = [](std::span<const double> x) { return 2.5 * x[0] - 4.0 * x[1] + 1.0; };
    std::vector<double> at2 = {0.7, -1.3};
    auto g2 = finite_diff_grad(affine, at2, 1e-5);
    CHECK(std::abs(g2[0] - 2.5) < 1e-10);
    CHECK(std::abs(g2[1] + 4.0) < 1e-10);

    CHECK_THROWS_AS(finite_diff_grad(square, at, 1e-3), std::invalid_argument);
}

TEST_CASE("closed-form optimum") {
    // zero sampling probability leaves only the partition term
    CHECK(closed_form_score(0.0, 100, 2, 1.7) == doctest::Approx(1.7));
    // two-item instance: difference is log(51/151)
    double diff = closed_form_score(0.75, 100, 2, 0.0) - closed_form_score(0.25, 100, 2, 0.0);
    CHECK(diff == doctest::Approx(std::log(51.0 / 151.0)).epsilon(1e-12));
    CHECK(diff == doctest::Approx(-1.0853).epsilon(1e-4));
    // strictly decreasing in the sampling probability
    double prev = closed_form_score(0.05, 100, 3, 0.0);
    for (double p : {0.1, 0.2, 0.4, 0.8}) {
        double cur = closed_form_score(p, 100, 3, 0.0);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("free score fit: symmetric instance converges to equal scores") {
    std::vector<double> p_n = {0.5, 0.5};
    std::vector<std::pair<int, int>> interactions = {{0, 0}, {0, 1}};
    auto fit = fit_free_score_table(p_n, 100, interactions, 6000, 0.1, 13);
    CHECK(fit.converged);
    CHECK(std::abs(fit.scores(0, 0) - fit.scores(0, 1)) < 0.01);
}

TEST_CASE("free score fit: doubling the negative count moves the partition by log 2") {
    // Softmax gradients sum to zero over the table, so SGD pins the score
    // mean at its initialization: doubling N preserves the differences and
    // pushes the log-partition (not the raw scores) up by about log 2.
    std::vector<double> p_n = {0.75, 0.25};
    std::vector<std::pair<int, int>> interactions = {{0, 0}, {0, 1}};
    auto fit_n = fit_free_score_table(p_n, 100, interactions, 12000, 0.1, 17);
    auto fit_2n = fit_free_score_table(p_n, 200, interactions, 12000, 0.1, 17);
    REQUIRE(fit_n.converged);
    REQUIRE(fit_2n.converged);
    double diff_n = fit_n.scores(0, 0) - fit_n.scores(0, 1);
    double diff_2n = fit_2n.scores(0, 0) - fit_2n.scores(0, 1);
    CHECK(std::abs(diff_n - diff_2n) < 0.02);

    auto log_partition = [&](const Matrix& f, int negatives) {
        return std::log(negatives * (p_n[0] * std::exp(f(0, 0)) + p_n[1] * std::exp(f(0, 1))));
    };
    double lz_n = log_partition(fit_n.scores, 100);
    double lz_2n = log_partition(fit_2n.scores, 200);
    CHECK(lz_2n - lz_n == doctest::Approx(std::log(2.0)).epsilon(0.05));

    // per-item self-consistency against the closed form at the fitted partition
    for (int i = 0; i < 2; ++i) {
        CHECK(fit_n.scores(0, i) ==
              doctest::Approx(closed_form_score(p_n[i], 100, 2, lz_n)).epsilon(0.03));
        CHECK(fit_2n.scores(0, i) ==
              doctest::Approx(closed_form_score(p_n[i], 200, 2, lz_2n)).epsilon(0.03));
    }
}

TEST_CASE("free score fit input validation") {
    CHECK_THROWS_AS(fit_free_score_table({0.6, 0.6}, 10, {{0, 0}}, 10, 0.1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_free_score_table({1.0}, 10, {}, 10, 0.1, 1), std::invalid_argument);
}

TEST_CASE("negative gradient magnitude closed form") {
    std::vector<double> e1 = {1.0, 0.0, 0.0};
    std::vector<double> e2 = {0.0, 1.0, 0.0};
    // collinear: projector annihilates the direction
    CHECK(negative_grad_magnitude(e1, e1, 0.2, 2.0) == doctest::Approx(0.0));
    // orthogonal with unit partition: sqrt(1)*exp(0)/1
    CHECK(negative_grad_magnitude(e1, e2, 0.2, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> not_unit = {2.0, 0.0, 0.0};
    CHECK_THROWS_AS(negative_grad_magnitude(not_unit, e2, 0.2, 1.0), std::invalid_argument);
}

TEST_CASE("hardest negative sits strictly inside (0, 1) for moderate temperatures") {
    for (double tau : {0.1, 0.2, 0.3}) {
        double best_x = -1.0, best = -1.0;
        for (int k = 0; k <= 2000; ++k) {
            double x = -1.0 + 2.0 * k / 2000.0;
            double v = std::sqrt(1.0 - x * x) * std::exp(x / tau);
            if (v > best) {
                best = v;
                best_x = x;
            }
        }
        CHECK(best_x > 0.0);
        CHECK(best_x < 1.0);
    }
}

TEST_CASE("dcg bound trivial cases") {
    std::vector<double> margin1 = {1.0, 0.0};
    auto r = dcg_bound_check(margin1, 0);
    CHECK(r.neg_log_dcg == doctest::Approx(0.0));
    CHECK(r.sm_loss == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));
    CHECK(r.ok);

    std::vector<double> equal = {0.5, 0.5, 0.5};
    auto r2 = dcg_bound_check(equal, 1);  // no strict dominator: rank 1
    CHECK(r2.neg_log_dcg == doctest::Approx(0.0));
    CHECK(r2.ok);
}

TEST_CASE("pareto sampler basics") {
    ParetoParams params{3.0, 1.0};
    Rng rng(23);
    double min_seen = 1e300;
    int above2 = 0;
    const int draws = 200000;
    for (int t = 0; t < draws; ++t) {
        double x = pareto_sample(params, rng);
        min_seen = std::min(min_seen, x);
        if (x >= 2.0) ++above2;
    }
    CHECK(min_seen >= 1.0);  // scale is the lower support bound
    // survival at 2 is 2^-3 = 0.125
    double p = static_cast<double>(above2) / draws;
    CHECK(std::abs(p - 0.125) < 3.0 * std::sqrt(0.125 * 0.875 / draws));
}

TEST_CASE("expected squared magnitude closed form") {
    MagnitudeModel zero_mean{0.5, 0.5, 0.0, 1.0, 0.0, 0.0};
    // zero mean kills b; a = alpha/(alpha + 2*alpha1) = 3/4
    CHECK(expected_sq_magnitude(zero_mean, 3.0, 1.0) == doctest::Approx(0.75));
    CHECK(expected_sq_magnitude(zero_mean, 3.0, 16.0) == doctest::Approx(0.75));

    MagnitudeModel steep{1.0, 0.5, 0.0, 1.0, 0.0, 0.0};
    CHECK(expected_sq_magnitude(steep, 3.0, 4.0) == doctest::Approx(0.75 / 4.0));

    MagnitudeModel lightgcn{0.5, 0.5, 0.3, 1.0, 0.0, 0.0};
    lightgcn.derive_coefficients(3.0);
    CHECK(lightgcn.b == doctest::Approx(9.0 * 0.09 / (3.5 * 3.5)));
    CHECK(expected_sq_magnitude(lightgcn, 3.0, 8.0) ==
          doctest::Approx(lightgcn.a + 8.0 * lightgcn.b));

    CHECK_THROWS_AS(expected_sq_magnitude(zero_mean, 0.9, 2.0), std::invalid_argument);
    MagnitudeModel bad{0.5, 1.2, 0.0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(expected_sq_magnitude(bad, 2.3, 2.0), std::invalid_argument);
}

TEST_CASE("monte carlo magnitude agrees with the closed form on a small budget") {
    auto points = magnitude_monte_carlo(3.0, 0.5, 0.5, 0.0, 1.0, {1, 4, 16}, 20000, 31);
    for (const auto& p : points) {
        double tol = std::max(0.03 * p.expected, 4.0 * p.std_error);
        CHECK(std::abs(p.empirical - p.expected) <= tol);
    }
}

TEST_CASE("suite wiring") {
    CHECK_THROWS_AS(run_suite("bogus"), std::invalid_argument);
    auto results = run_suite("dcg");
    REQUIRE(results.size() == 1);
    CHECK(results[0].name == "dcg_bound");
    CHECK(results[0].pass);
    CHECK(results[0].trials == 10000);

    SuiteOptions corrupt;
    corrupt.inject_failure = true;
    auto bad = run_suite("gradients", corrupt);
    CHECK_FALSE(bad[0].pass);
}
