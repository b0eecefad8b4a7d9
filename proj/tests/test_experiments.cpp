#include "tcsde/errors.hpp"
#include "tcsde/experiments.hpp"
#include "tcsde/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tcsde;

namespace {

const std::vector<double> kPaperGrid = {2e-2, 1e-2, 4e-3, 2e-3, 1e-3};

ModelDescriptor frozen(double x0) {
    ModelDescriptor m;
    m.name = "frozen";
    m.drift = [](double, double) { return 0.0; };
    m.diffusion = [](double, double) { return 0.0; };
    m.drift_dx = [](double, double) { return 0.0; };
    m.x0 = x0;
    m.lambda = 1.0;
    m.k5 = 1.0;
    return m;
}

StrongErrorReport synthetic(const std::vector<double>& deltas, double c, double order) {
    StrongErrorReport r;
    for (double d : deltas) {
        const double rmse = c * std::pow(d, order);
        r.rows.push_back({d, rmse * rmse, 0.0, 100});
    }
    return r;
}

}  // namespace

TEST_CASE("pairwise summation and sample statistics") {
    std::vector<double> v(1001);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = static_cast<double>(i);
    }
    CHECK(pairwise_sum(v) == 500500.0);
    const auto s = sample_stats(std::vector<double>{1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(default_reference_delta(1e-3) == doctest::Approx(1e-4));
    CHECK(default_reference_delta(3e-4) == doctest::Approx(1e-4));
    CHECK(default_reference_delta(2.5e-4) == doctest::Approx(2.5e-4 / 3.0));
}

TEST_CASE("for_each_path covers every index and rethrows the lowest failure") {
    MonteCarloConfig mc{97, 1, 4};
    std::vector<int> hits(97, 0);
    for_each_path(mc, [&](std::size_t i) { ++hits[i]; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    try {
        for_each_path(mc, [](std::size_t i) {
            if (i == 40 || i == 13 || i == 90) {
                throw std::runtime_error("path " + std::to_string(i));
            }
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "path 13");
    }
}

TEST_CASE("fit_order") {
    const auto fit = fit_order(synthetic(kPaperGrid, 0.7, 0.45));
    CHECK(std::abs(fit.slope - 0.45) <= 1e-12);
    CHECK(std::abs(fit.intercept - std::log(0.7)) <= 1e-12);
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.warnings.empty());

    auto with_zero = synthetic(kPaperGrid, 0.7, 0.45);
    with_zero.rows[2].mse = 0.0;
    const auto fit2 = fit_order(with_zero);
    CHECK(std::abs(fit2.slope - 0.45) <= 1e-12);
    CHECK(fit2.warnings.size() == 1);

    auto short_report = synthetic({1e-2, 1e-3, 1e-4}, 1.0, 0.5);
    short_report.rows[0].mse = 0.0;
    CHECK_THROWS_AS(fit_order(short_report), FitError);
}

TEST_CASE("strong_error against a fine grid at the reference step is exactly zero") {
    StrongErrorOptions opts;
    opts.reference_delta = 1e-3;
    const auto report = strong_error(make_builtin(builtin::BoundedNonlinear{}), StabilityIndex(0.9),
                                     1.0, {4e-3, 1e-3, 2e-3}, 1.0, MonteCarloConfig{40, 3, 0}, opts);
    CHECK(report.reference_rule.kind == ReferenceRule::Kind::fine_grid);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].delta == 4e-3);
    CHECK(report.rows[2].delta == 1e-3);
    CHECK(report.rows[2].mse == 0.0);
    CHECK(report.rows[0].mse > 0.0);
    for (const auto& row : report.rows) {
        CHECK(row.mse >= 0.0);
        CHECK(row.n_eff == 40);
    }
}

TEST_CASE("strong_error in the noise-free limit matches the backward Euler error") {
    const double mu = 0.5;
    const double delta = 1e-3;
    const auto m = make_builtin(builtin::BlackScholes{mu, 0.0, 1.0});
    const auto report = strong_error(m, StabilityIndex(1.0), 1.0, {4e-3, 2e-3, delta}, 1.0,
                                     MonteCarloConfig{4, 1, 0});
    CHECK(report.reference_rule.kind == ReferenceRule::Kind::closed_form);
    const double predicted = std::pow(std::exp(mu) * mu * mu * delta / 2.0, 2.0);
    const double mse = report.rows.back().mse;
    CHECK(mse <= 3.0 * predicted);
    CHECK(mse >= predicted / 3.0);
}

TEST_CASE("strong_error rejects uncoupled grids") {
    StrongErrorOptions opts;
    opts.reference_delta = 2e-3;
    CHECK_THROWS_AS(strong_error(make_builtin(builtin::BoundedNonlinear{}), StabilityIndex(0.9), 1.0,
                                 {4e-3, 3e-3, 2e-3}, 1.0, MonteCarloConfig{5, 1, 0}, opts),
                    ConfigurationError);
}

TEST_CASE("reports are bit-identical at any concurrency") {
    const auto m = make_builtin(builtin::BlackScholes{});
    auto run = [&](std::size_t workers) {
        return strong_error(m, StabilityIndex(0.9), 1.0, {2e-2, 1e-2, 4e-3}, 1.0,
                            MonteCarloConfig{64, 77, workers});
    };
    const auto a = run(1);
    const auto b = run(3);
    const auto c = run(8);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].mse == b.rows[i].mse);
        CHECK(a.rows[i].mse == c.rows[i].mse);
        CHECK(a.rows[i].se == c.rows[i].se);
    }

    const auto lin = make_builtin(builtin::StabilityLinear{});
    const auto s1 = stability_curve(lin, StabilityIndex(0.9), 1.0, 0.5, 40, MonteCarloConfig{50, 5, 1});
    const auto s2 = stability_curve(lin, StabilityIndex(0.9), 1.0, 0.5, 40, MonteCarloConfig{50, 5, 6});
    CHECK(s1.msq == s2.msq);
}

TEST_CASE("strong error decreases along the grid") {
    const auto report = strong_error(make_builtin(builtin::BlackScholes{}), StabilityIndex(0.9), 1.0,
                                     kPaperGrid, 1.0, MonteCarloConfig{500, 2024, 0});
    int inversions = 0;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto& coarse = report.rows[i - 1];
        const auto& fine = report.rows[i];
        if (fine.mse > coarse.mse) {
            ++inversions;
            CHECK(fine.mse - coarse.mse <= fine.se + coarse.se);
        }
    }
    CHECK(inversions <= 1);
}

TEST_CASE("fitted order grows with alpha on the mean-reverting model") {
    const auto m = make_builtin(builtin::MeanReverting{});
    const MonteCarloConfig mc{300, 2024, 0};
    StrongErrorOptions opts;
    const auto hi = fit_order(strong_error(m, StabilityIndex(0.9), 0.9, kPaperGrid, 1.0, mc, opts));
    const auto lo = fit_order(strong_error(m, StabilityIndex(0.55), 0.9, kPaperGrid, 1.0, mc, opts));
    INFO("slope at 0.9: " << hi.slope << ", slope at 0.55: " << lo.slope);
    CHECK(std::isfinite(hi.slope));
    CHECK(hi.slope > lo.slope);
}

TEST_CASE("frozen dynamics keep the second moment") {
    for (double theta : {0.0, 0.5, 1.0}) {
        const auto c = stability_curve(frozen(1.5), StabilityIndex(0.9), theta, 0.5, 20,
                                       MonteCarloConfig{10, 1, 0});
        REQUIRE(c.msq.size() == 21);
        for (double v : c.msq) {
            CHECK(v == 2.25);
        }
        CHECK_FALSE(c.divergent);
        CHECK_FALSE(c.truncated);
    }
}

TEST_CASE("stability of the linear test equation") {
    const auto m = make_builtin(builtin::StabilityLinear{});
    const MonteCarloConfig mc{300, 2024, 0};
    const StabilityIndex a(0.9);

    SUBCASE("theta >= 1/2 stays bounded for every step") {
        for (double theta : {0.5, 1.0}) {
            for (double delta : {2.0, 1.0, 0.5}) {
                const auto n = static_cast<std::size_t>(50.0 / delta);
                const auto c = stability_curve(m, a, theta, delta, n, mc);
                INFO("theta=" << theta << " delta=" << delta);
                CHECK_FALSE(c.divergent);
                REQUIRE(c.threshold.has_value());
                CHECK(c.threshold->stable);
                for (double v : c.msq) {
                    CHECK(v >= 0.0);
                }
                CHECK(c.envelope.has_value() == c.threshold->gamma.has_value());
            }
        }
    }
    SUBCASE("backward Euler with delta = 1 decays") {
        const auto c = stability_curve(m, a, 1.0, 1.0, 50, mc);
        CHECK(c.decayed);
        CHECK(c.msq.back() < 1e-3 * c.msq.front());
    }
    SUBCASE("explicit scheme with delta = 2 blows up") {
        const auto c = stability_curve(m, a, 0.0, 2.0, 25, mc);
        CHECK(c.divergent);
        CHECK_FALSE(c.threshold->stable);
    }
}

TEST_CASE("moment validation") {
    SUBCASE("alpha = 0.9, p = 1, t = 1") {
        const auto rows = moment_validation(StabilityIndex(0.9), {1}, {1.0}, 1e-3,
                                            MonteCarloConfig{10000, 2024, 0});
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].formula == doctest::Approx(1.0397541).epsilon(1e-7));
        CHECK(rows[0].within);
        CHECK(rows[0].empirical >= rows[0].formula - 1e-3 - 3.0 * rows[0].se);
        CHECK(rows[0].empirical <= rows[0].formula + 3.0 * rows[0].se);
    }
    SUBCASE("alpha = 1/2 formula") {
        const auto rows = moment_validation(StabilityIndex(0.5), {1}, {1.0}, 1e-3,
                                            MonteCarloConfig{50, 1, 0});
        CHECK(rows[0].formula == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-12));
    }
    SUBCASE("deterministic clock") {
        const auto rows = moment_validation(StabilityIndex(1.0), {2}, {3.0}, 0.1,
                                            MonteCarloConfig{20, 1, 0});
        CHECK(rows[0].formula == doctest::Approx(9.0));
        CHECK(std::abs(rows[0].empirical - 9.0) <= 2.0 * 0.1 * 3.0 + 0.01);
        CHECK(rows[0].se == 0.0);
        CHECK(std::isnan(rows[0].zscore));
    }
}

TEST_CASE("Mittag-Leffler envelope check") {
    const LyapunovCertificate cert{1.0, 1.0, 1.0, 2.0};
    const MonteCarloConfig mc{200, 2024, 0};
    SUBCASE("zero solution is inside any envelope") {
        const auto r = ml_envelope_check(frozen(0.0), StabilityIndex(0.9), cert, {0.0, 1.0, 5.0}, mc);
        CHECK(r.passed);
        for (const auto& row : r.rows) {
            CHECK(row.empirical == 0.0);
        }
    }
    SUBCASE("growing Black-Scholes moments break the envelope") {
        const auto r = ml_envelope_check(make_builtin(builtin::BlackScholes{0.5, 0.2, 1.0}),
                                         StabilityIndex(0.9), cert, {0.0, 1.0, 2.0, 5.0}, mc);
        CHECK_FALSE(r.passed);
        CHECK(r.max_ratio > 1.15);
    }
    SUBCASE("certificate validation") {
        CHECK_THROWS_AS(LyapunovCertificate({2.0, 1.0, 1.0, 2.0}).validate(), ConfigurationError);
        CHECK_THROWS_AS(LyapunovCertificate({1.0, 1.0, 0.0, 2.0}).validate(), ConfigurationError);
    }
}

TEST_CASE("exact moment bound check") {
    const MonteCarloConfig mc{400, 2024, 0};
    SUBCASE("bounded nonlinear model, t = 0 included") {
        const auto r = exact_moment_bound_check(make_builtin(builtin::BoundedNonlinear{}),
                                                StabilityIndex(0.9), 1.0, {0.0, 0.25, 0.5, 1.0}, mc);
        CHECK(r.passed);
        REQUIRE(r.rows.size() == 4);
        CHECK(r.rows[0].empirical == 1.0);
        CHECK(r.rows[0].bound == doctest::Approx(2.0));
    }
    SUBCASE("deterministic clock on the linear stability model: decay under a growing bound") {
        const auto r = exact_moment_bound_check(make_builtin(builtin::StabilityLinear{}),
                                                StabilityIndex(1.0), 1.0, {0.5, 1.0, 2.0}, mc);
        CHECK(r.passed);
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            CHECK(r.rows[i].empirical < r.rows[i].bound);
            if (i > 0) {
                CHECK(r.rows[i].empirical < r.rows[i - 1].empirical);
                CHECK(r.rows[i].bound > r.rows[i - 1].bound);
            }
        }
    }
    SUBCASE("K1 is required") {
        auto m = make_builtin(builtin::BoundedNonlinear{});
        m.k1.reset();
        CHECK_THROWS_AS(exact_moment_bound_check(m, StabilityIndex(0.9), 1.0, {1.0}, mc),
                        ConfigurationError);
    }
}
