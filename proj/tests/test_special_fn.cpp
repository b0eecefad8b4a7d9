#include "tcsde/errors.hpp"
#include "tcsde/special_fn.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <variant>

using namespace tcsde;

namespace {

// ln Gamma(x) = ln Gamma(x + n) - sum ln(x + k), Stirling series for the shifted argument.
double lgamma_oracle(double x) {
    using R = boost::multiprecision::cpp_bin_float_100;
    const int n = 60;
    R z = R(x) + n;
    R lg = (z - R(0.5)) * log(z) - z + log(2 * boost::math::constants::pi<R>()) / 2;
    // Bernoulli terms B_{2k} / (2k (2k-1) z^{2k-1})
    const double b[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
                        7.0 / 6};
    R zp = z;
    for (int k = 1; k <= 7; ++k) {
        lg += R(b[k - 1]) / (R(2 * k) * (2 * k - 1) * zp);
        zp *= z * z;
    }
    for (int k = 0; k < n; ++k) {
        lg -= log(R(x) + k);
    }
    return static_cast<double>(lg);
}

// Power series in extended precision. The digit count has to absorb the
// cancellation on the negative axis, roughly |z|^{1/alpha} / ln 10 digits.
template <unsigned Digits>
double ml_series_mp(double alpha, double z) {
    using R = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>>;
    R sum = 0;
    R zk = 1;
    for (int k = 0; k < 5000; ++k) {
        const R term = zk / boost::math::tgamma(R(alpha) * k + 1);
        sum += term;
        if (k > 10 && abs(term) < R("1e-40") * abs(sum)) {
            break;
        }
        zk *= z;
    }
    return static_cast<double>(sum);
}

double ml_oracle(double alpha, double z) {
    const double peak = std::pow(std::abs(z), 1.0 / alpha);
    return peak <= 100.0 ? ml_series_mp<100>(alpha, z) : ml_series_mp<250>(alpha, z);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("stability index domain") {
    CHECK_THROWS_AS(StabilityIndex(0.0), DomainError);
    CHECK_THROWS_AS(StabilityIndex(1.5), DomainError);
    CHECK_THROWS_AS(StabilityIndex(-0.2), DomainError);
    CHECK_THROWS_AS(StabilityIndex(std::nan("")), DomainError);
    CHECK(StabilityIndex(1.0).deterministic());
    CHECK_FALSE(StabilityIndex(0.9).deterministic());
    CHECK(StabilityIndex(0.5).laplace_exponent(4.0) == doctest::Approx(2.0));
}

TEST_CASE("log_gamma") {
    CHECK(log_gamma(1.0) == 0.0);
    CHECK(log_gamma(0.5) == doctest::Approx(std::log(std::sqrt(std::numbers::pi))).epsilon(1e-14));
    CHECK(log_gamma(2.8) == doctest::Approx(0.5167028).epsilon(1e-7));
    CHECK(std::exp(log_gamma(2.8)) == doctest::Approx(1.6764908).epsilon(1e-7));
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma(-1.5), DomainError);

    SUBCASE("agrees with the shifted Stirling oracle") {
        for (double x : {1e-3, 0.1, 0.37, 0.9, 1.9, 2.8, 7.25, 33.3, 150.0, 1234.5}) {
            CHECK(std::abs(log_gamma(x) - lgamma_oracle(x)) <=
                  1e-13 * std::max(1.0, std::abs(lgamma_oracle(x))));
        }
    }
    SUBCASE("recurrence ln Gamma(x+1) = ln Gamma(x) + ln x") {
        for (double x = 0.05; x < 40.0; x *= 1.37) {
            CHECK(log_gamma(x + 1.0) ==
                  doctest::Approx(log_gamma(x) + std::log(x)).epsilon(1e-13).scale(1.0));
        }
    }
}

TEST_CASE("mittag_leffler spot values") {
    CHECK(mittag_leffler(StabilityIndex(0.7), 0.0) == 1.0);
    CHECK(mittag_leffler(StabilityIndex(1.0), -1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(mittag_leffler(StabilityIndex(0.5), -1.0) == doctest::Approx(0.4275836).epsilon(1e-7));
    CHECK(std::abs(mittag_leffler(StabilityIndex(0.5), -1.0) - ml_oracle(0.5, -1.0)) < 1e-8);
    CHECK(mittag_leffler(StabilityIndex(0.9), 2.0) == doctest::Approx(9.6049278).epsilon(1e-7));
}

TEST_CASE("mittag_leffler with alpha = 1 is the exponential") {
    const StabilityIndex one(1.0);
    for (int i = 0; i < 1000; ++i) {
        const double z = -10.0 + 20.0 * i / 999.0;
        CHECK(rel_err(mittag_leffler(one, z), std::exp(z)) <= 1e-12);
    }
}

TEST_CASE("mittag_leffler with alpha = 1/2 matches exp(z^2) erfc(-z)") {
    const StabilityIndex half(0.5);
    for (double z = -25.0; z <= 5.0; z += 0.25) {
        const double expected = std::exp(z * z) * std::erfc(-z);
        CHECK(rel_err(mittag_leffler(half, z), expected) <= 1e-10);
    }
}

TEST_CASE("mittag_leffler against the extended-precision series") {
    for (double alpha : {0.3, 0.55, 0.75, 0.9, 0.99}) {
        for (double z : {-60.0, -41.0, -39.0, -20.0, -7.5, -2.0, -0.3, 0.4, 3.0, 12.0}) {
            if (std::pow(std::abs(z), 1.0 / alpha) > 400.0) {
                continue;
            }
            INFO("alpha=" << alpha << " z=" << z);
            CHECK(rel_err(mittag_leffler(StabilityIndex(alpha), z), ml_oracle(alpha, z)) <= 1e-10);
        }
    }
}

TEST_CASE("mittag_leffler on the negative axis is in (0,1] and nonincreasing") {
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9, 0.999}) {
        const StabilityIndex a(alpha);
        double prev = mittag_leffler(a, 0.0);
        CHECK(prev == 1.0);
        for (double x = 0.01; x <= 500.0; x *= 1.08) {
            const double v = mittag_leffler(a, -x);
            INFO("alpha=" << alpha << " z=" << -x);
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
            CHECK(v <= prev + 1e-10);
            prev = v;
        }
    }
}

TEST_CASE("mittag_leffler overflow") {
    CHECK(std::isinf(mittag_leffler(StabilityIndex(0.5), 40.0)));
    CHECK(std::isinf(mittag_leffler(StabilityIndex(1.0), 1000.0)));
}

TEST_CASE("inverse_subordinator_moment") {
    CHECK(inverse_subordinator_moment(StabilityIndex(1.0), 3, 2.0) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(inverse_subordinator_moment(StabilityIndex(0.9), 1, 1.0) == doctest::Approx(1.03975413).epsilon(1e-8));
    CHECK(inverse_subordinator_moment(StabilityIndex(0.9), 2, 1.0) == doctest::Approx(1.1929680).epsilon(1e-7));
    CHECK(inverse_subordinator_moment(StabilityIndex(0.5), 1, 1.0) ==
          doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
    CHECK(inverse_subordinator_moment(StabilityIndex(0.9), 2, 0.0) == 0.0);

    SUBCASE("deterministic clock gives t^p") {
        for (int p = 1; p <= 6; ++p) {
            for (double t : {0.3, 1.0, 2.5, 7.0}) {
                CHECK(inverse_subordinator_moment(StabilityIndex(1.0), p, t) ==
                      doctest::Approx(std::pow(t, p)).epsilon(1e-13));
            }
        }
    }
    CHECK_THROWS_AS(inverse_subordinator_moment(StabilityIndex(0.9), 0, 1.0), DomainError);
    CHECK_THROWS_AS(inverse_subordinator_moment(StabilityIndex(0.9), 1, -1.0), DomainError);
}

TEST_CASE("exp_moment_series") {
    const auto value = [](const ExpMoment& m) { return std::get<double>(m); };

    CHECK(value(exp_moment_series(StabilityIndex(0.5), {1, 1.0, 1.0, 1.0})) ==
          doctest::Approx(5.00898008).epsilon(1e-8));
    CHECK(std::abs(value(exp_moment_series(StabilityIndex(0.5), {1, 1.0, 1.0, 1.0})) -
                   ml_oracle(0.5, 1.0)) < 1e-9);
    CHECK(std::holds_alternative<Divergent>(exp_moment_series(StabilityIndex(0.5), {1, 3.0, 1.0, 1.0})));
    CHECK(value(exp_moment_series(StabilityIndex(0.9), {1, 1.0, 0.0, 5.0})) == 1.0);
    CHECK_THROWS_AS(exp_moment_series(StabilityIndex(0.5), {1, 2.0, 1.0, 1.0}),
                    BoundaryUndeterminedError);
    CHECK_THROWS_AS(exp_moment_series(StabilityIndex(0.5), {1, 1.0, -1.0, 1.0}), DomainError);

    SUBCASE("r = 1 equals the Mittag-Leffler Laplace transform") {
        for (double alpha : {0.3, 0.5, 0.9, 1.0}) {
            for (double xi : {0.1, 0.7, 2.0}) {
                for (double t : {0.5, 1.0, 3.0}) {
                    const StabilityIndex a(alpha);
                    const double series = value(exp_moment_series(a, {1, 1.0, xi, t}));
                    const double ml = mittag_leffler(a, xi * std::pow(t, alpha));
                    INFO("alpha=" << alpha << " xi=" << xi << " t=" << t);
                    CHECK(rel_err(series, ml) <= 1e-10);
                }
            }
        }
    }
    SUBCASE("term cap is an error, not a truncation") {
        CHECK_THROWS_AS(exp_moment_series(StabilityIndex(0.9), {1, 1.0, 30.0, 5.0}, 16),
                        EvaluationError);
    }
}

TEST_CASE("exact_moment_bound") {
    CHECK(exact_moment_bound(StabilityIndex(0.9), 1.0, 1.0, 0.0, 1.0) == doctest::Approx(2.0));
    CHECK(exact_moment_bound(StabilityIndex(1.0), 1.0, 1.0, 1.0, 0.0) ==
          doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(exact_moment_bound(StabilityIndex(0.9), 1.0, 1.0, 1.0, 1.0) ==
          doctest::Approx(2.0 * 9.6049278).epsilon(1e-7));

    SUBCASE("t = 0 value and monotonicity in t") {
        for (double h : {1.0, 1.5, 3.0}) {
            for (double x0 : {0.0, 0.5, 2.0}) {
                const StabilityIndex a(0.8);
                const double at0 = exact_moment_bound(a, h, 0.7, 0.0, x0);
                CHECK(at0 == doctest::Approx(std::pow(2.0, h - 1.0) *
                                             (1.0 + std::pow(x0, 2.0 * h))));
                CHECK(at0 >= std::pow(1.0 + x0 * x0, h) * (1.0 - 1e-12));
                double prev = at0;
                for (double t = 0.05; t < 5.0; t += 0.05) {
                    const double v = exact_moment_bound(a, h, 0.7, t, x0);
                    CHECK(v >= prev);
                    prev = v;
                }
            }
        }
    }
    CHECK_THROWS_AS(exact_moment_bound(StabilityIndex(0.9), 0.5, 1.0, 1.0, 1.0), DomainError);
}
