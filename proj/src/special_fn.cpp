#include "tcsde/special_fn.hpp"

#include "tcsde/errors.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace tcsde {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

// Negative arguments below this use the asymptotic expansion first.
constexpr double kAsymptoticThreshold = 40.0;
// Largest tolerated ratio between the biggest series term and the result
// before the alternating series is abandoned for the integral.
constexpr double kCancellationBudget = 1e3;

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    explicit CompensatedSum(double init = 0.0) : sum_(init) {}

    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_;
    double comp_ = 0.0;
};

struct SeriesResult {
    double sum;
    double max_abs_term;
};

SeriesResult ml_series(double a, double z) {
    const double log_abs_z = std::log(std::abs(z));
    const bool alternating = z < 0.0;
    CompensatedSum sum(1.0);
    double max_abs = 1.0;
    double prev = 1.0;
    for (std::size_t k = 1; k < kSeriesTermCap; ++k) {
        const double kd = static_cast<double>(k);
        const double mag = std::exp(kd * log_abs_z - log_gamma(a * kd + 1.0));
        sum.add(alternating && (k % 2 == 1) ? -mag : mag);
        max_abs = std::max(max_abs, mag);
        if (alternating && max_abs > kCancellationBudget) {
            // |E_alpha(z)| <= 1 here, so the result is already lost to cancellation
            return {std::numeric_limits<double>::quiet_NaN(), max_abs};
        }
        if (mag < prev && mag <= 1e-17 * std::abs(sum.value())) {
            return {sum.value(), max_abs};
        }
        prev = mag;
    }
    std::ostringstream msg;
    msg << "Mittag-Leffler series did not converge within " << kSeriesTermCap
        << " terms (alpha=" << a << ", z=" << z << ")";
    throw EvaluationError("special_fn", msg.str(), sum.value(), kSeriesTermCap);
}

// E_alpha(-x) ~ -sum_k (-x)^{-k} / Gamma(1 - alpha k), truncated at the
// smallest term. 1/Gamma(1 - alpha k) is rewritten by reflection as
// Gamma(alpha k) sin(pi alpha k) / pi.
std::optional<double> ml_asymptotic(double a, double x) {
    const double log_x = std::log(x);
    CompensatedSum sum;
    double prev_log = std::numeric_limits<double>::infinity();
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < kSeriesTermCap; ++k) {
        const double kd = static_cast<double>(k);
        const double log_mag = boost::math::lgamma(a * kd) - kd * log_x;
        if (log_mag > prev_log) {
            break;
        }
        prev_log = log_mag;
        const double mag = std::exp(log_mag) / kPi;
        const double s = boost::math::sin_pi(a * kd);
        // -(-1)^k = +1 for odd k
        sum.add((k % 2 == 1 ? 1.0 : -1.0) * mag * s);
        smallest = mag;
        if (smallest == 0.0) {
            break;
        }
    }
    const double value = sum.value();
    if (!(value > 0.0) || smallest > 1e-15 * value) {
        return std::nullopt;
    }
    return value;
}

// E_alpha(-x) = int_0^inf exp(-r s) K(r) dr with s = x^{1/alpha} and
// K(r) = sin(alpha pi) r^{alpha-1} / (pi (r^{2 alpha} + 2 r^alpha cos(alpha pi) + 1)).
double ml_spectral_integral(double a, double x) {
    const double s = std::pow(x, 1.0 / a);
    const double sin_ap = boost::math::sin_pi(a);
    const double cos_ap = boost::math::cos_pi(a);
    auto kernel = [=](double r) {
        if (!(r > 0.0)) {
            return 0.0;
        }
        const double ra = std::pow(r, a);
        const double shifted = ra + cos_ap;
        const double denom = shifted * shifted + sin_ap * sin_ap;
        return std::exp(-r * s) * sin_ap * ra / (r * denom * kPi);
    };

    constexpr double tol = 1e-14;
    boost::math::quadrature::tanh_sinh<double> finite;
    const double knee = std::min(1.0, 1.0 / s);
    double total = finite.integrate(kernel, 0.0, knee, tol);
    if (knee < 1.0) {
        total += finite.integrate(kernel, knee, 1.0, tol);
    }
    if (s < 700.0) {
        boost::math::quadrature::exp_sinh<double> tail;
        total += tail.integrate(kernel, 1.0, std::numeric_limits<double>::infinity(), tol);
    }
    return total;
}

}  // namespace

StabilityIndex::StabilityIndex(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        std::ostringstream msg;
        msg << "stability index alpha must lie in (0, 1], got " << alpha;
        throw DomainError("special_fn", msg.str());
    }
}

double StabilityIndex::laplace_exponent(double xi) const {
    if (xi < 0.0) {
        throw DomainError("special_fn", "Laplace exponent requires xi >= 0");
    }
    return std::pow(xi, alpha_);
}

void MomentQuery::validate() const {
    if (p < 1) {
        throw DomainError("special_fn", "moment order p must be >= 1");
    }
    if (!(r > 0.0)) {
        throw DomainError("special_fn", "exponent r must be > 0");
    }
    if (!(xi >= 0.0) || !std::isfinite(xi)) {
        throw DomainError("special_fn", "rate xi must be finite and >= 0");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("special_fn", "time t must be finite and >= 0");
    }
}

double log_gamma(double x) {
    if (!(x > 0.0)) {
        std::ostringstream msg;
        msg << "log_gamma requires x > 0, got " << x;
        throw DomainError("special_fn", msg.str());
    }
    return boost::math::lgamma(x);
}

double mittag_leffler(StabilityIndex alpha, double z) {
    if (!std::isfinite(z)) {
        throw DomainError("special_fn", "Mittag-Leffler argument must be finite");
    }
    const double a = alpha.value();
    if (alpha.deterministic()) {
        return std::exp(z);
    }
    if (z == 0.0) {
        return 1.0;
    }
    if (z > 0.0) {
        // E_alpha(z) ~ exp(z^{1/alpha}) / alpha
        const double growth = std::pow(z, 1.0 / a);
        if (growth - std::log(a) > std::log(std::numeric_limits<double>::max())) {
            return std::numeric_limits<double>::infinity();
        }
        return ml_series(a, z).sum;
    }

    const double x = -z;
    if (x <= kAsymptoticThreshold) {
        const SeriesResult s = ml_series(a, z);
        if (s.sum > 0.0 && s.max_abs_term <= kCancellationBudget * s.sum) {
            return s.sum;
        }
    } else if (auto v = ml_asymptotic(a, x)) {
        return *v;
    }
    return ml_spectral_integral(a, x);
}

double inverse_subordinator_moment(StabilityIndex alpha, int p, double t) {
    if (p < 1) {
        throw DomainError("special_fn", "moment order p must be >= 1");
    }
    if (!(t >= 0.0)) {
        throw DomainError("special_fn", "time t must be >= 0");
    }
    if (t == 0.0) {
        return 0.0;
    }
    const double pd = static_cast<double>(p);
    const double a = alpha.value();
    const double ratio = std::exp(log_gamma(pd + 1.0) - log_gamma(a * pd + 1.0));
    return ratio * std::pow(t, a * pd);
}

ExpMoment exp_moment_series(StabilityIndex alpha, const MomentQuery& q, std::size_t max_terms) {
    q.validate();
    if (max_terms < 16) {
        throw DomainError("special_fn", "max_terms must be >= 16");
    }
    const double a = alpha.value();
    if (!alpha.deterministic()) {
        const double boundary = 1.0 / (1.0 - a);
        if (std::abs(q.r - boundary) <= 1e-9) {
            std::ostringstream msg;
            msg << "r=" << q.r << " lies on the boundary 1/(1-alpha)=" << boundary
                << "; finiteness is not classified there";
            throw BoundaryUndeterminedError("special_fn", msg.str());
        }
        if (q.r > boundary) {
            return Divergent{};
        }
    }
    if (q.xi == 0.0 || q.t == 0.0) {
        return 1.0;
    }

    const double log_xi = std::log(q.xi);
    const double log_t = std::log(q.t);
    CompensatedSum sum(1.0);
    double prev = 1.0;
    for (std::size_t k = 1; k < max_terms; ++k) {
        const double kd = static_cast<double>(k);
        const double rk = q.r * kd;
        const double log_term = kd * log_xi - log_gamma(kd + 1.0) + log_gamma(rk + 1.0) -
                                log_gamma(a * rk + 1.0) + a * rk * log_t;
        const double term = std::exp(log_term);
        const double partial = sum.value();
        sum.add(term);
        if (term < prev && term < 1e-14 * partial) {
            return sum.value();
        }
        prev = term;
    }
    std::ostringstream msg;
    msg << "exponential-moment series did not converge within " << max_terms << " terms";
    throw EvaluationError("special_fn", msg.str(), sum.value(), max_terms);
}

double exact_moment_bound(StabilityIndex alpha, double h, double k1, double t, double x0) {
    if (!(h >= 1.0)) {
        throw DomainError("special_fn", "growth exponent h must be >= 1");
    }
    if (!(k1 > 0.0)) {
        throw DomainError("special_fn", "K1 must be > 0");
    }
    if (!(t >= 0.0)) {
        throw DomainError("special_fn", "time t must be >= 0");
    }
    const double arg = 2.0 * h * k1 * std::pow(t, alpha.value());
    return std::pow(2.0, h - 1.0) * mittag_leffler(alpha, arg) *
           (1.0 + std::pow(std::abs(x0), 2.0 * h));
}

}  // namespace tcsde
