#pragma once

#include <cstddef>
#include <variant>

namespace tcsde {

/// Stability index alpha of the stable subordinator, 0 < alpha <= 1.
/// alpha == 1 is the deterministic clock E_t = t and is kept for
/// regression tests of the degenerate limit.
class StabilityIndex {
public:
    explicit StabilityIndex(double alpha);

    double value() const noexcept { return alpha_; }
    bool deterministic() const noexcept { return alpha_ == 1.0; }

    /// Laplace exponent xi^alpha of the subordinator.
    double laplace_exponent(double xi) const;

    friend bool operator==(const StabilityIndex&, const StabilityIndex&) = default;

private:
    double alpha_;
};

/// Arguments of the inverse-subordinator moment formulas.
struct MomentQuery {
    int p = 1;        ///< moment order
    double r = 1.0;   ///< power inside the exponential
    double xi = 1.0;  ///< exponential rate (0 allowed: the series is then 1)
    double t = 0.0;   ///< physical time

    void validate() const;
};

/// Marker returned by `exp_moment_series` when the expectation is infinite.
struct Divergent {
    friend bool operator==(Divergent, Divergent) = default;
};

using ExpMoment = std::variant<double, Divergent>;

inline constexpr std::size_t kSeriesTermCap = 10000;

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// One-parameter Mittag-Leffler function E_alpha(z) = sum z^k / Gamma(alpha k + 1).
///
/// Positive arguments and moderate negative arguments use the power series
/// with compensated summation. When cancellation in the alternating series
/// would cost more than a few digits, negative arguments switch to the
/// completely monotone spectral integral
///   E_alpha(-x) = int_0^inf exp(-r x^{1/alpha}) K_alpha(r) dr,
/// and for z < -40 the algebraic asymptotic expansion is tried first.
/// Returns +inf when the result overflows a double.
double mittag_leffler(StabilityIndex alpha, double z);

/// E[E_t^p] = Gamma(p+1) / Gamma(alpha p + 1) * t^{alpha p}.
double inverse_subordinator_moment(StabilityIndex alpha, int p, double t);

/// E[exp(xi E_t^r)] as the series sum_k xi^k/k! Gamma(rk+1)/Gamma(alpha r k+1) t^{alpha r k}.
/// Returns `Divergent` for r > 1/(1-alpha); throws BoundaryUndeterminedError
/// within 1e-9 of the boundary and EvaluationError if `max_terms` is exhausted.
ExpMoment exp_moment_series(StabilityIndex alpha, const MomentQuery& q,
                            std::size_t max_terms = kSeriesTermCap);

/// Upper bound on E|X_t|^{2h}: 2^{h-1} E_alpha(2 h K1 t^alpha) (1 + |x0|^{2h}).
double exact_moment_bound(StabilityIndex alpha, double h, double k1, double t, double x0);

}  // namespace tcsde
