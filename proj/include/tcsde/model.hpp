#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tcsde {

using CoefficientFn = std::function<double(double t, double x)>;
/// X at internal time E_t given E_t and B_{E_t}; the closure carries x0 and
/// the model parameters.
using ExactSolutionFn = std::function<double(double e_t, double b_at_e_t)>;

/// Scalar TCSDE dX = F(t, X) dE_t + G(t, X) dB_{E_t} together with the
/// constants of the assumptions it is claimed to satisfy. Constants left
/// empty are simply not declared; checks that need them refuse to run.
struct ModelDescriptor {
    std::string name;
    CoefficientFn drift;
    CoefficientFn diffusion;
    /// dF/dx when known in closed form (used by the implicit solve).
    CoefficientFn drift_dx;
    double x0 = 1.0;

    double h = 1.0;                          ///< growth exponent, >= 1
    std::optional<double> growth_constant;   ///< C(h): |F| v |G| <= C(h)(1 + |x|^h)
    std::optional<double> k1;                ///< monotone condition constant
    std::optional<double> k2;                ///< temporal Hoelder constant of F
    std::optional<double> k3;                ///< temporal Hoelder constant of G
    double eta_f = 1.0;
    double eta_g = 1.0;
    std::optional<double> k4;                ///< one-sided Lipschitz constant
    std::optional<double> lambda;            ///< dissipation constant
    std::optional<double> k5;                ///< |F|^2 <= K5 |x|^2

    /// F(t, 0) = G(t, 0) = 0 is part of the model's contract.
    bool zero_at_origin = false;
    ExactSolutionFn exact_solution;
};

namespace builtin {

struct BlackScholes {
    double mu = 0.02;
    double sigma = 0.2;
    double x0 = 1.0;

    friend bool operator==(const BlackScholes&, const BlackScholes&) = default;
};

/// dX = (-X - X^3/(1+X^2)) dE + X/sqrt(1+X^2) dB_E
struct BoundedNonlinear {
    double x0 = 1.0;

    friend bool operator==(const BoundedNonlinear&, const BoundedNonlinear&) = default;
};

/// dX = kappa (theta_t - X) dE + sigma_t X^3 dB_E with
/// theta_t = theta0 + amplitude sin(omega t), sigma_t = sigma0 (1 + sigma_growth t).
struct MeanReverting {
    double kappa = 0.65;
    double theta0 = 0.05;
    double amplitude = 0.03;
    double omega = 2.0 * std::numbers::pi;
    double sigma0 = 0.4;
    double sigma_growth = 0.05;
    double x0 = 1.0;
    /// Horizon over which M_sigma = sup |sigma_t| is taken.
    double horizon = 1.0;

    friend bool operator==(const MeanReverting&, const MeanReverting&) = default;
};

/// dX = -2X dE + X dB_E
struct StabilityLinear {
    double x0 = 1.0;

    friend bool operator==(const StabilityLinear&, const StabilityLinear&) = default;
};

/// dX = (-2X - X^3) dE + X dB_E
struct StabilityCubic {
    double x0 = 1.0;

    friend bool operator==(const StabilityCubic&, const StabilityCubic&) = default;
};

/// dX = (-X - X^3) dE + X^2 dB_E
struct StabilityCubicNoise {
    double x0 = 1.0;

    friend bool operator==(const StabilityCubicNoise&, const StabilityCubicNoise&) = default;
};

/// dX = ((-2t - 1) X - X^3) dE + X dB_E
struct StabilityTimeVarying {
    double x0 = 1.0;

    friend bool operator==(const StabilityTimeVarying&, const StabilityTimeVarying&) = default;
};

}  // namespace builtin

using BuiltinModel =
    std::variant<builtin::BlackScholes, builtin::BoundedNonlinear, builtin::MeanReverting,
                 builtin::StabilityLinear, builtin::StabilityCubic, builtin::StabilityCubicNoise,
                 builtin::StabilityTimeVarying>;

ModelDescriptor make_builtin(const BuiltinModel& tag);

/// x0 exp((mu - sigma^2/2) E_t + sigma B_{E_t}).
double bs_exact_solution(double x0, double mu, double sigma, double e_t, double b_at_e_t);

enum class Asymptotics { diverges, vanishes, oscillates };

/// Long-time behaviour of the time-changed Black-Scholes solution.
Asymptotics classify_asymptotics(double mu, double sigma);

const char* to_string(Asymptotics a);

enum class Assumption {
    polynomial_growth,   ///< |F| v |G| <= C(h)(1 + |x|^h)
    monotone,            ///< <x,F> + (2h-1)/2 |G|^2 <= K1 (1 + |x|^2)
    temporal_holder,     ///< |F(s,x)-F(t,x)| <= K2 (1+|x|) |s-t|^eta_F, same for G with K3
    one_sided_lipschitz, ///< <x-y, F(t,x)-F(t,y)> <= K4 |x-y|^2
    coercive,            ///< <x,F> + |G|^2/2 <= -lambda |x|^2
    drift_quadratic,     ///< |F|^2 <= K5 |x|^2
    zero_at_origin,      ///< F(t,0) = G(t,0) = 0
};

const char* to_string(Assumption a);

struct SamplingGrid {
    double t_max = 1.0;
    double x_max = 1e3;
    std::size_t n_t = 11;
    std::size_t n_x = 201;

    friend bool operator==(const SamplingGrid&, const SamplingGrid&) = default;
};

struct AssumptionCheck {
    Assumption assumption;
    /// max over the grid of lhs - rhs (after a rounding allowance); <= 0 means
    /// no violation was found.
    double margin = 0.0;
    double worst_t = 0.0;
    double worst_x = 0.0;
    bool satisfied() const { return margin <= 0.0; }
};

struct ValidationReport {
    std::string model;
    std::vector<AssumptionCheck> checks;
    const AssumptionCheck* find(Assumption a) const;
};

/// Assumptions whose constants the model declares.
std::vector<Assumption> checkable_assumptions(const ModelDescriptor& model);

/// Falsifies the declared constants on a grid; never proves them.
/// Throws ConfigurationError naming the constant a requested check lacks.
ValidationReport validate_assumptions(const ModelDescriptor& model, const SamplingGrid& grid,
                                      const std::vector<Assumption>& requested);

}  // namespace tcsde
