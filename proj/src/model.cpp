#include "tcsde/model.hpp"

#include "tcsde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tcsde {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw ConfigurationError("model", what);
    }
}

struct Builder {
    ModelDescriptor operator()(const builtin::BlackScholes& p) const {
        require(p.sigma >= 0.0, "Black-Scholes requires sigma >= 0");
        require(p.x0 > 0.0, "Black-Scholes requires x0 > 0");
        const double mu = p.mu;
        const double sigma = p.sigma;
        const double x0 = p.x0;
        ModelDescriptor m;
        m.name = "black_scholes";
        m.drift = [mu](double, double x) { return mu * x; };
        m.diffusion = [sigma](double, double x) { return sigma * x; };
        m.drift_dx = [mu](double, double) { return mu; };
        m.x0 = x0;
        m.h = 1.0;
        m.growth_constant = std::max(std::abs(mu), sigma);
        // <x,F> + |G|^2/2 = (mu + sigma^2/2) x^2
        m.k1 = std::abs(mu) + 0.5 * sigma * sigma;
        m.k2 = 0.0;
        m.k3 = 0.0;
        m.k4 = mu;
        if (mu + 0.5 * sigma * sigma < 0.0) {
            m.lambda = -(mu + 0.5 * sigma * sigma);
        }
        if (mu != 0.0) {
            m.k5 = mu * mu;
        }
        m.zero_at_origin = true;
        m.exact_solution = [x0, mu, sigma](double e_t, double b) {
            return bs_exact_solution(x0, mu, sigma, e_t, b);
        };
        return m;
    }

    ModelDescriptor operator()(const builtin::BoundedNonlinear& p) const {
        ModelDescriptor m;
        m.name = "bounded_nonlinear";
        m.drift = [](double, double x) { return -x - x * x * x / (1.0 + x * x); };
        m.diffusion = [](double, double x) { return x / std::sqrt(1.0 + x * x); };
        m.drift_dx = [](double, double x) {
            const double x2 = x * x;
            const double d = 1.0 + x2;
            return -1.0 - (x2 * x2 + 3.0 * x2) / (d * d);
        };
        m.x0 = p.x0;
        m.h = 1.0;
        m.growth_constant = 2.0;
        m.k1 = 1.0;
        m.k2 = 0.0;
        m.k3 = 0.0;
        m.k4 = -1.0;
        m.lambda = 0.5;
        m.k5 = 4.0;
        m.zero_at_origin = true;
        return m;
    }

    ModelDescriptor operator()(const builtin::MeanReverting& p) const {
        require(p.kappa > 0.0, "mean-reverting model requires kappa > 0");
        require(p.horizon > 0.0, "mean-reverting model requires horizon > 0");
        const double kappa = p.kappa;
        const double theta0 = p.theta0;
        const double amp = p.amplitude;
        const double omega = p.omega;
        const double s0 = p.sigma0;
        const double g = p.sigma_growth;
        ModelDescriptor m;
        m.name = "mean_reverting";
        m.drift = [=](double t, double x) { return kappa * (theta0 + amp * std::sin(omega * t) - x); };
        m.diffusion = [=](double t, double x) { return s0 * (1.0 + g * t) * x * x * x; };
        m.drift_dx = [kappa](double, double) { return -kappa; };
        m.x0 = p.x0;
        m.h = 1.0;
        const double m_theta = std::abs(theta0) + std::abs(amp);
        const double m_sigma = std::abs(s0) * std::max(1.0, std::abs(1.0 + g * p.horizon));
        m.k1 = std::max(0.5 * kappa * m_theta * m_theta + 0.5 * m_sigma * m_sigma, 0.5 * kappa);
        m.k2 = kappa * std::abs(amp * omega);
        m.k3 = std::abs(s0 * g);
        m.k4 = -kappa;
        return m;
    }

    ModelDescriptor operator()(const builtin::StabilityLinear& p) const {
        ModelDescriptor m;
        m.name = "stability_linear";
        m.drift = [](double, double x) { return -2.0 * x; };
        m.diffusion = [](double, double x) { return x; };
        m.drift_dx = [](double, double) { return -2.0; };
        m.x0 = p.x0;
        m.h = 1.0;
        m.growth_constant = 2.0;
        m.k1 = 1.0;
        m.k2 = 0.0;
        m.k3 = 0.0;
        m.k4 = -2.0;
        m.lambda = 2.5;
        m.k5 = 4.0;
        m.zero_at_origin = true;
        return m;
    }

    ModelDescriptor operator()(const builtin::StabilityCubic& p) const {
        ModelDescriptor m;
        m.name = "stability_cubic";
        m.drift = [](double, double x) { return -2.0 * x - x * x * x; };
        m.diffusion = [](double, double x) { return x; };
        m.drift_dx = [](double, double x) { return -2.0 - 3.0 * x * x; };
        m.x0 = p.x0;
        m.h = 3.0;
        m.growth_constant = 3.0;
        m.k1 = 0.5;
        m.k2 = 0.0;
        m.k3 = 0.0;
        m.k4 = -2.0;
        m.lambda = 1.5;
        m.zero_at_origin = true;
        return m;
    }

    ModelDescriptor operator()(const builtin::StabilityCubicNoise& p) const {
        ModelDescriptor m;
        m.name = "stability_cubic_noise";
        m.drift = [](double, double x) { return -x - x * x * x; };
        m.diffusion = [](double, double x) { return x * x; };
        m.drift_dx = [](double, double x) { return -1.0 - 3.0 * x * x; };
        m.x0 = p.x0;
        m.h = 1.0;
        m.k1 = 1.0;
        m.k2 = 0.0;
        m.k3 = 0.0;
        m.k4 = -1.0;
        m.lambda = 1.0;
        m.zero_at_origin = true;
        return m;
    }

    ModelDescriptor operator()(const builtin::StabilityTimeVarying& p) const {
        ModelDescriptor m;
        m.name = "stability_time_varying";
        m.drift = [](double t, double x) { return (-2.0 * t - 1.0) * x - x * x * x; };
        m.diffusion = [](double, double x) { return x; };
        m.drift_dx = [](double t, double x) { return -2.0 * t - 1.0 - 3.0 * x * x; };
        m.x0 = p.x0;
        m.h = 3.0;
        m.k1 = 1.0;
        m.k2 = 2.0;
        m.k3 = 0.0;
        m.k4 = -1.0;
        m.lambda = 0.5;
        m.zero_at_origin = true;
        return m;
    }
};

double need(const std::optional<double>& v, const char* name, Assumption a) {
    if (!v) {
        std::ostringstream msg;
        msg << "check '" << to_string(a) << "' needs constant " << name
            << ", which the model does not declare";
        throw ConfigurationError("model", msg.str());
    }
    return *v;
}

// Tracks the worst lhs - rhs on the grid.
class MarginTracker {
public:
    explicit MarginTracker(Assumption a) { check_.assumption = a; }

    void observe(double lhs, double rhs, double t, double x) {
        double m = lhs - rhs;
        if (std::isfinite(m)) {
            m -= 1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs));
        } else if (std::isnan(m)) {
            m = std::numeric_limits<double>::infinity();
        }
        if (!seen_ || m > check_.margin) {
            check_.margin = m;
            check_.worst_t = t;
            check_.worst_x = x;
            seen_ = true;
        }
    }

    AssumptionCheck result() const { return check_; }

private:
    AssumptionCheck check_;
    bool seen_ = false;
};

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

}  // namespace

ModelDescriptor make_builtin(const BuiltinModel& tag) { return std::visit(Builder{}, tag); }

double bs_exact_solution(double x0, double mu, double sigma, double e_t, double b_at_e_t) {
    return x0 * std::exp((mu - 0.5 * sigma * sigma) * e_t + sigma * b_at_e_t);
}

Asymptotics classify_asymptotics(double mu, double sigma) {
    if (!(sigma > 0.0)) {
        throw DomainError("model", "classify_asymptotics requires sigma > 0");
    }
    const double half_var = 0.5 * sigma * sigma;
    if (std::abs(mu - half_var) <= 1e-12 * std::max(std::abs(mu), half_var)) {
        return Asymptotics::oscillates;
    }
    return mu > half_var ? Asymptotics::diverges : Asymptotics::vanishes;
}

const char* to_string(Asymptotics a) {
    switch (a) {
        case Asymptotics::diverges: return "diverges";
        case Asymptotics::vanishes: return "vanishes";
        case Asymptotics::oscillates: return "oscillates";
    }
    return "?";
}

const char* to_string(Assumption a) {
    switch (a) {
        case Assumption::polynomial_growth: return "polynomial_growth";
        case Assumption::monotone: return "monotone";
        case Assumption::temporal_holder: return "temporal_holder";
        case Assumption::one_sided_lipschitz: return "one_sided_lipschitz";
        case Assumption::coercive: return "coercive";
        case Assumption::drift_quadratic: return "drift_quadratic";
        case Assumption::zero_at_origin: return "zero_at_origin";
    }
    return "?";
}

const AssumptionCheck* ValidationReport::find(Assumption a) const {
    for (const auto& c : checks) {
        if (c.assumption == a) {
            return &c;
        }
    }
    return nullptr;
}

std::vector<Assumption> checkable_assumptions(const ModelDescriptor& model) {
    std::vector<Assumption> out;
    if (model.growth_constant) out.push_back(Assumption::polynomial_growth);
    if (model.k1) out.push_back(Assumption::monotone);
    if (model.k2 && model.k3) out.push_back(Assumption::temporal_holder);
    if (model.k4) out.push_back(Assumption::one_sided_lipschitz);
    if (model.lambda) out.push_back(Assumption::coercive);
    if (model.k5) out.push_back(Assumption::drift_quadratic);
    if (model.zero_at_origin) out.push_back(Assumption::zero_at_origin);
    return out;
}

ValidationReport validate_assumptions(const ModelDescriptor& model, const SamplingGrid& grid,
                                      const std::vector<Assumption>& requested) {
    if (grid.n_t * grid.n_x < 1000) {
        throw ConfigurationError("model", "validation grid needs at least 1000 (t, x) points");
    }
    if (!(grid.t_max >= 0.0) || !(grid.x_max > 0.0)) {
        throw ConfigurationError("model", "validation grid needs t_max >= 0 and x_max > 0");
    }
    const auto ts = linspace(0.0, grid.t_max, grid.n_t);
    const auto xs = linspace(-grid.x_max, grid.x_max, grid.n_x);
    const auto& F = model.drift;
    const auto& G = model.diffusion;

    ValidationReport report;
    report.model = model.name;
    for (const Assumption a : requested) {
        MarginTracker track(a);
        switch (a) {
            case Assumption::polynomial_growth: {
                const double c = need(model.growth_constant, "C(h)", a);
                for (double t : ts) {
                    for (double x : xs) {
                        const double lhs = std::max(std::abs(F(t, x)), std::abs(G(t, x)));
                        track.observe(lhs, c * (1.0 + std::pow(std::abs(x), model.h)), t, x);
                    }
                }
                break;
            }
            case Assumption::monotone: {
                const double k1 = need(model.k1, "K1", a);
                for (double t : ts) {
                    for (double x : xs) {
                        const double g = G(t, x);
                        const double lhs = x * F(t, x) + 0.5 * (2.0 * model.h - 1.0) * g * g;
                        track.observe(lhs, k1 * (1.0 + x * x), t, x);
                    }
                }
                break;
            }
            case Assumption::temporal_holder: {
                const double k2 = need(model.k2, "K2", a);
                const double k3 = need(model.k3, "K3", a);
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    for (std::size_t j = i + 1; j < ts.size(); ++j) {
                        const double s = ts[i];
                        const double t = ts[j];
                        const double dt = t - s;
                        for (double x : xs) {
                            const double scale = 1.0 + std::abs(x);
                            track.observe(std::abs(F(s, x) - F(t, x)),
                                          k2 * scale * std::pow(dt, model.eta_f), t, x);
                            track.observe(std::abs(G(s, x) - G(t, x)),
                                          k3 * scale * std::pow(dt, model.eta_g), t, x);
                        }
                    }
                }
                break;
            }
            case Assumption::one_sided_lipschitz: {
                const double k4 = need(model.k4, "K4", a);
                const std::size_t n = xs.size();
                for (double t : ts) {
                    for (std::size_t i = 0; i < n; ++i) {
                        const double x = xs[i];
                        for (const double y : {xs[(i + 1) % n], xs[n - 1 - i], 0.0}) {
                            if (x == y) {
                                continue;
                            }
                            const double lhs = (x - y) * (F(t, x) - F(t, y));
                            track.observe(lhs, k4 * (x - y) * (x - y), t, x);
                        }
                    }
                }
                break;
            }
            case Assumption::coercive: {
                const double lambda = need(model.lambda, "lambda", a);
                for (double t : ts) {
                    for (double x : xs) {
                        const double g = G(t, x);
                        track.observe(x * F(t, x) + 0.5 * g * g, -lambda * x * x, t, x);
                    }
                }
                break;
            }
            case Assumption::drift_quadratic: {
                const double k5 = need(model.k5, "K5", a);
                for (double t : ts) {
                    for (double x : xs) {
                        const double f = F(t, x);
                        track.observe(f * f, k5 * x * x, t, x);
                    }
                }
                break;
            }
            case Assumption::zero_at_origin: {
                for (double t : ts) {
                    track.observe(std::max(std::abs(F(t, 0.0)), std::abs(G(t, 0.0))), 0.0, t, 0.0);
                }
                break;
            }
        }
        report.checks.push_back(track.result());
    }
    return report;
}

}  // namespace tcsde
