#include "tcsde/theta_scheme.hpp"

#include "tcsde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tcsde {

namespace {

double drift_derivative(const ModelDescriptor& model, double t, double x) {
    if (model.drift_dx) {
        return model.drift_dx(t, x);
    }
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    return (model.drift(t, x + h) - model.drift(t, x - h)) / (2.0 * h);
}

bool same_step(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

}  // namespace

void SchemeConfig::validate() const {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw ConfigurationError("theta_scheme", "theta must lie in [0, 1]");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ConfigurationError("theta_scheme", "delta must be finite and > 0");
    }
    if (!(horizon > 0.0)) {
        throw ConfigurationError("theta_scheme", "horizon must be > 0");
    }
    if (!(solver.tol > 0.0) || solver.max_iter <= 0 || solver.bracket_expansion_cap <= 0) {
        throw ConfigurationError("theta_scheme", "solver tolerances and caps must be positive");
    }
}

double TrajectoryRecord::value_at(double t) const {
    if (tau.empty() || t < 0.0) {
        throw DomainError("theta_scheme", "trajectory readout outside the simulated range");
    }
    const auto it = std::upper_bound(tau.begin(), tau.end(), t);
    return x_st[static_cast<std::size_t>(it - tau.begin()) - 1];
}

double TrajectoryRecord::fbem_at(double t) const {
    if (!x_fbem) {
        throw DomainError("theta_scheme", "trajectory has no FBEM companion");
    }
    if (tau.empty() || t < 0.0) {
        throw DomainError("theta_scheme", "trajectory readout outside the simulated range");
    }
    const auto it = std::upper_bound(tau.begin(), tau.end(), t);
    return (*x_fbem)[static_cast<std::size_t>(it - tau.begin()) - 1];
}

double max_stepsize(const ModelDescriptor& model, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw ConfigurationError("theta_scheme", "theta must lie in [0, 1]");
    }
    if (!model.k1 || !model.k4) {
        throw ConfigurationError("theta_scheme",
                                 std::string("max_stepsize needs ") + (model.k1 ? "K4" : "K1") +
                                     ", which model '" + model.name + "' does not declare");
    }
    double out = 1.0;
    if (theta == 0.0) {
        return out;
    }
    if (*model.k1 > 0.0) {
        out = std::min(out, 1.0 / (*model.k1 * theta));
    }
    if (*model.k4 > 0.0) {
        out = std::min(out, 1.0 / (*model.k4 * theta));
    }
    return out;
}

SolveResult implicit_solve(const ModelDescriptor& model, double t, double theta, double delta,
                           double b, const SolverOptions& opts) {
    if (theta == 0.0) {
        return {b, 0, false};
    }
    const double scale = std::max(1.0, std::abs(b));
    const double target = opts.tol * scale;
    const double gain = theta * delta;
    auto residual = [&](double x) { return x - gain * model.drift(t, x) - b; };

    SolveResult out;
    double x = b;
    double r = residual(x);

    // Damped Newton from the explicit predictor.
    for (int it = 0; it < opts.max_iter && std::isfinite(r); ++it) {
        if (std::abs(r) <= target) {
            out.x = x;
            return out;
        }
        const double slope = 1.0 - gain * drift_derivative(model, t, x);
        if (slope == 0.0 || !std::isfinite(slope)) {
            break;
        }
        const double step = r / slope;
        double damping = 1.0;
        bool improved = false;
        for (int k = 0; k < 40; ++k) {
            const double xn = x - damping * step;
            const double rn = residual(xn);
            if (std::isfinite(rn) && std::abs(rn) < std::abs(r)) {
                x = xn;
                r = rn;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        ++out.iterations;
        if (!improved) {
            break;
        }
    }
    if (std::isfinite(r) && std::abs(r) <= target) {
        out.x = x;
        return out;
    }

    // f is increasing for delta < delta*; past it any sign change will do.
    out.bisection = true;
    const double centre = std::isfinite(x) ? x : b;
    double width = scale;
    double lo = centre - width;
    double hi = centre + width;
    double r_lo = residual(lo);
    double r_hi = residual(hi);
    int expansions = 0;
    while (!(std::signbit(r_lo) != std::signbit(r_hi) || r_lo == 0.0 || r_hi == 0.0)) {
        if (++expansions > opts.bracket_expansion_cap) {
            throw SolverFailure("implicit solve could not bracket the root", std::abs(r), lo, hi);
        }
        width *= 2.0;
        lo = centre - width;
        hi = centre + width;
        r_lo = residual(lo);
        r_hi = residual(hi);
    }
    if (r_lo == 0.0 || r_hi == 0.0) {
        out.x = r_lo == 0.0 ? lo : hi;
        return out;
    }
    const bool rising = r_lo < 0.0;
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        const double rm = residual(mid);
        ++out.iterations;
        if (std::abs(rm) <= target) {
            out.x = mid;
            return out;
        }
        if (mid <= lo || mid >= hi || !std::isfinite(rm)) {
            std::ostringstream msg;
            msg << "implicit solve stalled with residual " << std::abs(rm) << " at t=" << t;
            throw SolverFailure(msg.str(), std::abs(rm), lo, hi);
        }
        ((rm < 0.0) == rising ? lo : hi) = mid;
    }
}

double st_step(const ModelDescriptor& model, double x_prev, double tau_n, double tau_next,
               double theta, double delta, double dB, const SolverOptions& opts, int* iterations) {
    if (!(tau_next > tau_n)) {
        throw DomainError("theta_scheme", "st_step requires tau_next > tau_n");
    }
    const double b = x_prev + (1.0 - theta) * model.drift(tau_n, x_prev) * delta +
                     model.diffusion(tau_n, x_prev) * dB;
    const SolveResult s = implicit_solve(model, tau_next, theta, delta, b, opts);
    if (iterations) {
        *iterations = s.iterations;
    }
    return s.x;
}

double fbem_step(const ModelDescriptor& model, double xhat_prev, double x_tilde_n, double tau_n,
                 double delta, double dB) {
    return xhat_prev + model.drift(tau_n, x_tilde_n) * delta +
           model.diffusion(tau_n, x_tilde_n) * dB;
}

TrajectoryRecord integrate(const ModelDescriptor& model, const SchemeConfig& config,
                           const SubordinatorPath& clock, const BrownianDriver& noise,
                           bool with_fbem) {
    config.validate();
    if (!same_step(clock.delta(), config.delta) || !same_step(noise.delta, config.delta)) {
        throw ConfigurationError("theta_scheme", "clock, noise and scheme must share delta");
    }
    if (clock.horizon() < config.horizon) {
        throw ConfigurationError("theta_scheme", "clock horizon is shorter than the scheme horizon");
    }
    const auto values = clock.values();
    const std::size_t n_steps =
        static_cast<std::size_t>(std::upper_bound(values.begin(), values.end(), config.horizon) -
                                 values.begin()) - 1;
    if (noise.increments.size() < n_steps) {
        throw ConfigurationError("theta_scheme", "Brownian driver is shorter than the clock");
    }

    TrajectoryRecord rec;
    rec.tau.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n_steps) + 1);
    rec.x_st.resize(n_steps + 1);
    rec.x_st[0] = model.x0;
    rec.solver_stats.iterations.resize(n_steps, 0);
    if (config.theta > 0.0 && model.k1 && model.k4) {
        rec.solver_stats.step_size_warning = config.delta >= max_stepsize(model, config.theta);
    }
    if (with_fbem) {
        rec.x_fbem.emplace(n_steps + 1);
        (*rec.x_fbem)[0] = model.x0;
    }

    for (std::size_t n = 0; n < n_steps; ++n) {
        const double dB = noise.increments[n];
        try {
            const double b = rec.x_st[n] +
                             (1.0 - config.theta) * model.drift(rec.tau[n], rec.x_st[n]) * config.delta +
                             model.diffusion(rec.tau[n], rec.x_st[n]) * dB;
            const SolveResult s =
                implicit_solve(model, rec.tau[n + 1], config.theta, config.delta, b, config.solver);
            rec.x_st[n + 1] = s.x;
            rec.solver_stats.iterations[n] = s.iterations;
            rec.solver_stats.bisection_steps += s.bisection ? 1 : 0;
        } catch (const SolverFailure& e) {
            std::ostringstream msg;
            msg << e.what() << " (step " << n << ")";
            throw SolverFailure(msg.str(), e.residual(), e.bracket_lo(), e.bracket_hi(),
                                static_cast<std::ptrdiff_t>(n));
        }
        if (with_fbem) {
            (*rec.x_fbem)[n + 1] =
                fbem_step(model, (*rec.x_fbem)[n], rec.x_st[n], rec.tau[n], config.delta, dB);
        }
    }
    return rec;
}

std::vector<double> integrate_steps(const ModelDescriptor& model, double theta, double delta,
                                    std::span<const double> tau, std::span<const double> dB,
                                    const SolverOptions& opts) {
    if (tau.empty() || dB.size() + 1 < tau.size()) {
        throw ConfigurationError("theta_scheme", "integrate_steps needs one increment per step");
    }
    const std::size_t n_steps = tau.size() - 1;
    std::vector<double> x(n_steps + 1, std::numeric_limits<double>::infinity());
    x[0] = model.x0;
    for (std::size_t n = 0; n < n_steps; ++n) {
        if (!std::isfinite(x[n])) {
            break;
        }
        const double b = x[n] + (1.0 - theta) * model.drift(tau[n], x[n]) * delta +
                         model.diffusion(tau[n], x[n]) * dB[n];
        if (!std::isfinite(b)) {
            break;
        }
        x[n + 1] = implicit_solve(model, tau[n + 1], theta, delta, b, opts).x;
    }
    return x;
}

StabilityThreshold stability_threshold(double lambda, double k5, double theta, double delta,
                                       StabilityIndex alpha) {
    if (!(lambda > 0.0) || !(k5 > 0.0)) {
        throw DomainError("theta_scheme", "stability threshold needs lambda > 0 and K5 > 0");
    }
    if (!(theta >= 0.0 && theta <= 1.0) || !(delta > 0.0)) {
        throw DomainError("theta_scheme", "stability threshold needs theta in [0,1], delta > 0");
    }
    const double explicit_w = 1.0 - theta;
    const double num = 1.0 + explicit_w * explicit_w * delta * delta * k5 - 0.5 * delta * lambda -
                       2.0 * explicit_w * delta * lambda;
    const double den = 1.0 + theta * theta * delta * delta * k5 + 2.0 * theta * delta * lambda;

    StabilityThreshold out;
    out.phi = num / den;
    out.stable = std::abs(out.phi) < 1.0;
    if (out.phi > 0.0 && out.phi < 1.0) {
        out.gamma = std::pow(-std::log(out.phi) / delta, alpha.value());
    }
    if (theta < 0.5) {
        out.delta_max = 5.0 * lambda / (2.0 * k5 * (1.0 - 2.0 * theta));
    }
    return out;
}

}  // namespace tcsde
