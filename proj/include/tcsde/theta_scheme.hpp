#pragma once

#include "tcsde/model.hpp"
#include "tcsde/special_fn.hpp"
#include "tcsde/stochastic_clock.hpp"

#include <optional>
#include <span>
#include <vector>

namespace tcsde {

struct SolverOptions {
    double tol = 1e-12;
    int max_iter = 100;
    int bracket_expansion_cap = 60;

    friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

struct SchemeConfig {
    double theta = 1.0;
    double delta = 1e-3;
    double horizon = 1.0;
    SolverOptions solver;

    void validate() const;
};

struct SolveResult {
    double x = 0.0;
    int iterations = 0;
    bool bisection = false;
};

struct SolverStats {
    std::vector<int> iterations;   ///< per step, Newton + bisection iterations
    std::size_t bisection_steps = 0;
    /// delta >= max_stepsize(model, theta); the solve still ran.
    bool step_size_warning = false;
};

/// Grid trajectory of the ST scheme (and optionally the FBEM companion)
/// on tau_n = D_{n delta}, n = 0..N.
struct TrajectoryRecord {
    std::vector<double> tau;
    std::vector<double> x_st;
    std::optional<std::vector<double>> x_fbem;
    SolverStats solver_stats;

    /// Piecewise-constant readout: the grid value at the last tau_n <= t.
    double value_at(double t) const;
    double fbem_at(double t) const;
};

/// Mean-square stability data for the ST scheme.
struct StabilityThreshold {
    double phi = 0.0;
    std::optional<double> gamma;      ///< (-ln phi / delta)^alpha, only for 0 < phi < 1
    std::optional<double> delta_max;  ///< empty means unbounded (theta >= 1/2)
    bool stable = false;              ///< |phi| < 1
};

/// delta* = min{1, 1/(K1 theta), 1/(K4 theta)}; non-positive K4 imposes nothing.
double max_stepsize(const ModelDescriptor& model, double theta);

/// Solves x - theta F(t, x) delta = b.
SolveResult implicit_solve(const ModelDescriptor& model, double t, double theta, double delta,
                           double b, const SolverOptions& opts = {});

/// One ST step from tau_n to tau_next; drift is implicit at tau_next.
double st_step(const ModelDescriptor& model, double x_prev, double tau_n, double tau_next,
               double theta, double delta, double dB, const SolverOptions& opts = {},
               int* iterations = nullptr);

/// One FBEM step, coefficients evaluated on the ST value x_tilde_n.
double fbem_step(const ModelDescriptor& model, double xhat_prev, double x_tilde_n, double tau_n,
                 double delta, double dB);

TrajectoryRecord integrate(const ModelDescriptor& model, const SchemeConfig& config,
                           const SubordinatorPath& clock, const BrownianDriver& noise,
                           bool with_fbem);

/// Explicit/implicit ST recursion on a fixed number of steps without a
/// horizon stop; `tau` holds n_steps + 1 clock values. Returns x_0 .. x_n.
std::vector<double> integrate_steps(const ModelDescriptor& model, double theta, double delta,
                                    std::span<const double> tau, std::span<const double> dB,
                                    const SolverOptions& opts = {});

StabilityThreshold stability_threshold(double lambda, double k5, double theta, double delta,
                                       StabilityIndex alpha);

}  // namespace tcsde
