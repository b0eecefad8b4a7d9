#include "tcsde/experiments.hpp"

#include "tcsde/rng.hpp"
#include "tcsde/stochastic_clock.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace tcsde {

void MonteCarloConfig::validate() const {
    if (n_paths == 0) {
        throw ConfigurationError("experiments", "n_paths must be a positive integer");
    }
}

std::size_t resolve_concurrency(std::size_t requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv(kConcurrencyEnv); env && *env) {
        std::size_t v = 0;
        const char* end = env + std::strlen(env);
        const auto [ptr, ec] = std::from_chars(env, end, v);
        if (ec == std::errc() && ptr == end && v > 0) {
            return v;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void for_each_path(const MonteCarloConfig& mc, const std::function<void(std::size_t)>& body) {
    mc.validate();
    const std::size_t workers = std::min(resolve_concurrency(mc.max_concurrency), mc.n_paths);
    if (workers <= 1) {
        for (std::size_t i = 0; i < mc.n_paths; ++i) {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex guard;
    std::size_t error_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr error;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= mc.n_paths) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(guard);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

SampleStats sample_stats(std::span<const double> v) {
    SampleStats s;
    s.n = v.size();
    if (v.empty()) {
        return s;
    }
    s.mean = pairwise_sum(v) / static_cast<double>(s.n);
    if (s.n > 1) {
        std::vector<double> dev(v.size());
        std::transform(v.begin(), v.end(), dev.begin(),
                       [&](double x) { return (x - s.mean) * (x - s.mean); });
        const double var = pairwise_sum(dev) / static_cast<double>(s.n - 1);
        s.se = std::sqrt(var / static_cast<double>(s.n));
    }
    return s;
}

const char* to_string(ReferenceRule::Kind k) {
    return k == ReferenceRule::Kind::closed_form ? "closed_form" : "fine_grid";
}

namespace {

void enforce_failure_budget(std::size_t failed, std::size_t total, const char* what) {
    if (static_cast<double>(failed) > kFailureBudget * static_cast<double>(total)) {
        std::ostringstream msg;
        msg << what << ": " << failed << " of " << total
            << " paths failed in the implicit solve (budget 1%)";
        throw ExperimentFailure(msg.str());
    }
}

std::size_t coupling_multiple(double delta, double delta0) {
    const double ratio = delta / delta0;
    const double m = std::round(ratio);
    if (m < 1.0 || std::abs(m - ratio) > 1e-9 * ratio) {
        std::ostringstream msg;
        msg << "delta " << delta << " is not an integer multiple of the reference delta "
            << delta0;
        throw ConfigurationError("experiments", msg.str());
    }
    return static_cast<std::size_t>(m);
}

/// Per-path readouts X~ at each t of `t_grid`; empty for failed paths.
std::vector<std::vector<double>> sample_readouts(const ModelDescriptor& model,
                                                 StabilityIndex alpha,
                                                 const ReferenceTrajectories& ref,
                                                 const std::vector<double>& t_grid,
                                                 const MonteCarloConfig& mc) {
    if (t_grid.empty()) {
        throw ConfigurationError("experiments", "t grid must not be empty");
    }
    for (double t : t_grid) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw ConfigurationError("experiments", "t grid values must be finite and >= 0");
        }
    }
    const double horizon =
        std::max(*std::max_element(t_grid.begin(), t_grid.end()), ref.delta);
    SchemeConfig scheme{ref.theta, ref.delta, horizon, ref.solver};
    scheme.validate();

    std::vector<std::vector<double>> out(mc.n_paths);
    for_each_path(mc, [&](std::size_t i) {
        RandomStream clock_rng(derive_seed(mc.master_seed, i, StreamTag::clock));
        RandomStream noise_rng(derive_seed(mc.master_seed, i, StreamTag::noise));
        const SubordinatorPath clock = simulate_subordinator(alpha, ref.delta, horizon, clock_rng);
        BrownianDriver noise{ref.delta,
                             brownian_increments(clock.last_index(), ref.delta, noise_rng),
                             noise_rng.seed()};
        try {
            const TrajectoryRecord rec = integrate(model, scheme, clock, noise, false);
            std::vector<double> row(t_grid.size());
            for (std::size_t k = 0; k < t_grid.size(); ++k) {
                row[k] = rec.value_at(t_grid[k]);
            }
            out[i] = std::move(row);
        } catch (const SolverFailure&) {
        }
    });
    return out;
}

std::size_t count_failed(const std::vector<std::vector<double>>& rows) {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.empty(); }));
}

/// Column k of the surviving rows, transformed.
template <class F>
std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k, F f) {
    std::vector<double> col;
    col.reserve(rows.size());
    for (const auto& r : rows) {
        if (!r.empty()) {
            col.push_back(f(r[k]));
        }
    }
    return col;
}

}  // namespace

double default_reference_delta(double delta_min, double cap) {
    if (!(delta_min > 0.0) || !(cap > 0.0)) {
        throw ConfigurationError("experiments", "reference resolution needs positive deltas");
    }
    const double k = std::ceil(delta_min / cap * (1.0 - 1e-12));
    return delta_min / std::max(1.0, k);
}

StrongErrorReport strong_error(const ModelDescriptor& model, StabilityIndex alpha, double theta,
                               std::vector<double> delta_grid, double horizon,
                               const MonteCarloConfig& mc, const StrongErrorOptions& opts) {
    mc.validate();
    if (delta_grid.empty()) {
        throw ConfigurationError("experiments", "delta grid must not be empty");
    }
    for (double d : delta_grid) {
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw ConfigurationError("experiments", "delta grid values must be finite and > 0");
        }
    }
    std::sort(delta_grid.begin(), delta_grid.end(), std::greater<>());
    if (std::adjacent_find(delta_grid.begin(), delta_grid.end()) != delta_grid.end()) {
        throw ConfigurationError("experiments", "delta grid contains duplicates");
    }
    const double delta_min = delta_grid.back();
    const double delta0 = opts.reference_delta.value_or(default_reference_delta(delta_min));
    if (!(delta0 > 0.0) || delta0 > delta_min * (1.0 + 1e-12)) {
        throw ConfigurationError("experiments",
                                 "reference delta must be positive and no larger than the grid");
    }

    StrongErrorReport report;
    report.n_paths = mc.n_paths;
    report.reference_rule.delta0 = delta0;
    report.reference_rule.kind = opts.prefer_closed_form && model.exact_solution
                                     ? ReferenceRule::Kind::closed_form
                                     : ReferenceRule::Kind::fine_grid;
    const bool closed = report.reference_rule.kind == ReferenceRule::Kind::closed_form;

    std::vector<std::size_t> multiples;
    for (double d : delta_grid) {
        multiples.push_back(coupling_multiple(d, delta0));
    }
    const std::size_t max_m = multiples.front();

    const std::size_t n_delta = delta_grid.size();
    std::vector<std::vector<double>> sq(mc.n_paths);
    std::vector<char> warned(mc.n_paths, 0);

    for_each_path(mc, [&](std::size_t i) {
        RandomStream clock_rng(derive_seed(mc.master_seed, i, StreamTag::clock));
        RandomStream noise_rng(derive_seed(mc.master_seed, i, StreamTag::noise));
        const CoupledRealization real(alpha, delta0, horizon, max_m, clock_rng, noise_rng);
        try {
            double x_ref = 0.0;
            const SubordinatorPath fine_clock = real.clock(1);
            if (closed) {
                const std::size_t n0 = fine_clock.last_index();
                const auto inc = real.fine_increments().first(n0);
                const double b = std::accumulate(inc.begin(), inc.end(), 0.0);
                x_ref = model.exact_solution(static_cast<double>(n0) * delta0, b);
            } else {
                const TrajectoryRecord ref =
                    integrate(model, SchemeConfig{theta, delta0, horizon, opts.solver}, fine_clock,
                              real.noise(1), false);
                x_ref = ref.x_st.back();
            }
            std::vector<double> row(n_delta);
            for (std::size_t k = 0; k < n_delta; ++k) {
                const std::size_t m = multiples[k];
                const double step = static_cast<double>(m) * delta0;
                const TrajectoryRecord rec =
                    integrate(model, SchemeConfig{theta, step, horizon, opts.solver},
                              real.clock(m), real.noise(m), false);
                warned[i] |= rec.solver_stats.step_size_warning ? 1 : 0;
                const double e = x_ref - rec.x_st.back();
                row[k] = e * e;
            }
            sq[i] = std::move(row);
        } catch (const SolverFailure&) {
        }
    });

    report.failed_paths = count_failed(sq);
    enforce_failure_budget(report.failed_paths, mc.n_paths, "strong_error");
    report.step_size_warning = std::any_of(warned.begin(), warned.end(), [](char c) { return c; });

    for (std::size_t k = 0; k < n_delta; ++k) {
        const auto col = column(sq, k, [](double v) { return v; });
        const SampleStats s = sample_stats(col);
        report.rows.push_back({delta_grid[k], s.mean, s.se, s.n});
    }
    return report;
}

ConvergenceReport fit_order(const StrongErrorReport& report) {
    ConvergenceReport out;
    out.rows = report.rows;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : report.rows) {
        if (r.mse > 0.0 && std::isfinite(r.mse)) {
            xs.push_back(std::log(r.delta));
            ys.push_back(0.5 * std::log(r.mse));
        } else {
            std::ostringstream msg;
            msg << "row delta=" << r.delta << " has mse=" << r.mse << " and was excluded";
            out.warnings.push_back(msg.str());
        }
    }
    if (xs.size() < 3) {
        throw FitError("experiments", "order fit needs at least 3 rows with mse > 0");
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw FitError("experiments", "order fit needs distinct deltas");
    }
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (out.intercept + out.slope * xs[i]);
        ss_res += r * r;
    }
    out.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    if (!std::isfinite(out.slope)) {
        throw FitError("experiments", "order fit produced a non-finite slope");
    }
    return out;
}

StabilityCurve stability_curve(const ModelDescriptor& model, StabilityIndex alpha, double theta,
                               double delta, std::size_t n_steps, const MonteCarloConfig& mc,
                               const StabilityOptions& opts) {
    mc.validate();
    SchemeConfig{theta, delta, 1.0, opts.solver}.validate();
    if (n_steps == 0) {
        throw ConfigurationError("experiments", "stability curve needs n_steps >= 1");
    }

    StabilityCurve curve;
    if (model.lambda && model.k5 && *model.lambda > 0.0 && *model.k5 > 0.0) {
        curve.threshold = stability_threshold(*model.lambda, *model.k5, theta, delta, alpha);
    }

    std::vector<std::vector<double>> paths(mc.n_paths);
    for_each_path(mc, [&](std::size_t i) {
        RandomStream clock_rng(derive_seed(mc.master_seed, i, StreamTag::clock));
        RandomStream noise_rng(derive_seed(mc.master_seed, i, StreamTag::noise));
        const std::vector<double> tau = subordinator_steps(alpha, delta, n_steps, clock_rng);
        const std::vector<double> dB = brownian_increments(n_steps, delta, noise_rng);
        try {
            paths[i] = integrate_steps(model, theta, delta, tau, dB, opts.solver);
        } catch (const SolverFailure&) {
        }
    });
    curve.failed_paths = count_failed(paths);
    enforce_failure_budget(curve.failed_paths, mc.n_paths, "stability_curve");

    std::vector<double> running;
    if (opts.record_running_sup) {
        curve.running_sup.emplace();
        running.assign(mc.n_paths, 0.0);
    }
    for (std::size_t n = 0; n <= n_steps; ++n) {
        const auto col = column(paths, n, [](double x) { return x * x; });
        const SampleStats s = sample_stats(col);
        if (!std::isfinite(s.mean)) {
            curve.truncated = true;
            curve.divergent = true;
            break;
        }
        curve.times.push_back(static_cast<double>(n) * delta);
        curve.msq.push_back(s.mean);
        curve.se.push_back(s.se);
        if (curve.running_sup) {
            std::vector<double> y;
            for (std::size_t i = 0; i < mc.n_paths; ++i) {
                if (!paths[i].empty()) {
                    running[i] = std::max(running[i], std::pow(std::abs(paths[i][n]), model.h));
                    y.push_back(1.0 + running[i]);
                }
            }
            curve.running_sup->push_back(sample_stats(y).mean);
        }
    }

    const double m0 = curve.msq.front();
    const double peak = *std::max_element(curve.msq.begin(), curve.msq.end());
    curve.divergent = curve.divergent || peak > 1e3 * m0;
    curve.decayed = !curve.truncated && curve.msq.back() < 1e-3 * m0;

    if (curve.threshold && curve.threshold->gamma) {
        std::vector<double> env(curve.times.size());
        for (std::size_t n = 0; n < env.size(); ++n) {
            env[n] = m0 * mittag_leffler(alpha, -*curve.threshold->gamma *
                                                    std::pow(curve.times[n], alpha.value()));
        }
        curve.envelope = std::move(env);
    } else if (curve.threshold && curve.threshold->stable && curve.threshold->phi <= 0.0) {
        std::vector<double> env(curve.times.size());
        for (std::size_t n = 0; n < env.size(); ++n) {
            env[n] = m0 * std::pow(std::abs(curve.threshold->phi), static_cast<double>(n));
        }
        curve.geometric_envelope = std::move(env);
    }
    return curve;
}

std::vector<std::size_t> envelope_violations(const StabilityCurve& curve) {
    std::vector<std::size_t> out;
    if (!curve.envelope) {
        return out;
    }
    for (std::size_t n = 0; n < curve.msq.size(); ++n) {
        const double rel = curve.msq[n] > 0.0 ? curve.se[n] / curve.msq[n] : 0.0;
        if (curve.msq[n] > (*curve.envelope)[n] * (1.0 + 3.0 * rel)) {
            out.push_back(n);
        }
    }
    return out;
}

std::vector<MomentRow> moment_validation(StabilityIndex alpha, const std::vector<int>& p_list,
                                         const std::vector<double>& t_list, double delta,
                                         const MonteCarloConfig& mc) {
    mc.validate();
    if (p_list.empty() || t_list.empty()) {
        throw ConfigurationError("experiments", "moment validation needs p and t values");
    }
    for (int p : p_list) {
        if (p < 1) {
            throw ConfigurationError("experiments", "moment orders must be integers >= 1");
        }
    }
    for (double t : t_list) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw ConfigurationError("experiments", "moment times must be finite and >= 0");
        }
    }
    if (!(delta > 0.0)) {
        throw ConfigurationError("experiments", "delta must be > 0");
    }
    const double horizon = std::max(*std::max_element(t_list.begin(), t_list.end()), delta);

    std::vector<std::vector<double>> e_tilde(mc.n_paths);
    for_each_path(mc, [&](std::size_t i) {
        RandomStream rng(derive_seed(mc.master_seed, i, StreamTag::clock));
        const SubordinatorPath path = simulate_subordinator(alpha, delta, horizon, rng);
        const InverseSubordinatorPath inverse(path);
        std::vector<double> row(t_list.size());
        for (std::size_t k = 0; k < t_list.size(); ++k) {
            row[k] = inverse(t_list[k]);
        }
        e_tilde[i] = std::move(row);
    });

    std::vector<MomentRow> rows;
    for (int p : p_list) {
        for (std::size_t k = 0; k < t_list.size(); ++k) {
            const double t = t_list[k];
            const auto col = column(e_tilde, k, [p](double e) { return std::pow(e, p); });
            const SampleStats s = sample_stats(col);
            MomentRow r;
            r.p = p;
            r.t = t;
            r.empirical = s.mean;
            r.se = s.se;
            r.formula = inverse_subordinator_moment(alpha, p, t);
            r.zscore = s.se > 0.0 ? (s.mean - r.formula) / s.se
                                  : std::numeric_limits<double>::quiet_NaN();
            const double lower = p == 1 ? 1.0 : inverse_subordinator_moment(alpha, p - 1, t);
            r.bias_allowance = p * delta * lower;
            r.within = r.formula >= s.mean - 3.0 * s.se &&
                       r.formula <= s.mean + 3.0 * s.se + r.bias_allowance;
            rows.push_back(r);
        }
    }
    return rows;
}

void LyapunovCertificate::validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0) || !(c3 > 0.0) || !(p > 0.0)) {
        throw ConfigurationError("experiments", "certificate constants must all be positive");
    }
    if (c1 > c2) {
        throw ConfigurationError("experiments", "certificate needs c1 <= c2");
    }
}

EnvelopeReport ml_envelope_check(const ModelDescriptor& model, StabilityIndex alpha,
                                 const LyapunovCertificate& certificate,
                                 const std::vector<double>& t_grid, const MonteCarloConfig& mc,
                                 const ReferenceTrajectories& ref, double tolerance) {
    certificate.validate();
    const auto readouts = sample_readouts(model, alpha, ref, t_grid, mc);

    EnvelopeReport report;
    report.tolerance = tolerance;
    report.failed_paths = count_failed(readouts);
    enforce_failure_budget(report.failed_paths, mc.n_paths, "ml_envelope_check");

    const double p = certificate.p;
    const double scale = certificate.c2 / certificate.c1 * std::pow(std::abs(model.x0), p);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        EnvelopeRow row;
        row.t = t_grid[k];
        const auto col = column(readouts, k, [p](double x) { return std::pow(std::abs(x), p); });
        row.empirical = sample_stats(col).mean;
        row.envelope =
            scale * mittag_leffler(alpha, -certificate.c3 * std::pow(row.t, alpha.value()));
        if (!std::isfinite(row.empirical)) {
            if (!report.failure_t) {
                report.failure_t = row.t;
            }
            row.ratio = std::numeric_limits<double>::infinity();
        } else {
            row.ratio = row.empirical == 0.0 ? 0.0 : row.empirical / row.envelope;
        }
        report.max_ratio = std::max(report.max_ratio, row.ratio);
        report.rows.push_back(row);
    }
    report.passed = !report.failure_t && report.max_ratio <= 1.0 + tolerance;
    return report;
}

BoundReport exact_moment_bound_check(const ModelDescriptor& model, StabilityIndex alpha, double h,
                                     const std::vector<double>& t_grid, const MonteCarloConfig& mc,
                                     const ReferenceTrajectories& ref) {
    if (!model.k1) {
        throw ConfigurationError("experiments",
                                 "model '" + model.name + "' does not declare K1");
    }
    const auto readouts = sample_readouts(model, alpha, ref, t_grid, mc);

    BoundReport report;
    report.failed_paths = count_failed(readouts);
    enforce_failure_budget(report.failed_paths, mc.n_paths, "exact_moment_bound_check");

    report.passed = true;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        BoundRow row;
        row.t = t_grid[k];
        const auto col =
            column(readouts, k, [h](double x) { return std::pow(std::abs(x), 2.0 * h); });
        const SampleStats s = sample_stats(col);
        row.empirical = s.mean;
        row.se = s.se;
        row.bound = exact_moment_bound(alpha, h, *model.k1, row.t, model.x0);
        const double rel = s.mean > 0.0 ? s.se / s.mean : 0.0;
        row.passed = std::isfinite(s.mean) && s.mean <= row.bound * (1.0 + 3.0 * rel);
        report.passed = report.passed && row.passed;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace tcsde
