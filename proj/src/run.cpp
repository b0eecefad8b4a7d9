#include "tcsde/run.hpp"

#include "tcsde/errors.hpp"
#include "tcsde/experiments.hpp"
#include "tcsde/report_io.hpp"
#include "tcsde/rng.hpp"
#include "tcsde/stochastic_clock.hpp"
#include "tcsde/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace tcsde {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

class Emitter {
public:
    Emitter(const fs::path& dir, OutputBundle& bundle, bool svg)
        : dir_(dir), bundle_(bundle), svg_(svg) {}

    void csv(const std::string& name, const CsvTable& table) {
        write(name, table.str());
        bundle_.csv_paths.push_back((dir_ / name).string());
        csv_names_.push_back(name);
    }

    void svg(const std::string& name, const Plot& plot, PlotKind kind) {
        if (!svg_) {
            return;
        }
        write(name, render_svg(plot, kind));
        bundle_.svg_paths.push_back((dir_ / name).string());
        svg_names_.push_back(name);
    }

    void write(const std::string& name, const std::string& content) const {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cli_io", "cannot write " + (dir_ / name).string());
        }
        out << content;
        if (!out) {
            throw Error("cli_io", "write failed for " + (dir_ / name).string());
        }
    }

    json files() const { return {{"csv", csv_names_}, {"svg", svg_names_}}; }

private:
    fs::path dir_;
    OutputBundle& bundle_;
    bool svg_;
    std::vector<std::string> csv_names_;
    std::vector<std::string> svg_names_;
};

SchemeConfig scheme_of(const RunConfig& c, double delta) {
    return SchemeConfig{c.theta, delta, c.horizon, c.solver};
}

json run_path(const RunConfig& c, const ModelDescriptor& model, Emitter& out) {
    RandomStream clock_rng(derive_seed(c.mc.master_seed, 0, StreamTag::clock));
    RandomStream noise_rng(derive_seed(c.mc.master_seed, 0, StreamTag::noise));
    const SubordinatorPath clock = simulate_subordinator(c.alpha, c.path.delta, c.horizon, clock_rng);
    BrownianDriver noise{c.path.delta,
                         brownian_increments(clock.last_index(), c.path.delta, noise_rng),
                         noise_rng.seed()};
    const TrajectoryRecord rec =
        integrate(model, scheme_of(c, c.path.delta), clock, noise, c.path.with_fbem);

    out.csv("subordinator.csv", subordinator_csv(clock));
    out.csv("inverse.csv", inverse_csv(clock));
    out.csv("trajectory.csv", trajectory_csv(rec));

    std::vector<double> n_delta(clock.values().size());
    for (std::size_t n = 0; n < n_delta.size(); ++n) {
        n_delta[n] = static_cast<double>(n) * c.path.delta;
    }
    out.svg("subordinator.svg",
            Plot{"subordinator path", "n delta", "D",
                 {{"D", n_delta, {clock.values().begin(), clock.values().end()}, false}},
                 std::nullopt},
            PlotKind::line);
    Plot traj{"trajectory", "tau_n", "X", {{"ST", rec.tau, rec.x_st, false}}, std::nullopt};
    if (rec.x_fbem) {
        traj.series.push_back({"FBEM", rec.tau, *rec.x_fbem, true});
    }
    out.svg("trajectory.svg", traj, PlotKind::line);

    const int max_iter = rec.solver_stats.iterations.empty()
                             ? 0
                             : *std::max_element(rec.solver_stats.iterations.begin(),
                                                 rec.solver_stats.iterations.end());
    return {{"steps", clock.last_index()},
            {"E_tilde_T", static_cast<double>(clock.last_index()) * c.path.delta},
            {"x_st_T", rec.x_st.back()},
            {"x_fbem_T", rec.x_fbem ? json(rec.x_fbem->back()) : json(nullptr)},
            {"max_solver_iterations", max_iter},
            {"bisection_steps", rec.solver_stats.bisection_steps},
            {"step_size_warning", rec.solver_stats.step_size_warning}};
}

json run_ml(const RunConfig& c, Emitter& out, std::vector<std::string>& messages) {
    std::vector<double> values;
    json rows = json::array();
    for (double z : c.ml.z) {
        const double v = mittag_leffler(c.alpha, z);
        values.push_back(v);
        rows.push_back({{"z", z}, {"value", std::isfinite(v) ? json(v) : json(nullptr)}});
        messages.push_back("E_" + short_number(c.alpha.value()) + "(" + short_number(z) +
                           ") = " + format_number(v));
    }
    out.csv("ml.csv", ml_csv(c.alpha.value(), c.ml.z, values));
    return {{"alpha", c.alpha.value()}, {"values", rows}};
}

json run_moments(const RunConfig& c, Emitter& out) {
    const auto rows = moment_validation(c.alpha, c.moments.p, c.moments.t, c.moments.delta, c.mc);
    out.csv("moments.csv", moments_csv(rows));
    return {{"delta", c.moments.delta}, {"rows", to_json(rows)}};
}

json run_convergence(const RunConfig& c, const ModelDescriptor& model, Emitter& out,
                     std::vector<std::string>& warnings) {
    StrongErrorOptions opts;
    opts.solver = c.solver;
    opts.prefer_closed_form = c.convergence.reference != "fine_grid";
    if (c.convergence.reference == "closed_form" && !model.exact_solution) {
        throw ConfigurationError("cli_io", "model '" + model.name + "' has no closed form");
    }
    if (c.convergence.reference_delta > 0.0) {
        opts.reference_delta = c.convergence.reference_delta;
    }
    const StrongErrorReport report =
        strong_error(model, c.alpha, c.theta, c.convergence.deltas, c.horizon, c.mc, opts);
    const ConvergenceReport fit = fit_order(report);
    if (report.step_size_warning) {
        warnings.push_back("some step sizes reach the solvability bound delta*");
    }
    warnings.insert(warnings.end(), fit.warnings.begin(), fit.warnings.end());

    out.csv("strong_error.csv", strong_error_csv(report));
    out.csv("convergence.csv", convergence_csv(fit));
    out.svg("convergence.svg", convergence_plot(fit), PlotKind::loglog);
    return {{"strong_error", to_json(report)}, {"convergence", to_json(fit)}};
}

json run_stability(const RunConfig& c, const ModelDescriptor& model, Emitter& out) {
    json runs = json::array();
    StabilityOptions opts;
    opts.solver = c.solver;
    opts.record_running_sup = c.stability.running_sup;
    for (double theta : c.stability.thetas) {
        for (double delta : c.stability.deltas) {
            const auto n_steps = static_cast<std::size_t>(std::floor(c.stability.span / delta + 1e-9));
            if (n_steps == 0) {
                throw ConfigurationError("cli_io", "stability.span is shorter than delta " +
                                                       short_number(delta));
            }
            const StabilityCurve curve =
                stability_curve(model, c.alpha, theta, delta, n_steps, c.mc, opts);
            const std::string stem =
                "stability_theta" + short_number(theta) + "_delta" + short_number(delta);
            out.csv(stem + ".csv", stability_csv(curve));
            out.svg(stem + ".svg",
                    stability_plot(curve, "theta=" + short_number(theta) +
                                              ", delta=" + short_number(delta)),
                    PlotKind::line);
            json j = to_json(curve);
            j["theta"] = theta;
            j["delta"] = delta;
            j["n_steps"] = n_steps;
            runs.push_back(j);
        }
    }
    return {{"runs", runs}};
}

json run_validate(const RunConfig& c, const ModelDescriptor& model, Emitter& out) {
    const auto& v = c.validate;
    const auto requested = v.assumptions.empty() ? checkable_assumptions(model) : v.assumptions;
    const ValidationReport report = validate_assumptions(model, v.grid, requested);
    out.csv("validate.csv", validation_csv(report));
    json j = {{"assumptions", to_json(report)}};

    if (!v.bound_times.empty()) {
        const BoundReport bound = exact_moment_bound_check(
            model, c.alpha, v.bound_h, v.bound_times, c.mc, {v.bound_delta, c.theta, c.solver});
        out.csv("bound.csv", bound_csv(bound));
        j["moment_bound"] = to_json(bound);
    }
    if (!v.envelope_times.empty()) {
        const EnvelopeReport env =
            ml_envelope_check(model, c.alpha, v.certificate, v.envelope_times, c.mc,
                              {v.envelope_delta, c.theta, c.solver}, v.envelope_tolerance);
        out.csv("envelope.csv", envelope_csv(env));
        j["envelope"] = to_json(env);
    }
    return j;
}

}  // namespace

json manifest_of(const RunConfig& config) {
    return {{"code_version", kCodeVersion},
            {"master_seed", config.mc.master_seed},
            {"config", emit_config(config, false)}};
}

OutputBundle run(const RunConfig& config) {
    const ModelDescriptor model = build_model(config.model);
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error("cli_io", "output directory '" + config.output_dir + "' is not writable");
    }

    OutputBundle bundle;
    bundle.manifest = manifest_of(config);
    Emitter out(dir, bundle, config.emit_svg);
    std::vector<std::string> warnings;

    json results;
    switch (config.command) {
        case Command::path: results = run_path(config, model, out); break;
        case Command::ml: results = run_ml(config, out, bundle.messages); break;
        case Command::moments: results = run_moments(config, out); break;
        case Command::convergence: results = run_convergence(config, model, out, warnings); break;
        case Command::stability: results = run_stability(config, model, out); break;
        case Command::validate: results = run_validate(config, model, out); break;
    }

    json summary = {{"schema_version", kSchemaVersion},
                    {"command", to_string(config.command)},
                    {"model", model.name},
                    {"manifest", bundle.manifest},
                    {"files", out.files()},
                    {"results", results},
                    {"notes", config_notes(config)},
                    {"warnings", warnings}};
    out.write("summary.json", summary.dump(2) + "\n");
    out.write("manifest.ini", emit_config(config, false));
    bundle.json_summary_path = (dir / "summary.json").string();
    for (const auto& w : warnings) {
        bundle.messages.push_back("warning: " + w);
    }
    return bundle;
}

json error_json(const std::exception& e) {
    std::string type = "internal_error";
    std::string module = "unknown";
    json j;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        module = err->module();
        if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
            type = "parse_error";
            j["key"] = p->key();
        } else if (dynamic_cast<const ConfigurationError*>(&e)) {
            type = "configuration_error";
        } else if (dynamic_cast<const DomainError*>(&e)) {
            type = "domain_error";
        } else if (const auto* ev = dynamic_cast<const EvaluationError*>(&e)) {
            type = "evaluation_error";
            j["partial_sum"] = ev->partial_sum();
            j["terms"] = ev->terms();
        } else if (dynamic_cast<const BoundaryUndeterminedError*>(&e)) {
            type = "boundary_undetermined";
        } else if (const auto* sf = dynamic_cast<const SolverFailure*>(&e)) {
            type = "solver_failure";
            j["residual"] = sf->residual();
            j["bracket"] = {sf->bracket_lo(), sf->bracket_hi()};
            j["step"] = sf->step();
        } else if (dynamic_cast<const ExperimentFailure*>(&e)) {
            type = "experiment_failure";
        } else if (dynamic_cast<const ResourceError*>(&e)) {
            type = "resource_error";
        } else if (dynamic_cast<const FitError*>(&e)) {
            type = "fit_error";
        } else if (dynamic_cast<const RenderError*>(&e)) {
            type = "render_error";
        } else {
            type = "error";
        }
    }
    j["type"] = type;
    j["module"] = module;
    j["message"] = e.what();
    return {{"schema_version", kSchemaVersion}, {"error", j}};
}

}  // namespace tcsde
