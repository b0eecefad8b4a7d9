#include "tcsde/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace tcsde {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvTable::str() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "," : "") << cells[i];
        }
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) {
        line(r);
    }
    return out.str();
}

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "true" : "false"; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json series(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) {
        a.push_back(number_or_null(x));
    }
    return a;
}

json rows_json(const std::vector<StrongErrorRow>& rows) {
    json a = json::array();
    for (const auto& r : rows) {
        a.push_back({{"delta", r.delta}, {"mse", r.mse}, {"se", r.se}, {"n_eff", r.n_eff}});
    }
    return a;
}

}  // namespace

CsvTable strong_error_csv(const StrongErrorReport& r) {
    CsvTable t{{"delta", "mse", "se", "n_eff"}, {}};
    for (const auto& row : r.rows) {
        t.rows.push_back({num(row.delta), num(row.mse), num(row.se), num(row.n_eff)});
    }
    return t;
}

CsvTable convergence_csv(const ConvergenceReport& r) {
    return {{"slope", "intercept", "r2"}, {{num(r.slope), num(r.intercept), num(r.r_squared)}}};
}

CsvTable stability_csv(const StabilityCurve& c) {
    CsvTable t{{"t", "msq", "envelope", "phi", "gamma"}, {}};
    const std::string phi = c.threshold ? num(c.threshold->phi) : "";
    const std::string gamma = c.threshold && c.threshold->gamma ? num(*c.threshold->gamma) : "";
    for (std::size_t n = 0; n < c.msq.size(); ++n) {
        t.rows.push_back({num(c.times[n]), num(c.msq[n]),
                          c.envelope ? num((*c.envelope)[n]) : "", phi, gamma});
    }
    return t;
}

CsvTable moments_csv(const std::vector<MomentRow>& rows) {
    CsvTable t{{"p", "t", "empirical", "formula", "zscore"}, {}};
    for (const auto& r : rows) {
        t.rows.push_back(
            {std::to_string(r.p), num(r.t), num(r.empirical), num(r.formula), num(r.zscore)});
    }
    return t;
}

CsvTable subordinator_csv(const SubordinatorPath& p) {
    CsvTable t{{"n", "n_delta", "D_value"}, {}};
    const auto v = p.values();
    for (std::size_t n = 0; n < v.size(); ++n) {
        t.rows.push_back({num(n), num(static_cast<double>(n) * p.delta()), num(v[n])});
    }
    return t;
}

CsvTable inverse_csv(const SubordinatorPath& p) {
    CsvTable t{{"t", "E_tilde"}, {}};
    const auto v = p.values();
    for (std::size_t n = 0; n <= p.last_index(); ++n) {
        t.rows.push_back({num(v[n]), num(static_cast<double>(n) * p.delta())});
    }
    return t;
}

CsvTable trajectory_csv(const TrajectoryRecord& r) {
    CsvTable t{{"n", "tau_n", "x_st", "x_fbem", "newton_iters"}, {}};
    for (std::size_t n = 0; n < r.tau.size(); ++n) {
        const int iters = n == 0 ? 0 : r.solver_stats.iterations[n - 1];
        t.rows.push_back({num(n), num(r.tau[n]), num(r.x_st[n]),
                          r.x_fbem ? num((*r.x_fbem)[n]) : "", std::to_string(iters)});
    }
    return t;
}

CsvTable ml_csv(double alpha, const std::vector<double>& z, const std::vector<double>& values) {
    CsvTable t{{"alpha", "z", "value"}, {}};
    for (std::size_t i = 0; i < z.size(); ++i) {
        t.rows.push_back({num(alpha), num(z[i]), num(values[i])});
    }
    return t;
}

CsvTable validation_csv(const ValidationReport& r) {
    CsvTable t{{"assumption", "margin", "worst_t", "worst_x", "satisfied"}, {}};
    for (const auto& c : r.checks) {
        t.rows.push_back({to_string(c.assumption), num(c.margin), num(c.worst_t), num(c.worst_x),
                          flag(c.satisfied())});
    }
    return t;
}

CsvTable bound_csv(const BoundReport& r) {
    CsvTable t{{"t", "empirical", "se", "bound", "passed"}, {}};
    for (const auto& row : r.rows) {
        t.rows.push_back(
            {num(row.t), num(row.empirical), num(row.se), num(row.bound), flag(row.passed)});
    }
    return t;
}

CsvTable envelope_csv(const EnvelopeReport& r) {
    CsvTable t{{"t", "empirical", "envelope", "ratio"}, {}};
    for (const auto& row : r.rows) {
        t.rows.push_back({num(row.t), num(row.empirical), num(row.envelope), num(row.ratio)});
    }
    return t;
}

json to_json(const StrongErrorReport& r) {
    return {{"rows", rows_json(r.rows)},
            {"reference_rule",
             {{"kind", to_string(r.reference_rule.kind)}, {"delta0", r.reference_rule.delta0}}},
            {"n_paths", r.n_paths},
            {"failed_paths", r.failed_paths},
            {"step_size_warning", r.step_size_warning}};
}

json to_json(const ConvergenceReport& r) {
    return {{"slope", r.slope},
            {"intercept", r.intercept},
            {"r2", r.r_squared},
            {"rows", rows_json(r.rows)},
            {"warnings", r.warnings}};
}

json to_json(const StabilityThreshold& t) {
    return {{"phi", number_or_null(t.phi)},
            {"gamma", t.gamma ? json(*t.gamma) : json(nullptr)},
            {"delta_max", t.delta_max ? json(*t.delta_max) : json("unbounded")},
            {"stable", t.stable}};
}

json to_json(const StabilityCurve& c) {
    json j = {{"t", series(c.times)},
              {"msq", series(c.msq)},
              {"se", series(c.se)},
              {"envelope", c.envelope ? series(*c.envelope) : json(nullptr)},
              {"threshold", c.threshold ? to_json(*c.threshold) : json(nullptr)},
              {"truncated", c.truncated},
              {"divergent", c.divergent},
              {"decayed", c.decayed},
              {"failed_paths", c.failed_paths},
              {"envelope_violations", envelope_violations(c).size()}};
    if (c.geometric_envelope) {
        j["geometric_envelope"] = series(*c.geometric_envelope);
    }
    if (c.running_sup) {
        j["running_sup"] = series(*c.running_sup);
    }
    return j;
}

json to_json(const std::vector<MomentRow>& rows) {
    json a = json::array();
    for (const auto& r : rows) {
        a.push_back({{"p", r.p},
                     {"t", r.t},
                     {"empirical", r.empirical},
                     {"formula", r.formula},
                     {"se", r.se},
                     {"zscore", number_or_null(r.zscore)},
                     {"bias_allowance", r.bias_allowance},
                     {"within", r.within}});
    }
    return a;
}

json to_json(const ValidationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"assumption", to_string(c.assumption)},
                          {"margin", number_or_null(c.margin)},
                          {"worst_t", c.worst_t},
                          {"worst_x", c.worst_x},
                          {"satisfied", c.satisfied()}});
    }
    return {{"model", r.model}, {"checks", checks}};
}

json to_json(const BoundReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"t", row.t},
                        {"empirical", number_or_null(row.empirical)},
                        {"se", number_or_null(row.se)},
                        {"bound", number_or_null(row.bound)},
                        {"passed", row.passed}});
    }
    return {{"rows", rows}, {"passed", r.passed}, {"failed_paths", r.failed_paths}};
}

json to_json(const EnvelopeReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"t", row.t},
                        {"empirical", number_or_null(row.empirical)},
                        {"envelope", number_or_null(row.envelope)},
                        {"ratio", number_or_null(row.ratio)}});
    }
    return {{"rows", rows},
            {"max_ratio", number_or_null(r.max_ratio)},
            {"tolerance", r.tolerance},
            {"passed", r.passed},
            {"failure_t", r.failure_t ? json(*r.failure_t) : json(nullptr)},
            {"failed_paths", r.failed_paths}};
}

}  // namespace tcsde
