#include "tcsde/config.hpp"

#include "tcsde/errors.hpp"
#include "tcsde/expression.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace tcsde {

namespace pt = boost::property_tree;

const char* to_string(Command c) {
    switch (c) {
        case Command::path: return "path";
        case Command::ml: return "ml";
        case Command::moments: return "moments";
        case Command::convergence: return "convergence";
        case Command::stability: return "stability";
        case Command::validate: return "validate";
    }
    return "?";
}

const char* to_string(Preset p) { return p == Preset::paper ? "paper" : "desk"; }

Command parse_command(const std::string& s) {
    for (Command c : {Command::path, Command::ml, Command::moments, Command::convergence,
                      Command::stability, Command::validate}) {
        if (s == to_string(c)) {
            return c;
        }
    }
    throw ParseError("run.command",
                     "expected one of path|ml|moments|convergence|stability|validate, got '" + s +
                         "'");
}

namespace {

// Member tables for the builtin models.
template <class T>
using Fields = std::vector<std::pair<const char*, double T::*>>;

template <class T>
struct BuiltinInfo;

template <>
struct BuiltinInfo<builtin::BlackScholes> {
    static constexpr const char* name = "black_scholes";
    static Fields<builtin::BlackScholes> fields() {
        return {{"mu", &builtin::BlackScholes::mu},
                {"sigma", &builtin::BlackScholes::sigma},
                {"x0", &builtin::BlackScholes::x0}};
    }
};

template <>
struct BuiltinInfo<builtin::BoundedNonlinear> {
    static constexpr const char* name = "bounded_nonlinear";
    static Fields<builtin::BoundedNonlinear> fields() {
        return {{"x0", &builtin::BoundedNonlinear::x0}};
    }
};

template <>
struct BuiltinInfo<builtin::MeanReverting> {
    static constexpr const char* name = "mean_reverting";
    static Fields<builtin::MeanReverting> fields() {
        using M = builtin::MeanReverting;
        return {{"kappa", &M::kappa},         {"theta0", &M::theta0},
                {"amplitude", &M::amplitude}, {"omega", &M::omega},
                {"sigma0", &M::sigma0},       {"sigma_growth", &M::sigma_growth},
                {"x0", &M::x0},               {"sigma_horizon", &M::horizon}};
    }
};

template <>
struct BuiltinInfo<builtin::StabilityLinear> {
    static constexpr const char* name = "stability_linear";
    static Fields<builtin::StabilityLinear> fields() {
        return {{"x0", &builtin::StabilityLinear::x0}};
    }
};

template <>
struct BuiltinInfo<builtin::StabilityCubic> {
    static constexpr const char* name = "stability_cubic";
    static Fields<builtin::StabilityCubic> fields() {
        return {{"x0", &builtin::StabilityCubic::x0}};
    }
};

template <>
struct BuiltinInfo<builtin::StabilityCubicNoise> {
    static constexpr const char* name = "stability_cubic_noise";
    static Fields<builtin::StabilityCubicNoise> fields() {
        return {{"x0", &builtin::StabilityCubicNoise::x0}};
    }
};

template <>
struct BuiltinInfo<builtin::StabilityTimeVarying> {
    static constexpr const char* name = "stability_time_varying";
    static Fields<builtin::StabilityTimeVarying> fields() {
        return {{"x0", &builtin::StabilityTimeVarying::x0}};
    }
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            out += ", ";
        }
        if constexpr (std::is_same_v<T, double>) {
            out += format_double(v[i]);
        } else if constexpr (std::is_same_v<T, std::string>) {
            out += v[i];
        } else {
            out += std::to_string(v[i]);
        }
    }
    return out;
}

std::optional<Assumption> assumption_from(const std::string& s) {
    for (Assumption a : {Assumption::polynomial_growth, Assumption::monotone,
                         Assumption::temporal_holder, Assumption::one_sided_lipschitz,
                         Assumption::coercive, Assumption::drift_quadratic,
                         Assumption::zero_at_origin}) {
        if (s == to_string(a)) {
            return a;
        }
    }
    return std::nullopt;
}

// Typed access to the ptree that remembers which keys were read.
class Reader {
public:
    explicit Reader(const pt::ptree& root) : root_(root) {}

    std::optional<std::string> raw(const std::string& section, const std::string& key) {
        consumed_.insert(section + "." + key);
        const auto sec = root_.get_child_optional(pt::ptree::path_type(section, '/'));
        if (!sec) {
            return std::nullopt;
        }
        const auto node = sec->get_child_optional(pt::ptree::path_type(key, '/'));
        if (!node) {
            return std::nullopt;
        }
        return trim(node->data());
    }

    template <class Pred>
    void number(const std::string& section, const std::string& key, double& out, Pred ok,
                const char* range) {
        if (auto v = raw(section, key)) {
            const double d = to_double(section + "." + key, *v);
            if (!ok(d)) {
                throw ParseError(section + "." + key,
                                 std::string("expected ") + range + ", got " + *v);
            }
            out = d;
        }
    }

    void number(const std::string& section, const std::string& key, double& out) {
        number(section, key, out, [](double d) { return std::isfinite(d); }, "a finite number");
    }

    void optional_number(const std::string& section, const std::string& key,
                         std::optional<double>& out) {
        if (auto v = raw(section, key)) {
            const double d = to_double(section + "." + key, *v);
            if (!std::isfinite(d)) {
                throw ParseError(section + "." + key, "expected a finite number, got " + *v);
            }
            out = d;
        }
    }

    template <class Int>
    void integer(const std::string& section, const std::string& key, Int& out, Int min_value,
                 const char* range) {
        if (auto v = raw(section, key)) {
            Int parsed{};
            const char* end = v->data() + v->size();
            const auto [ptr, ec] = std::from_chars(v->data(), end, parsed);
            if (ec != std::errc() || ptr != end || parsed < min_value) {
                throw ParseError(section + "." + key,
                                 std::string("expected ") + range + ", got '" + *v + "'");
            }
            out = parsed;
        }
    }

    void boolean(const std::string& section, const std::string& key, bool& out) {
        if (auto v = raw(section, key)) {
            std::string s = *v;
            std::transform(s.begin(), s.end(), s.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (s == "true" || s == "1" || s == "yes" || s == "on") {
                out = true;
            } else if (s == "false" || s == "0" || s == "no" || s == "off") {
                out = false;
            } else {
                throw ParseError(section + "." + key, "expected true|false, got '" + *v + "'");
            }
        }
    }

    template <class Pred>
    void number_list(const std::string& section, const std::string& key,
                     std::vector<double>& out, Pred ok, const char* range, bool allow_empty) {
        if (auto v = raw(section, key)) {
            std::vector<double> parsed;
            for (const auto& item : split_list(*v)) {
                const double d = to_double(section + "." + key, item);
                if (!ok(d)) {
                    throw ParseError(section + "." + key,
                                     std::string("every entry must be ") + range + ", got " + item);
                }
                parsed.push_back(d);
            }
            if (parsed.empty() && !allow_empty) {
                throw ParseError(section + "." + key, "expected a non-empty list");
            }
            out = std::move(parsed);
        }
    }

    /// Rejects anything that was never read.
    void finish(const std::set<std::string>& free_sections) const {
        for (const auto& [section, node] : root_) {
            if (node.empty()) {
                throw ParseError(section, "key outside of any section");
            }
            if (free_sections.count(section)) {
                continue;
            }
            for (const auto& [key, _] : node) {
                if (!consumed_.count(section + "." + key)) {
                    const bool known_section = std::any_of(
                        consumed_.begin(), consumed_.end(),
                        [&](const std::string& c) { return c.rfind(section + ".", 0) == 0; });
                    throw ParseError(section + (known_section ? "." + key : ""),
                                     known_section ? "unknown key" : "unknown section");
                }
            }
        }
    }

    const pt::ptree& root() const { return root_; }

private:
    static double to_double(const std::string& key, const std::string& s) {
        double d = 0.0;
        const char* end = s.data() + s.size();
        const auto [ptr, ec] = std::from_chars(s.data(), end, d);
        if (ec != std::errc() || ptr != end) {
            throw ParseError(key, "expected a number, got '" + s + "'");
        }
        return d;
    }

    const pt::ptree& root_;
    std::set<std::string> consumed_;
};

const auto positive = [](double d) { return d > 0.0 && std::isfinite(d); };
const auto nonnegative = [](double d) { return d >= 0.0 && std::isfinite(d); };
const auto unit_interval = [](double d) { return d >= 0.0 && d <= 1.0; };

template <class T>
bool read_builtin(Reader& r, const std::string& name, ModelChoice& out) {
    if (name != BuiltinInfo<T>::name) {
        return false;
    }
    T model{};
    if (const auto* current = std::get_if<BuiltinModel>(&out)) {
        if (const auto* same = std::get_if<T>(current)) {
            model = *same;
        }
    }
    for (const auto& [key, member] : BuiltinInfo<T>::fields()) {
        r.number("model", key, model.*member);
    }
    out = BuiltinModel{model};
    return true;
}

void read_model(Reader& r, RunConfig& cfg) {
    std::string name = model_name(cfg.model);
    if (auto v = r.raw("model", "name")) {
        name = *v;
    }
    const bool builtin = read_builtin<builtin::BlackScholes>(r, name, cfg.model) ||
                         read_builtin<builtin::BoundedNonlinear>(r, name, cfg.model) ||
                         read_builtin<builtin::MeanReverting>(r, name, cfg.model) ||
                         read_builtin<builtin::StabilityLinear>(r, name, cfg.model) ||
                         read_builtin<builtin::StabilityCubic>(r, name, cfg.model) ||
                         read_builtin<builtin::StabilityCubicNoise>(r, name, cfg.model) ||
                         read_builtin<builtin::StabilityTimeVarying>(r, name, cfg.model);
    if (builtin && r.root().get_child_optional("params")) {
        throw ParseError("params", "only expression models take parameters");
    }
    if (!builtin) {
        if (name != "expression") {
            throw ParseError("model.name", "unknown model '" + name + "'");
        }
        ExpressionModel m;
        if (const auto* current = std::get_if<ExpressionModel>(&cfg.model)) {
            m = *current;
        }
        if (auto v = r.raw("model", "drift")) {
            m.drift = *v;
        }
        if (auto v = r.raw("model", "diffusion")) {
            m.diffusion = *v;
        }
        r.number("model", "x0", m.x0);
        r.number("model", "h", m.h, [](double d) { return d >= 1.0 && std::isfinite(d); },
                 "h >= 1");
        r.optional_number("model", "growth_constant", m.growth_constant);
        r.optional_number("model", "k1", m.k1);
        r.optional_number("model", "k2", m.k2);
        r.optional_number("model", "k3", m.k3);
        r.optional_number("model", "k4", m.k4);
        r.optional_number("model", "lambda", m.lambda);
        r.optional_number("model", "k5", m.k5);
        r.number("model", "eta_f", m.eta_f, unit_interval, "a value in [0, 1]");
        r.number("model", "eta_g", m.eta_g, unit_interval, "a value in [0, 1]");
        r.boolean("model", "zero_at_origin", m.zero_at_origin);
        if (const auto params = r.root().get_child_optional("params")) {
            m.params.clear();
            for (const auto& [key, node] : *params) {
                double d = 0.0;
                const std::string s = trim(node.data());
                const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
                if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(d)) {
                    throw ParseError("params." + key, "expected a finite number, got '" + s + "'");
                }
                m.params[key] = d;
            }
        }
        cfg.model = m;
    }
    try {
        build_model(cfg.model);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError("model", e.what());
    }
}

void apply_preset(RunConfig& cfg, Preset p) {
    cfg.preset = p;
    if (p == Preset::paper) {
        cfg.mc.n_paths = 3000;
        cfg.convergence.reference_delta = 1e-5;
        cfg.moments.delta = 1e-3;
        cfg.path.delta = 1e-4;
    }
}

RunConfig build(const pt::ptree& root) {
    Reader r(root);
    Preset preset = Preset::desk;
    if (auto v = r.raw("run", "preset")) {
        if (*v == "paper") {
            preset = Preset::paper;
        } else if (*v != "desk") {
            throw ParseError("run.preset", "expected desk|paper, got '" + *v + "'");
        }
    }
    RunConfig cfg = preset_defaults(preset);

    if (auto v = r.raw("run", "command")) {
        cfg.command = parse_command(*v);
    }
    // stability runs default to the linear test model
    if (cfg.command == Command::stability && !r.raw("model", "name")) {
        cfg.model = builtin::StabilityLinear{};
    }
    double alpha = cfg.alpha.value();
    r.number("run", "alpha", alpha, [](double d) { return d > 0.0 && d <= 1.0; },
             "a value in the range (0, 1]");
    cfg.alpha = StabilityIndex(alpha);
    r.number("run", "theta", cfg.theta, unit_interval, "a value in [0, 1]");
    r.number("run", "horizon", cfg.horizon, positive, "a positive horizon");
    if (auto v = r.raw("run", "output_dir")) {
        if (v->empty()) {
            throw ParseError("run.output_dir", "expected a non-empty path");
        }
        cfg.output_dir = *v;
    }
    r.boolean("run", "svg", cfg.emit_svg);

    r.integer<std::size_t>("mc", "n_paths", cfg.mc.n_paths, 1, "an integer >= 1");
    r.integer<std::uint64_t>("mc", "seed", cfg.mc.master_seed, 0, "an unsigned 64-bit integer");
    r.integer<std::size_t>("mc", "max_concurrency", cfg.mc.max_concurrency, 0,
                           "an integer >= 0 (0 = automatic)");

    r.number("solver", "tol", cfg.solver.tol, positive, "a positive tolerance");
    r.integer<int>("solver", "max_iter", cfg.solver.max_iter, 1, "an integer >= 1");
    r.integer<int>("solver", "bracket_expansion_cap", cfg.solver.bracket_expansion_cap, 1,
                   "an integer >= 1");

    read_model(r, cfg);

    r.number("path", "delta", cfg.path.delta, positive, "a positive step");
    r.boolean("path", "with_fbem", cfg.path.with_fbem);

    r.number_list("ml", "z", cfg.ml.z, [](double d) { return !std::isnan(d); }, "a number",
                  false);

    if (auto v = r.raw("moments", "p")) {
        std::vector<int> ps;
        for (const auto& item : split_list(*v)) {
            int p = 0;
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), p);
            if (ec != std::errc() || ptr != item.data() + item.size() || p < 1) {
                throw ParseError("moments.p", "every entry must be an integer >= 1, got " + item);
            }
            ps.push_back(p);
        }
        if (ps.empty()) {
            throw ParseError("moments.p", "expected a non-empty list");
        }
        cfg.moments.p = std::move(ps);
    }
    r.number_list("moments", "t", cfg.moments.t, nonnegative, ">= 0", false);
    r.number("moments", "delta", cfg.moments.delta, positive, "a positive step");

    r.number_list("convergence", "deltas", cfg.convergence.deltas, positive, "> 0", false);
    if (cfg.convergence.deltas.size() < 3) {
        throw ParseError("convergence.deltas", "an order fit needs at least 3 step sizes");
    }
    r.number("convergence", "reference_delta", cfg.convergence.reference_delta, nonnegative,
             "a value >= 0 (0 = automatic)");
    if (auto v = r.raw("convergence", "reference")) {
        if (*v != "auto" && *v != "closed_form" && *v != "fine_grid") {
            throw ParseError("convergence.reference",
                             "expected auto|closed_form|fine_grid, got '" + *v + "'");
        }
        cfg.convergence.reference = *v;
    }

    r.number_list("stability", "thetas", cfg.stability.thetas, unit_interval, "in [0, 1]",
                  false);
    r.number_list("stability", "deltas", cfg.stability.deltas, positive, "> 0", false);
    r.number("stability", "span", cfg.stability.span, positive, "a positive span");
    r.boolean("stability", "running_sup", cfg.stability.running_sup);

    auto& v = cfg.validate;
    r.number("validate", "t_max", v.grid.t_max, nonnegative, "a value >= 0");
    r.number("validate", "x_max", v.grid.x_max, positive, "a positive bound");
    r.integer<std::size_t>("validate", "n_t", v.grid.n_t, 1, "an integer >= 1");
    r.integer<std::size_t>("validate", "n_x", v.grid.n_x, 2, "an integer >= 2");
    if (auto s = r.raw("validate", "assumptions")) {
        v.assumptions.clear();
        for (const auto& item : split_list(*s)) {
            if (item == "all") {
                v.assumptions.clear();
                break;
            }
            const auto a = assumption_from(item);
            if (!a) {
                throw ParseError("validate.assumptions", "unknown assumption '" + item + "'");
            }
            v.assumptions.push_back(*a);
        }
    }
    r.number_list("validate", "bound_times", v.bound_times, nonnegative, ">= 0", true);
    r.number("validate", "bound_h", v.bound_h, [](double d) { return d >= 1.0; }, "h >= 1");
    r.number("validate", "bound_delta", v.bound_delta, positive, "a positive step");
    r.number_list("validate", "envelope_times", v.envelope_times, nonnegative, ">= 0", true);
    r.number("validate", "c1", v.certificate.c1, positive, "a positive constant");
    r.number("validate", "c2", v.certificate.c2, positive, "a positive constant");
    r.number("validate", "c3", v.certificate.c3, positive, "a positive constant");
    r.number("validate", "p", v.certificate.p, positive, "a positive moment order");
    if (v.certificate.c1 > v.certificate.c2) {
        throw ParseError("validate.c1", "expected c1 <= c2");
    }
    r.number("validate", "envelope_delta", v.envelope_delta, positive, "a positive step");
    r.number("validate", "envelope_tolerance", v.envelope_tolerance, nonnegative,
             "a value >= 0");

    r.finish({"params"});
    return cfg;
}

pt::ptree read_ini(const std::string& text) {
    pt::ptree root;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError("", std::string("malformed config: ") + e.message() + " (line " +
                                 std::to_string(e.line()) + ")");
    }
    return root;
}

}  // namespace

std::string model_name(const ModelChoice& choice) {
    if (std::holds_alternative<ExpressionModel>(choice)) {
        return "expression";
    }
    return std::visit([](const auto& m) -> std::string {
        return BuiltinInfo<std::decay_t<decltype(m)>>::name;
    }, std::get<BuiltinModel>(choice));
}

ModelDescriptor build_model(const ModelChoice& choice) {
    if (const auto* b = std::get_if<BuiltinModel>(&choice)) {
        return make_builtin(*b);
    }
    const auto& e = std::get<ExpressionModel>(choice);
    auto compile = [&](const std::string& key, const std::string& text) {
        try {
            return Expression::parse(text, e.params);
        } catch (const ParseError& err) {
            throw ParseError(key, err.what());
        }
    };
    const Expression drift = compile("model.drift", e.drift);
    const Expression diffusion = compile("model.diffusion", e.diffusion);
    ModelDescriptor m;
    m.name = "expression";
    m.drift = [drift](double t, double x) { return drift(t, x); };
    m.diffusion = [diffusion](double t, double x) { return diffusion(t, x); };
    m.x0 = e.x0;
    m.h = e.h;
    m.growth_constant = e.growth_constant;
    m.k1 = e.k1;
    m.k2 = e.k2;
    m.k3 = e.k3;
    m.k4 = e.k4;
    m.lambda = e.lambda;
    m.k5 = e.k5;
    m.eta_f = e.eta_f;
    m.eta_g = e.eta_g;
    m.zero_at_origin = e.zero_at_origin;
    return m;
}

RunConfig preset_defaults(Preset p) {
    RunConfig cfg;
    apply_preset(cfg, p);
    return cfg;
}

RunConfig parse_config(const std::string& text) { return build(read_ini(text)); }

RunConfig parse_config(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    pt::ptree root = read_ini(text);
    for (const auto& [key, value] : overrides) {
        const auto dot = key.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() ||
            key.find('.', dot + 1) != std::string::npos) {
            throw ParseError(key, "override keys take the form section.key");
        }
        root.put(pt::ptree::path_type(key, '.'), value);
    }
    return build(root);
}

std::string emit_config(const RunConfig& c, bool include_output_dir) {
    std::ostringstream out;
    out << "[run]\n"
        << "command = " << to_string(c.command) << "\n"
        << "preset = " << to_string(c.preset) << "\n"
        << "alpha = " << format_double(c.alpha.value()) << "\n"
        << "theta = " << format_double(c.theta) << "\n"
        << "horizon = " << format_double(c.horizon) << "\n";
    if (include_output_dir) {
        out << "output_dir = " << c.output_dir << "\n";
    }
    out << "svg = " << (c.emit_svg ? "true" : "false") << "\n\n";

    out << "[mc]\n"
        << "n_paths = " << c.mc.n_paths << "\n"
        << "seed = " << c.mc.master_seed << "\n"
        << "max_concurrency = " << c.mc.max_concurrency << "\n\n";

    out << "[solver]\n"
        << "tol = " << format_double(c.solver.tol) << "\n"
        << "max_iter = " << c.solver.max_iter << "\n"
        << "bracket_expansion_cap = " << c.solver.bracket_expansion_cap << "\n\n";

    out << "[model]\n" << "name = " << model_name(c.model) << "\n";
    if (const auto* b = std::get_if<BuiltinModel>(&c.model)) {
        std::visit([&](const auto& m) {
            for (const auto& [key, member] : BuiltinInfo<std::decay_t<decltype(m)>>::fields()) {
                out << key << " = " << format_double(m.*member) << "\n";
            }
        }, *b);
        out << "\n";
    } else {
        const auto& e = std::get<ExpressionModel>(c.model);
        out << "drift = " << e.drift << "\n"
            << "diffusion = " << e.diffusion << "\n"
            << "x0 = " << format_double(e.x0) << "\n"
            << "h = " << format_double(e.h) << "\n";
        const std::pair<const char*, const std::optional<double>*> opt[] = {
            {"growth_constant", &e.growth_constant}, {"k1", &e.k1}, {"k2", &e.k2},
            {"k3", &e.k3}, {"k4", &e.k4}, {"lambda", &e.lambda}, {"k5", &e.k5}};
        for (const auto& [key, value] : opt) {
            if (*value) {
                out << key << " = " << format_double(**value) << "\n";
            }
        }
        out << "eta_f = " << format_double(e.eta_f) << "\n"
            << "eta_g = " << format_double(e.eta_g) << "\n"
            << "zero_at_origin = " << (e.zero_at_origin ? "true" : "false") << "\n\n";
        if (!e.params.empty()) {
            out << "[params]\n";
            for (const auto& [key, value] : e.params) {
                out << key << " = " << format_double(value) << "\n";
            }
            out << "\n";
        }
    }

    out << "[path]\n"
        << "delta = " << format_double(c.path.delta) << "\n"
        << "with_fbem = " << (c.path.with_fbem ? "true" : "false") << "\n\n";

    out << "[ml]\n" << "z = " << join(c.ml.z) << "\n\n";

    out << "[moments]\n"
        << "p = " << join(c.moments.p) << "\n"
        << "t = " << join(c.moments.t) << "\n"
        << "delta = " << format_double(c.moments.delta) << "\n\n";

    out << "[convergence]\n"
        << "deltas = " << join(c.convergence.deltas) << "\n"
        << "reference_delta = " << format_double(c.convergence.reference_delta) << "\n"
        << "reference = " << c.convergence.reference << "\n\n";

    out << "[stability]\n"
        << "thetas = " << join(c.stability.thetas) << "\n"
        << "deltas = " << join(c.stability.deltas) << "\n"
        << "span = " << format_double(c.stability.span) << "\n"
        << "running_sup = " << (c.stability.running_sup ? "true" : "false") << "\n\n";

    const auto& v = c.validate;
    std::vector<std::string> names;
    for (Assumption a : v.assumptions) {
        names.emplace_back(to_string(a));
    }
    out << "[validate]\n"
        << "t_max = " << format_double(v.grid.t_max) << "\n"
        << "x_max = " << format_double(v.grid.x_max) << "\n"
        << "n_t = " << v.grid.n_t << "\n"
        << "n_x = " << v.grid.n_x << "\n"
        << "assumptions = " << (names.empty() ? std::string("all") : join(names)) << "\n"
        << "bound_times = " << join(v.bound_times) << "\n"
        << "bound_h = " << format_double(v.bound_h) << "\n"
        << "bound_delta = " << format_double(v.bound_delta) << "\n"
        << "envelope_times = " << join(v.envelope_times) << "\n"
        << "c1 = " << format_double(v.certificate.c1) << "\n"
        << "c2 = " << format_double(v.certificate.c2) << "\n"
        << "c3 = " << format_double(v.certificate.c3) << "\n"
        << "p = " << format_double(v.certificate.p) << "\n"
        << "envelope_delta = " << format_double(v.envelope_delta) << "\n"
        << "envelope_tolerance = " << format_double(v.envelope_tolerance) << "\n";
    return out.str();
}

std::vector<std::string> config_notes(const RunConfig& c) {
    std::vector<std::string> notes;
    if (c.command == Command::stability) {
        for (double th : c.stability.thetas) {
            if (th < 0.5) {
                notes.push_back("theta=" + format_double(th) +
                                " is below 1/2: the unconditional mean-square stability "
                                "guarantee does not cover it; stability then depends on delta_max");
            }
        }
    }
    return notes;
}

std::optional<std::string> preset_warning(const RunConfig& c) {
    if (c.preset != Preset::paper) {
        return std::nullopt;
    }
    // Roughly 0.3 microseconds per fine step and path, E_T/delta steps per path.
    const double mean_e = std::pow(c.horizon, c.alpha.value()) /
                          std::exp(log_gamma(1.0 + c.alpha.value()));
    double steps = 0.0;
    switch (c.command) {
        case Command::convergence: {
            const double d0 = c.convergence.reference_delta > 0.0
                                  ? c.convergence.reference_delta
                                  : default_reference_delta(*std::min_element(
                                        c.convergence.deltas.begin(), c.convergence.deltas.end()));
            steps = 2.0 * mean_e / d0;
            break;
        }
        case Command::moments: steps = mean_e / c.moments.delta; break;
        case Command::path: steps = mean_e / c.path.delta / static_cast<double>(c.mc.n_paths); break;
        case Command::stability: {
            for (double d : c.stability.deltas) {
                steps += static_cast<double>(c.stability.thetas.size()) * c.stability.span / d;
            }
            break;
        }
        default: steps = 1e3; break;
    }
    const double seconds = 3e-7 * steps * static_cast<double>(c.mc.n_paths);
    std::ostringstream msg;
    msg << "paper preset: full-scale run with N=" << c.mc.n_paths << ", estimated runtime about "
        << std::max(1.0, std::ceil(seconds / 60.0)) << " min on one core";
    return msg.str();
}

}  // namespace tcsde
