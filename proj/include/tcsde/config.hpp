#pragma once

#include "tcsde/experiments.hpp"
#include "tcsde/model.hpp"
#include "tcsde/special_fn.hpp"
#include "tcsde/theta_scheme.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tcsde {

inline constexpr const char* kCodeVersion = "0.1.0";

enum class Command { path, ml, moments, convergence, stability, validate };
enum class Preset { desk, paper };

const char* to_string(Command c);
const char* to_string(Preset p);
Command parse_command(const std::string& s);

/// User-defined drift and diffusion over `t`, `x` and named parameters.
struct ExpressionModel {
    std::string drift = "0";
    std::string diffusion = "0";
    std::map<std::string, double> params;
    double x0 = 1.0;
    double h = 1.0;
    std::optional<double> growth_constant;
    std::optional<double> k1;
    std::optional<double> k2;
    std::optional<double> k3;
    std::optional<double> k4;
    std::optional<double> lambda;
    std::optional<double> k5;
    double eta_f = 1.0;
    double eta_g = 1.0;
    bool zero_at_origin = false;

    friend bool operator==(const ExpressionModel&, const ExpressionModel&) = default;
};

using ModelChoice = std::variant<BuiltinModel, ExpressionModel>;

ModelDescriptor build_model(const ModelChoice& choice);
std::string model_name(const ModelChoice& choice);

struct PathSettings {
    double delta = 1e-4;
    bool with_fbem = true;
    friend bool operator==(const PathSettings&, const PathSettings&) = default;
};

struct MlSettings {
    std::vector<double> z = {-1.0};
    friend bool operator==(const MlSettings&, const MlSettings&) = default;
};

struct MomentSettings {
    std::vector<int> p = {1, 2};
    std::vector<double> t = {0.5, 1.0};
    double delta = 1e-3;
    friend bool operator==(const MomentSettings&, const MomentSettings&) = default;
};

struct ConvergenceSettings {
    std::vector<double> deltas = {2e-2, 1e-2, 4e-3, 2e-3, 1e-3};
    /// 0 picks the default reference resolution.
    double reference_delta = 0.0;
    /// "auto" (closed form when available), "closed_form" or "fine_grid".
    std::string reference = "auto";
    friend bool operator==(const ConvergenceSettings&, const ConvergenceSettings&) = default;
};

struct StabilitySettings {
    std::vector<double> thetas = {0.0, 0.25, 0.5, 1.0};
    std::vector<double> deltas = {2.0, 1.0, 0.5};
    double span = 50.0;  ///< largest n delta
    bool running_sup = false;
    friend bool operator==(const StabilitySettings&, const StabilitySettings&) = default;
};

struct ValidateSettings {
    SamplingGrid grid;
    /// Empty means every assumption the model declares constants for.
    std::vector<Assumption> assumptions;
    std::vector<double> bound_times;     ///< empty skips the moment-bound check
    double bound_h = 1.0;
    double bound_delta = 1e-3;
    std::vector<double> envelope_times;  ///< empty skips the envelope check
    LyapunovCertificate certificate;
    double envelope_delta = 1e-2;
    double envelope_tolerance = 0.15;

    friend bool operator==(const ValidateSettings&, const ValidateSettings&) = default;
};

struct RunConfig {
    Command command = Command::convergence;
    Preset preset = Preset::desk;
    ModelChoice model = BuiltinModel{builtin::BlackScholes{}};
    StabilityIndex alpha{0.9};
    double theta = 1.0;
    double horizon = 1.0;
    MonteCarloConfig mc;
    SolverOptions solver;
    std::string output_dir = "tcsde_out";
    bool emit_svg = false;

    PathSettings path;
    MlSettings ml;
    MomentSettings moments;
    ConvergenceSettings convergence;
    StabilitySettings stability;
    ValidateSettings validate;


    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Defaults for a preset; `paper` raises N and refines the reference.
RunConfig preset_defaults(Preset p);

/// Parses an INI document. Unknown sections and keys are rejected; every
/// error names its `section.key`.
RunConfig parse_config(const std::string& text);

/// Same, after applying `section.key=value` overrides on top of the document.
RunConfig parse_config(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

/// INI document that parses back to `config`.
std::string emit_config(const RunConfig& config, bool include_output_dir = true);

/// Advisory remarks about a valid config, e.g. thetas outside the
/// unconditional stability range.
std::vector<std::string> config_notes(const RunConfig& config);

/// Rough runtime note for the paper preset.
std::optional<std::string> preset_warning(const RunConfig& config);

}  // namespace tcsde
