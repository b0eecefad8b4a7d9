#pragma once

#include "tcsde/errors.hpp"
#include "tcsde/model.hpp"
#include "tcsde/special_fn.hpp"
#include "tcsde/theta_scheme.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcsde {

/// Environment variable holding the default worker cap.
inline constexpr const char* kConcurrencyEnv = "TCSDE_MAX_THREADS";

struct MonteCarloConfig {
    std::size_t n_paths = 500;
    std::uint64_t master_seed = 2024;
    std::size_t max_concurrency = 0;  ///< 0 = automatic

    void validate() const;
    friend bool operator==(const MonteCarloConfig&, const MonteCarloConfig&) = default;
};

/// Worker count for a requested cap: the cap itself, else the environment
/// default, else the hardware concurrency.
std::size_t resolve_concurrency(std::size_t requested);

/// Runs body(i) for i in [0, n_paths). Results must be written to
/// per-index slots; the first exception by path index is rethrown.
void for_each_path(const MonteCarloConfig& mc, const std::function<void(std::size_t)>& body);

/// Pairwise summation in index order.
double pairwise_sum(std::span<const double> v);

struct SampleStats {
    double mean = 0.0;
    double se = 0.0;  ///< standard error of the mean
    std::size_t n = 0;
};

SampleStats sample_stats(std::span<const double> v);

/// A run lost more paths to solver failures than the budget allows.
class ExperimentFailure : public Error {
public:
    explicit ExperimentFailure(const std::string& what) : Error("experiments", what) {}
};

inline constexpr double kFailureBudget = 0.01;

struct ReferenceRule {
    enum class Kind { closed_form, fine_grid };
    Kind kind = Kind::fine_grid;
    double delta0 = 1e-4;

    friend bool operator==(const ReferenceRule&, const ReferenceRule&) = default;
};

const char* to_string(ReferenceRule::Kind k);

struct StrongErrorRow {
    double delta = 0.0;
    double mse = 0.0;
    double se = 0.0;
    std::size_t n_eff = 0;
};

struct StrongErrorReport {
    std::vector<StrongErrorRow> rows;  ///< delta descending
    ReferenceRule reference_rule;
    std::size_t n_paths = 0;
    std::size_t failed_paths = 0;
    bool step_size_warning = false;
};

struct StrongErrorOptions {
    /// Closed form when the model has one and this is set; fine grid otherwise.
    bool prefer_closed_form = true;
    /// Reference resolution; empty picks the largest divisor of the finest
    /// delta that is <= 1e-4.
    std::optional<double> reference_delta;
    SolverOptions solver;
};

/// Largest delta_min / k (k integer) not exceeding `cap`.
double default_reference_delta(double delta_min, double cap = 1e-4);

StrongErrorReport strong_error(const ModelDescriptor& model, StabilityIndex alpha, double theta,
                               std::vector<double> delta_grid, double horizon,
                               const MonteCarloConfig& mc, const StrongErrorOptions& opts = {});

struct ConvergenceReport {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<StrongErrorRow> rows;
    std::vector<std::string> warnings;
};

/// Least squares of ln(mse)/2 on ln(delta).
ConvergenceReport fit_order(const StrongErrorReport& report);

struct StabilityCurve {
    std::vector<double> times;  ///< n delta
    std::vector<double> msq;
    std::vector<double> se;
    std::optional<std::vector<double>> envelope;
    /// msq[0] |phi|^n when -1 < phi <= 0, where no decay rate exists.
    std::optional<std::vector<double>> geometric_envelope;
    std::optional<StabilityThreshold> threshold;
    /// Mean of 1 + sup_{k<=n} |X_k|^h, when requested.
    std::optional<std::vector<double>> running_sup;
    bool truncated = false;  ///< stopped at the first non-finite average
    bool divergent = false;  ///< non-finite or above 1e3 msq[0]
    bool decayed = false;    ///< final msq below 1e-3 msq[0]
    std::size_t failed_paths = 0;
};

struct StabilityOptions {
    bool record_running_sup = false;
    SolverOptions solver;
};

StabilityCurve stability_curve(const ModelDescriptor& model, StabilityIndex alpha, double theta,
                               double delta, std::size_t n_steps, const MonteCarloConfig& mc,
                               const StabilityOptions& opts = {});

/// Indices n with msq[n] > envelope[n] (1 + 3 se[n]/msq[n]).
std::vector<std::size_t> envelope_violations(const StabilityCurve& curve);

struct MomentRow {
    int p = 1;
    double t = 0.0;
    double empirical = 0.0;
    double formula = 0.0;
    double se = 0.0;
    double zscore = 0.0;          ///< NaN when se == 0
    double bias_allowance = 0.0;  ///< p delta E[E_t^{p-1}]
    bool within = false;          ///< formula in [emp - 3se, emp + 3se + allowance]
};

std::vector<MomentRow> moment_validation(StabilityIndex alpha, const std::vector<int>& p_list,
                                         const std::vector<double>& t_list, double delta,
                                         const MonteCarloConfig& mc);

struct LyapunovCertificate {
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
    double p = 2.0;

    void validate() const;
    friend bool operator==(const LyapunovCertificate&, const LyapunovCertificate&) = default;
};

/// Grid trajectories used as the exact solution by the moment checks.
struct ReferenceTrajectories {
    double delta = 1e-2;
    double theta = 1.0;
    SolverOptions solver;
};

struct EnvelopeRow {
    double t = 0.0;
    double empirical = 0.0;
    double envelope = 0.0;
    double ratio = 0.0;
};

struct EnvelopeReport {
    std::vector<EnvelopeRow> rows;
    double max_ratio = 0.0;
    double tolerance = 0.15;
    bool passed = false;
    std::optional<double> failure_t;  ///< first t with a non-finite moment
    std::size_t failed_paths = 0;
};

EnvelopeReport ml_envelope_check(const ModelDescriptor& model, StabilityIndex alpha,
                                 const LyapunovCertificate& certificate,
                                 const std::vector<double>& t_grid, const MonteCarloConfig& mc,
                                 const ReferenceTrajectories& ref = {}, double tolerance = 0.15);

struct BoundRow {
    double t = 0.0;
    double empirical = 0.0;
    double se = 0.0;
    double bound = 0.0;
    bool passed = false;  ///< empirical <= bound (1 + 3 se/empirical)
};

struct BoundReport {
    std::vector<BoundRow> rows;
    bool passed = false;
    std::size_t failed_paths = 0;
};

BoundReport exact_moment_bound_check(const ModelDescriptor& model, StabilityIndex alpha, double h,
                                     const std::vector<double>& t_grid, const MonteCarloConfig& mc,
                                     const ReferenceTrajectories& ref = {1e-3, 1.0, {}});

}  // namespace tcsde
