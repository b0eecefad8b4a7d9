#pragma once

#include "tcsde/rng.hpp"
#include "tcsde/special_fn.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tcsde {

inline constexpr std::size_t kMaxPathSteps = 1'000'000'000;

/// Discretized stable subordinator D on the grid {n delta}, stopped at the
/// first index N+1 with D_{(N+1) delta} > horizon.
class SubordinatorPath {
public:
    /// Validates every path invariant; throws DomainError otherwise.
    SubordinatorPath(StabilityIndex alpha, double delta, double horizon, std::vector<double> values);

    StabilityIndex alpha() const noexcept { return alpha_; }
    double delta() const noexcept { return delta_; }
    double horizon() const noexcept { return horizon_; }
    std::span<const double> values() const noexcept { return values_; }

    /// N: values[N] <= horizon < values[N+1].
    std::size_t last_index() const noexcept { return values_.size() - 2; }
    /// Waiting time Z_i = values[i] - values[i-1], i >= 1.
    double waiting_time(std::size_t i) const { return values_.at(i) - values_.at(i - 1); }

private:
    StabilityIndex alpha_;
    double delta_;
    double horizon_;
    std::vector<double> values_;
};

/// Step-function inverse E~_t = n delta for t in [D_{n delta}, D_{(n+1) delta}).
/// Holds a non-owning reference; the source path must outlive it.
class InverseSubordinatorPath {
public:
    explicit InverseSubordinatorPath(const SubordinatorPath& source) : source_(&source) {}

    const SubordinatorPath& source() const noexcept { return *source_; }
    double jump_size() const noexcept { return source_->delta(); }

    /// The n with D_{n delta} <= t < D_{(n+1) delta}.
    std::size_t index_at(double t) const;
    double operator()(double t) const;

private:
    const SubordinatorPath* source_;
};

/// Brownian increments B_{(n+1) delta} - B_{n delta}.
struct BrownianDriver {
    double delta = 0.0;
    std::vector<double> increments;
    SeedRecord seed_lineage;
};

/// delta^{1/alpha} S with S totally skewed positive stable, E[exp(-s S)] = exp(-s^alpha).
/// alpha == 1 returns delta exactly.
double sample_stable_increment(StabilityIndex alpha, double delta, RandomStream& rng);

SubordinatorPath simulate_subordinator(StabilityIndex alpha, double delta, double horizon,
                                       RandomStream& rng, std::size_t max_steps = kMaxPathSteps);

/// Unstopped subordinator values D_0 .. D_{n_steps delta}.
std::vector<double> subordinator_steps(StabilityIndex alpha, double delta, std::size_t n_steps,
                                       RandomStream& rng);

double invert_path(const InverseSubordinatorPath& path, double t);

std::vector<double> brownian_increments(std::size_t n, double delta, RandomStream& rng);

/// One fine-resolution realization of (D, B) shared by every coarser grid
/// delta = m * fine_delta. Coarse clock values are read directly off the
/// fine cumulative sums and coarse Brownian increments are block sums, so
/// all resolutions see the same underlying randomness.
class CoupledRealization {
public:
    /// Simulates the fine clock until it passes `horizon`, then `max_multiple - 1`
    /// further increments so every m <= max_multiple has its own crossing.
    CoupledRealization(StabilityIndex alpha, double fine_delta, double horizon,
                       std::size_t max_multiple, RandomStream& clock_rng, RandomStream& noise_rng,
                       std::size_t max_steps = kMaxPathSteps);

    double fine_delta() const noexcept { return fine_delta_; }
    std::size_t max_multiple() const noexcept { return max_multiple_; }
    std::span<const double> fine_values() const noexcept { return values_; }
    std::span<const double> fine_increments() const noexcept { return noise_; }

    SubordinatorPath clock(std::size_t m) const;
    BrownianDriver noise(std::size_t m) const;

private:
    StabilityIndex alpha_;
    double fine_delta_;
    double horizon_;
    std::size_t max_multiple_;
    std::vector<double> values_;
    std::vector<double> noise_;
    SeedRecord noise_seed_;
};

}  // namespace tcsde
