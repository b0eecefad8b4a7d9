#include "tcsde/stochastic_clock.hpp"

#include "tcsde/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tcsde {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void check_delta(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw DomainError("stochastic_clock", "step delta must be finite and > 0");
    }
}

std::vector<double> stopped_values(StabilityIndex alpha, double delta, double horizon,
                                   std::size_t extra, RandomStream& rng, std::size_t max_steps) {
    check_delta(delta);
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw DomainError("stochastic_clock", "horizon must be finite and > 0");
    }
    std::vector<double> values;
    values.reserve(alpha.deterministic()
                       ? static_cast<std::size_t>(horizon / delta) + extra + 2
                       : 64);
    values.push_back(0.0);
    std::size_t remaining = extra;
    bool crossed = false;
    while (!crossed || remaining > 0) {
        if (values.size() > max_steps) {
            std::ostringstream msg;
            msg << "subordinator path exceeded " << max_steps << " steps before passing horizon "
                << horizon;
            throw ResourceError("stochastic_clock", msg.str());
        }
        double next = 0.0;
        if (alpha.deterministic()) {
            next = static_cast<double>(values.size()) * delta;
        } else {
            next = values.back() + sample_stable_increment(alpha, delta, rng);
        }
        values.push_back(next);
        if (crossed) {
            --remaining;
        } else if (next > horizon) {
            crossed = true;
        }
    }
    return values;
}

}  // namespace

SeedRecord derive_seed(std::uint64_t master_seed, std::uint64_t path_index, StreamTag tag) {
    const auto tag_word = static_cast<std::uint64_t>(tag);
    const std::uint64_t a = splitmix64(master_seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(path_index + 0x632be59bd9b4e019ULL));
    const std::uint64_t hi = splitmix64(b ^ (tag_word * 0xd1b54a32d192ed03ULL));
    const std::uint64_t lo = splitmix64(hi ^ b ^ 0x8cb92ba72f3d8dd7ULL);
    return {hi, lo};
}

RandomStream::RandomStream(SeedRecord seed) : seed_(seed) {
    const std::array<std::uint32_t, 4> words = {
        static_cast<std::uint32_t>(seed.hi >> 32), static_cast<std::uint32_t>(seed.hi),
        static_cast<std::uint32_t>(seed.lo >> 32), static_cast<std::uint32_t>(seed.lo)};
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
}

double RandomStream::uniform_open() {
    for (;;) {
        const double u = std::generate_canonical<double, 53>(engine_);
        if (u > 0.0 && u < 1.0) {
            return u;
        }
    }
}

double RandomStream::exponential() { return -std::log(uniform_open()); }

double RandomStream::normal() { return normal_(engine_); }

SubordinatorPath::SubordinatorPath(StabilityIndex alpha, double delta, double horizon,
                                   std::vector<double> values)
    : alpha_(alpha), delta_(delta), horizon_(horizon), values_(std::move(values)) {
    check_delta(delta);
    if (!(horizon > 0.0)) {
        throw DomainError("stochastic_clock", "horizon must be > 0");
    }
    if (values_.size() < 2 || values_.front() != 0.0) {
        throw DomainError("stochastic_clock", "subordinator path must start at 0 and cross the horizon");
    }
    for (std::size_t i = 1; i < values_.size(); ++i) {
        if (!(values_[i] > values_[i - 1])) {
            throw DomainError("stochastic_clock", "subordinator path must be strictly increasing");
        }
    }
    const std::size_t n = values_.size() - 2;
    if (!(values_[n] <= horizon && horizon < values_[n + 1])) {
        throw DomainError("stochastic_clock", "path must satisfy D_N <= horizon < D_{N+1}");
    }
}

std::size_t InverseSubordinatorPath::index_at(double t) const {
    if (!(t >= 0.0) || t > source_->horizon()) {
        std::ostringstream msg;
        msg << "inverse subordinator evaluated at t=" << t << " outside [0, "
            << source_->horizon() << "]";
        throw DomainError("stochastic_clock", msg.str());
    }
    const auto values = source_->values();
    const auto it = std::upper_bound(values.begin(), values.end(), t);
    return static_cast<std::size_t>(it - values.begin()) - 1;
}

double InverseSubordinatorPath::operator()(double t) const {
    return static_cast<double>(index_at(t)) * source_->delta();
}

double sample_stable_increment(StabilityIndex alpha, double delta, RandomStream& rng) {
    check_delta(delta);
    if (alpha.deterministic()) {
        return delta;
    }
    const double a = alpha.value();
    const double u = std::numbers::pi * rng.uniform_open();
    const double w = rng.exponential();
    // Kanter's representation of the one-sided stable law.
    const double s = std::sin(a * u) / std::pow(std::sin(u), 1.0 / a) *
                     std::pow(std::sin((1.0 - a) * u) / w, (1.0 - a) / a);
    return std::pow(delta, 1.0 / a) * s;
}

SubordinatorPath simulate_subordinator(StabilityIndex alpha, double delta, double horizon,
                                       RandomStream& rng, std::size_t max_steps) {
    auto values = stopped_values(alpha, delta, horizon, 0, rng, max_steps);
    return SubordinatorPath(alpha, delta, horizon, std::move(values));
}

std::vector<double> subordinator_steps(StabilityIndex alpha, double delta, std::size_t n_steps,
                                       RandomStream& rng) {
    check_delta(delta);
    std::vector<double> values(n_steps + 1, 0.0);
    for (std::size_t i = 1; i <= n_steps; ++i) {
        values[i] = alpha.deterministic() ? static_cast<double>(i) * delta
                                          : values[i - 1] + sample_stable_increment(alpha, delta, rng);
    }
    return values;
}

double invert_path(const InverseSubordinatorPath& path, double t) { return path(t); }

std::vector<double> brownian_increments(std::size_t n, double delta, RandomStream& rng) {
    check_delta(delta);
    const double scale = std::sqrt(delta);
    std::vector<double> out(n);
    for (auto& v : out) {
        v = scale * rng.normal();
    }
    return out;
}

CoupledRealization::CoupledRealization(StabilityIndex alpha, double fine_delta, double horizon,
                                       std::size_t max_multiple, RandomStream& clock_rng,
                                       RandomStream& noise_rng, std::size_t max_steps)
    : alpha_(alpha),
      fine_delta_(fine_delta),
      horizon_(horizon),
      max_multiple_(max_multiple),
      noise_seed_(noise_rng.seed()) {
    if (max_multiple == 0) {
        throw DomainError("stochastic_clock", "max_multiple must be >= 1");
    }
    values_ = stopped_values(alpha, fine_delta, horizon, max_multiple - 1, clock_rng, max_steps);
    noise_ = brownian_increments(values_.size() - 1, fine_delta, noise_rng);
}

SubordinatorPath CoupledRealization::clock(std::size_t m) const {
    if (m == 0 || m > max_multiple_) {
        throw DomainError("stochastic_clock", "coarsening factor outside [1, max_multiple]");
    }
    std::vector<double> coarse;
    coarse.push_back(values_.front());
    for (std::size_t i = m; i < values_.size(); i += m) {
        coarse.push_back(values_[i]);
        if (values_[i] > horizon_) {
            break;
        }
    }
    return SubordinatorPath(alpha_, static_cast<double>(m) * fine_delta_, horizon_,
                            std::move(coarse));
}

BrownianDriver CoupledRealization::noise(std::size_t m) const {
    if (m == 0 || m > max_multiple_) {
        throw DomainError("stochastic_clock", "coarsening factor outside [1, max_multiple]");
    }
    BrownianDriver out;
    out.delta = static_cast<double>(m) * fine_delta_;
    out.seed_lineage = noise_seed_;
    const std::size_t blocks = noise_.size() / m;
    out.increments.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            s += noise_[b * m + j];
        }
        out.increments.push_back(s);
    }
    return out;
}

}  // namespace tcsde
