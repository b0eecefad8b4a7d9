#pragma once

#include <cstdint>
#include <random>

namespace tcsde {

/// 128-bit seed of one random stream.
struct SeedRecord {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

/// The subordinator and the Brownian motion never share a stream.
enum class StreamTag : std::uint64_t { clock = 1, noise = 2 };

/// Sub-seed for (master_seed, path_index, tag). A pure function of its
/// inputs, so paths can be generated in any order or concurrently.
SeedRecord derive_seed(std::uint64_t master_seed, std::uint64_t path_index, StreamTag tag);

/// Random-stream handle owned by exactly one path.
class RandomStream {
public:
    explicit RandomStream(SeedRecord seed);

    const SeedRecord& seed() const noexcept { return seed_; }

    /// Uniform on the open interval (0, 1).
    double uniform_open();
    /// Unit-mean exponential, strictly positive.
    double exponential();
    double normal();

private:
    SeedRecord seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace tcsde
