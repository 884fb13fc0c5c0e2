#pragma once

#include <cstdint>
#include <random>

namespace weakslit {

/// SplitMix64 finalizer; derives independent per-batch seeds from one user seed.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Standard normal variates from std::mt19937_64 via the Box-Muller transform.
///
/// Both the engine and the transform are fully specified, so a seed yields
/// the same stream on every platform (unlike std::normal_distribution).
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed);

    /// Stream for batch `index` of a run seeded with `seed`.
    static NormalStream for_batch(std::uint64_t seed, std::uint64_t index);

    double operator()();

private:
    double uniform_open(); // (0, 1]

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace weakslit
