#include "weakslit/rng.hpp"

#include <cmath>
#include <numbers>

namespace weakslit {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

NormalStream::NormalStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

NormalStream NormalStream::for_batch(std::uint64_t seed, std::uint64_t index) {
    return NormalStream(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double NormalStream::uniform_open() {
    // 53 random bits mapped to (0, 1]
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 2.0 * std::numbers::pi * uniform_open();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

} // namespace weakslit
