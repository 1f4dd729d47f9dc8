#include "cfotfs/rng.hpp"

#include <cmath>
#include <numbers>

namespace cfotfs {

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t key = mix64(seed);
    for (std::uint64_t tag : tags) {
        key = mix64(key ^ mix64(tag + 0x632BE59BD9B4E019ull));
    }
    return key;
}

double Rng::uniform_open(double lo, double hi) noexcept {
    double u = 0.0;
    do {
        u = uniform();
    } while (u == 0.0);
    return lo + (hi - lo) * u;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    if (span == 0) {
        return static_cast<std::int64_t>(next_u64());
    }
    // rejection sampling removes modulo bias
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
    std::uint64_t x = next_u64();
    while (x >= limit) {
        x = next_u64();
    }
    return lo + static_cast<std::int64_t>(x % span);
}

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::complex<double> Rng::complex_normal(double variance) noexcept {
    const double scale = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {scale * re, scale * im};
}

}  // namespace cfotfs
