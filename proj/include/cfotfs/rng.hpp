#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>

namespace cfotfs {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives an independent stream key from a master seed and a path of integer tags.
/// The same (seed, tags) always yields the same key, regardless of call order.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept;

/// Counter-based generator: output n is mix64(key + n * golden). Cheap to
/// construct, so every realization / link / worker gets its own stream.
class Rng {
public:
    explicit Rng(std::uint64_t key) noexcept : key_(mix64(key)) {}

    std::uint64_t next_u64() noexcept {
        return mix64(key_ + (counter_++) * 0x9E3779B97F4A7C15ull);
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (lo, hi); never returns either endpoint.
    double uniform_open(double lo, double hi) noexcept;

    /// Uniform integer on the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;

    /// Standard normal via Box-Muller (both outputs used).
    double normal() noexcept;

    /// Circularly-symmetric complex normal with E|x|^2 = variance.
    std::complex<double> complex_normal(double variance) noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cfotfs
