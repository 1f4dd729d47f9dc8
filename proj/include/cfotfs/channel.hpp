#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace cfotfs {

/// Speed of light used for Doppler computations [m/s].
inline constexpr double kSpeedOfLight = 2.998e8;

/// Delay-Doppler lattice {k / (N T), l / (M df)}.
struct OtfsGrid {
    int doppler_bins = 20;  ///< N
    int delay_bins = 30;    ///< M
    double subcarrier_spacing_hz = 15e3;
    double symbol_duration_s = 1.0 / 15e3;
    double carrier_hz = 4e9;

    int size() const noexcept { return doppler_bins * delay_bins; }
    double bandwidth_hz() const noexcept { return delay_bins * subcarrier_spacing_hz; }

    /// Critically sampled grid (T df = 1) with N, M >= 1.
    void validate() const;

    static OtfsGrid critically_sampled(int doppler_bins, int delay_bins, double subcarrier_spacing_hz,
                                       double carrier_hz);
};

/// One propagation path of an AP-user link.
struct DdPath {
    int delay_tap = 0;
    /// Signed integer Doppler tap; enters the operator as a real exponent.
    int doppler_tap = 0;
    double fractional_doppler = 0.0;
    double variance = 1.0;
    std::complex<double> gain{1.0, 0.0};

    double doppler() const noexcept { return doppler_tap + fractional_doppler; }
};

struct PathSet {
    int ap = 0;
    int user = 0;
    std::vector<DdPath> paths;

    double total_variance() const noexcept;
    bool has_distinct_delays() const noexcept;
};

enum class PowerProfile {
    kUniform,    ///< beta_i = beta_pq / L
    kReplicate,  ///< beta_i = beta_pq
};

struct PathSampling {
    int num_paths = 5;
    int max_delay_tap = 2;
    int max_doppler_tap = 3;
    bool fractional = true;
    bool distinct_delays = false;
    PowerProfile profile = PowerProfile::kUniform;
};

/// k_max = ceil(nu_max N T) with nu_max = f_c v / c.
int max_doppler_index(double speed_kmh, const OtfsGrid& grid);

/// Draws taps (uniform), fractional Doppler and CN(0, beta_i) gains for one link.
PathSet sample_paths(double pair_beta, const PathSampling& sampling, const OtfsGrid& grid, std::uint64_t seed);

/// Redraws gains only; taps and variances are kept.
PathSet resample_gains(PathSet paths, std::uint64_t seed);

}  // namespace cfotfs
