#include "cfotfs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cfotfs/errors.hpp"
#include "cfotfs/rng.hpp"

namespace cfotfs {

void OtfsGrid::validate() const {
    if (doppler_bins < 1 || delay_bins < 1) {
        throw PreconditionViolation("OTFS grid needs N >= 1 and M >= 1");
    }
    if (!(subcarrier_spacing_hz > 0.0) || !(symbol_duration_s > 0.0)) {
        throw PreconditionViolation("subcarrier spacing and symbol duration must be positive");
    }
    if (std::abs(subcarrier_spacing_hz * symbol_duration_s - 1.0) > 1e-9) {
        throw PreconditionViolation("OTFS grid must be critically sampled (T * df = 1)");
    }
}

OtfsGrid OtfsGrid::critically_sampled(int doppler_bins, int delay_bins, double subcarrier_spacing_hz,
                                      double carrier_hz) {
    OtfsGrid grid{doppler_bins, delay_bins, subcarrier_spacing_hz, 1.0 / subcarrier_spacing_hz, carrier_hz};
    grid.validate();
    return grid;
}

double PathSet::total_variance() const noexcept {
    return std::accumulate(paths.begin(), paths.end(), 0.0,
                           [](double acc, const DdPath& p) { return acc + p.variance; });
}

bool PathSet::has_distinct_delays() const noexcept {
    std::set<int> seen;
    for (const auto& p : paths) {
        if (!seen.insert(p.delay_tap).second) {
            return false;
        }
    }
    return true;
}

int max_doppler_index(double speed_kmh, const OtfsGrid& grid) {
    if (speed_kmh < 0.0) {
        throw PreconditionViolation("speed must be non-negative");
    }
    const double nu_max = grid.carrier_hz * (speed_kmh / 3.6) / kSpeedOfLight;
    return static_cast<int>(std::ceil(nu_max * grid.doppler_bins * grid.symbol_duration_s));
}

PathSet sample_paths(double pair_beta, const PathSampling& sampling, const OtfsGrid& grid, std::uint64_t seed) {
    if (sampling.num_paths < 1) {
        throw PreconditionViolation("a link needs at least one path");
    }
    if (!(pair_beta > 0.0)) {
        throw PreconditionViolation("link variance must be positive");
    }
    if (sampling.max_delay_tap < 0 || sampling.max_delay_tap > grid.delay_bins - 1) {
        throw PreconditionViolation("max delay tap outside [0, M-1]");
    }
    if (sampling.max_doppler_tap < 0 ||
        (sampling.max_doppler_tap > 0 && sampling.max_doppler_tap > grid.doppler_bins / 2 - 1)) {
        throw PreconditionViolation("max Doppler tap outside [0, N/2 - 1]");
    }
    if (sampling.distinct_delays && sampling.num_paths > sampling.max_delay_tap + 1) {
        throw InfeasibleConfiguration("distinct delays need L <= l_max + 1");
    }

    Rng rng(derive_seed(seed, {0x7061746873ull}));
    const int count = sampling.num_paths;
    std::vector<int> delays(count);
    if (sampling.distinct_delays) {
        std::vector<int> pool(sampling.max_delay_tap + 1);
        std::iota(pool.begin(), pool.end(), 0);
        // partial Fisher-Yates: first `count` entries form a uniform random subset
        for (int i = 0; i < count; ++i) {
            const auto j = static_cast<int>(rng.uniform_int(i, static_cast<int>(pool.size()) - 1));
            std::swap(pool[i], pool[j]);
            delays[i] = pool[i];
        }
    } else {
        for (int& d : delays) {
            d = static_cast<int>(rng.uniform_int(0, sampling.max_delay_tap));
        }
    }

    const double per_path =
        sampling.profile == PowerProfile::kUniform ? pair_beta / static_cast<double>(count) : pair_beta;

    PathSet set;
    set.paths.resize(count);
    for (int i = 0; i < count; ++i) {
        DdPath& path = set.paths[i];
        path.delay_tap = delays[i];
        path.doppler_tap = static_cast<int>(rng.uniform_int(-sampling.max_doppler_tap, sampling.max_doppler_tap));
        path.fractional_doppler = sampling.fractional ? rng.uniform_open(-0.5, 0.5) : 0.0;
        path.variance = per_path;
    }
    return resample_gains(std::move(set), derive_seed(seed, {0x6761696Eull}));
}

PathSet resample_gains(PathSet set, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0x726573616D70ull}));
    for (auto& path : set.paths) {
        if (!(path.variance > 0.0)) {
            throw InvalidStatistics("path variance must be positive");
        }
        path.gain = rng.complex_normal(path.variance);
    }
    return set;
}

}  // namespace cfotfs
