#include "cfotfs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "cfotfs/errors.hpp"
#include "cfotfs/parallel.hpp"
#include "cfotfs/rng.hpp"

namespace cfotfs {

namespace {
constexpr double kBoltzmann = 1.381e-23;
constexpr double kNoiseTemperature = 290.0;
constexpr double kPowerTolerance = 1e-9;
}  // namespace

double noise_power_w(const OtfsGrid& grid, double noise_figure_db) {
    if (noise_figure_db < 0.0) {
        throw PreconditionViolation("noise figure must be non-negative");
    }
    return kBoltzmann * kNoiseTemperature * grid.bandwidth_hz() * std::pow(10.0, noise_figure_db / 10.0);
}

double noise_power_dbm(const OtfsGrid& grid, double noise_figure_db) {
    return 10.0 * std::log10(noise_power_w(grid, noise_figure_db) * 1000.0);
}

NormalizedPowers ExperimentConfig::normalized_powers() const {
    const double noise = noise_power_w(grid, noise_figure_db);
    return {downlink_power_w / noise, uplink_power_w / noise, pilot_power_w / noise};
}

void ExperimentConfig::validate() const {
    network.validate();
    grid.validate();
    if (realizations < 1) {
        throw PreconditionViolation("need at least one realization");
    }
    if (!(downlink_power_w > 0.0 && uplink_power_w > 0.0 && pilot_power_w > 0.0)) {
        throw PreconditionViolation("transmit powers must be positive");
    }
    if (grid.doppler_bins <= guard().doppler_span()) {
        throw InfeasibleConfiguration("Doppler guard does not fit in the frame");
    }
}

ExperimentConfig ExperimentConfig::paper() {
    ExperimentConfig c;
    c.grid = OtfsGrid::critically_sampled(20, 30, 15e3, 4e9);
    c.paths.max_doppler_tap = max_doppler_index(500.0, c.grid);
    return c;
}

ExperimentConfig ExperimentConfig::desk() {
    ExperimentConfig c;
    c.grid = OtfsGrid::critically_sampled(4, 8, 15e3, 4e9);
    c.network.num_aps = 8;
    c.network.num_users = 4;
    c.paths.num_paths = 3;
    c.paths.max_delay_tap = 2;
    c.paths.max_doppler_tap = 0;  // N = 4 leaves no room for a wider Doppler guard
    c.extra_doppler_guard = 0;
    c.realizations = 50;
    c.ap_counts = {4, 8, 12};
    c.user_counts = {2, 4};
    return c;
}

ExperimentConfig ExperimentConfig::validation() {
    ExperimentConfig c;
    c.grid = OtfsGrid::critically_sampled(2, 4, 15e3, 4e9);
    c.network.num_aps = 2;
    c.network.num_users = 2;
    c.paths.num_paths = 2;
    c.paths.max_delay_tap = 1;
    c.paths.max_doppler_tap = 0;
    c.paths.fractional = true;
    c.extra_doppler_guard = 0;
    c.realizations = 10;
    c.ap_counts = {2};
    c.user_counts = {2};
    return c;
}

DownlinkScenario draw_scenario(const ExperimentConfig& config, ShadowingMode mode, int num_aps, int num_users,
                               std::uint64_t seed) {
    NetworkConfig net = config.network;
    net.num_aps = num_aps;
    net.num_users = num_users;
    net.shadowing = mode;
    Layout layout = apply_shadowing(place_network(net, seed), net, derive_seed(seed, {1}));
    std::vector<PathSet> links;
    links.reserve(static_cast<std::size_t>(num_aps) * num_users);
    for (int p = 0; p < num_aps; ++p) {
        for (int q = 0; q < num_users; ++q) {
            PathSet set = sample_paths(layout.beta(p, q), config.paths, config.grid,
                                       derive_seed(seed, {2, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(q)}));
            set.ap = p;
            set.user = q;
            links.push_back(std::move(set));
        }
    }
    return make_scenario(config.grid, std::move(links), num_aps, num_users, config.normalized_powers(),
                         config.guard());
}

RealizationResult run_realization(const ExperimentConfig& config, ShadowingMode mode, int num_aps, int num_users,
                                  int index) {
    const std::uint64_t seed =
        derive_seed(config.seed, {static_cast<std::uint64_t>(mode), static_cast<std::uint64_t>(num_aps),
                                  static_cast<std::uint64_t>(num_users), static_cast<std::uint64_t>(index)});
    const DownlinkScenario scenario = draw_scenario(config, mode, num_aps, num_users, seed);

    RealizationResult result;
    for (int p = 0; p < num_aps; ++p) {
        result.max_power_deviation =
            std::max(result.max_power_deviation, std::abs(power_load(scenario.stats, scenario.power, p) - 1.0));
    }
    if (result.max_power_deviation > kPowerTolerance) {
        throw Error("per-AP power constraint not met with equality");
    }
    result.rate.resize(static_cast<std::size_t>(num_users));
    result.throughput_bps.resize(static_cast<std::size_t>(num_users));
    for (int q = 0; q < num_users; ++q) {
        const RateReport report = config.paths.distinct_delays ? rate_distinct_delays(scenario, q)
                                                               : achievable_rate(scenario, q, config.isi);
        result.rate[static_cast<std::size_t>(q)] = report.rate;
        result.throughput_bps[static_cast<std::size_t>(q)] = report.throughput_bps;
    }
    return result;
}

ValidationRun run_validation(const ExperimentConfig& config, const MonteCarloOptions& options, double gate,
                             double sigmas) {
    config.validate();
    const ShadowingMode mode =
        config.shadowing_modes.empty() ? ShadowingMode::kUncorrelated : config.shadowing_modes.front();
    ValidationRun run;
    run.passed = true;
    for (int i = 0; i < config.realizations; ++i) {
        const std::uint64_t seed = derive_seed(config.seed, {0x76616C6964ull, static_cast<std::uint64_t>(i)});
        const DownlinkScenario scenario =
            draw_scenario(config, mode, config.network.num_aps, config.network.num_users, seed);
        InstanceValidation inst;
        inst.index = i;
        inst.report = validate_rate(scenario, derive_seed(seed, {3}), options, gate, config.isi);
        Rng pick(derive_seed(seed, {4}));
        inst.checked_user = static_cast<int>(pick.uniform_int(0, scenario.num_users - 1));
        inst.checked_bin = static_cast<int>(pick.uniform_int(0, scenario.grid.size() - 1));
        const BinValidation& checked =
            inst.report.bins.at(static_cast<std::size_t>(inst.checked_user) * scenario.grid.size() + inst.checked_bin);
        inst.terms_pass = checked.terms_within(sigmas);
        inst.sinr_pass = inst.report.passed;
        for (const auto& b : inst.report.bins) {
            for (double z : {b.z_desired, b.z_beamforming_uncertainty, b.z_inter_symbol, b.z_inter_user}) {
                ++run.terms_checked;
                run.terms_within_sigmas += std::abs(z) <= sigmas ? 1 : 0;
            }
        }
        run.max_relative_error = std::max(run.max_relative_error, inst.report.max_relative_error);
        run.passed = run.passed && inst.terms_pass && inst.sinr_pass;
        run.instances.push_back(std::move(inst));
    }
    return run;
}

double quantile(std::vector<double> samples, double probability) {
    if (samples.empty()) {
        throw PreconditionViolation("quantile of an empty sample");
    }
    std::sort(samples.begin(), samples.end());
    const double h = (static_cast<double>(samples.size()) - 1.0) * probability;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

SummaryStats summary_stats(const std::vector<double>& samples) {
    SummaryStats s;
    s.median = quantile(samples, 0.5);
    s.p5 = quantile(samples, 0.05);
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    return s;
}

std::vector<CdfTable> run_cdf(const ExperimentConfig& config) {
    config.validate();
    std::vector<CdfTable> tables;
    for (ShadowingMode mode : config.shadowing_modes) {
        std::vector<RealizationResult> results(static_cast<std::size_t>(config.realizations));
        parallel_for(results.size(), config.threads, [&](std::size_t i) {
            results[i] = run_realization(config, mode, config.network.num_aps, config.network.num_users,
                                         static_cast<int>(i));
        });
        CdfTable table;
        table.mode = mode;
        for (std::size_t i = 0; i < results.size(); ++i) {
            table.max_power_deviation = std::max(table.max_power_deviation, results[i].max_power_deviation);
            for (std::size_t q = 0; q < results[i].rate.size(); ++q) {
                table.samples.push_back({static_cast<int>(i), static_cast<int>(q), results[i].rate[q],
                                         results[i].throughput_bps[q] / 1e6});
            }
        }
        for (const auto& s : table.samples) {
            table.sorted_mbps.push_back(s.throughput_mbps);
        }
        std::sort(table.sorted_mbps.begin(), table.sorted_mbps.end());
        const double n = static_cast<double>(table.sorted_mbps.size());
        for (std::size_t i = 0; i < table.sorted_mbps.size(); ++i) {
            table.cdf.push_back(static_cast<double>(i + 1) / n);
        }
        table.summary = summary_stats(table.sorted_mbps);
        tables.push_back(std::move(table));
    }
    return tables;
}

std::vector<SweepPoint> run_vs_aps(const ExperimentConfig& config, const std::vector<int>& ap_counts,
                                   const std::vector<int>& user_counts) {
    config.validate();
    if (ap_counts.empty() || user_counts.empty()) {
        throw PreconditionViolation("sweep needs at least one AP count and one user count");
    }
    std::vector<SweepPoint> points;
    for (ShadowingMode mode : config.shadowing_modes) {
        for (int users : user_counts) {
            for (int aps : ap_counts) {
                std::vector<RealizationResult> results(static_cast<std::size_t>(config.realizations));
                parallel_for(results.size(), config.threads, [&](std::size_t i) {
                    results[i] = run_realization(config, mode, aps, users, static_cast<int>(i));
                });
                SweepPoint pt;
                pt.mode = mode;
                pt.num_aps = aps;
                pt.num_users = users;
                double rate_sum = 0.0;
                for (const auto& r : results) {
                    const double mean_tp = std::accumulate(r.throughput_bps.begin(), r.throughput_bps.end(), 0.0) /
                                           static_cast<double>(users) / 1e6;
                    pt.realization_means_mbps.push_back(mean_tp);
                    rate_sum += std::accumulate(r.rate.begin(), r.rate.end(), 0.0) / static_cast<double>(users);
                    pt.max_power_deviation = std::max(pt.max_power_deviation, r.max_power_deviation);
                }
                pt.mean_rate = rate_sum / static_cast<double>(results.size());
                pt.mean_throughput_mbps =
                    std::accumulate(pt.realization_means_mbps.begin(), pt.realization_means_mbps.end(), 0.0) /
                    static_cast<double>(results.size());
                points.push_back(std::move(pt));
            }
        }
    }
    return points;
}

Interval bootstrap_mean_difference(const std::vector<double>& a, const std::vector<double>& b, double level,
                                   int resamples, std::uint64_t seed) {
    if (a.empty() || b.empty() || resamples < 1) {
        throw PreconditionViolation("bootstrap needs non-empty samples");
    }
    Rng rng(derive_seed(seed, {0x626F6F74ull}));
    std::vector<double> diffs(static_cast<std::size_t>(resamples));
    for (auto& d : diffs) {
        double sa = 0.0, sb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            sa += a[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(a.size()) - 1))];
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            sb += b[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(b.size()) - 1))];
        }
        d = sa / static_cast<double>(a.size()) - sb / static_cast<double>(b.size());
    }
    const double tail = (1.0 - level) / 2.0;
    return {quantile(diffs, tail), quantile(diffs, 1.0 - tail)};
}

std::string to_string(ShadowingMode mode) {
    return mode == ShadowingMode::kCorrelated ? "corr" : "uncorr";
}

namespace {
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}
}  // namespace

std::string cdf_csv(const std::vector<CdfTable>& tables) {
    std::string out = "shadowing,realization,user,rate_bps_hz,throughput_mbps\n";
    for (const auto& t : tables) {
        for (const auto& s : t.samples) {
            out += to_string(t.mode) + ',' + std::to_string(s.realization) + ',' + std::to_string(s.user) + ',' +
                   fmt(s.rate) + ',' + fmt(s.throughput_mbps) + '\n';
        }
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::string out = "shadowing,num_aps,num_users,mean_rate_bps_hz,mean_throughput_mbps,realizations\n";
    for (const auto& p : points) {
        out += to_string(p.mode) + ',' + std::to_string(p.num_aps) + ',' + std::to_string(p.num_users) + ',' +
               fmt(p.mean_rate) + ',' + fmt(p.mean_throughput_mbps) + ',' +
               std::to_string(p.realization_means_mbps.size()) + '\n';
    }
    return out;
}

}  // namespace cfotfs
