#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfotfs/channel.hpp"
#include "cfotfs/estimation.hpp"
#include "cfotfs/geometry.hpp"
#include "cfotfs/montecarlo.hpp"
#include "cfotfs/rate.hpp"

namespace cfotfs {

struct ExperimentConfig {
    NetworkConfig network;
    OtfsGrid grid;
    PathSampling paths;
    int extra_doppler_guard = 1;  ///< k_hat
    double downlink_power_w = 1.0;
    double uplink_power_w = 0.2;
    double pilot_power_w = 1.0;
    double noise_figure_db = 9.0;
    int realizations = 200;
    std::uint64_t seed = 1;
    IsiWeight isi = IsiWeight::kRowSum;
    std::vector<ShadowingMode> shadowing_modes{ShadowingMode::kUncorrelated};
    std::vector<int> ap_counts{10, 20, 30, 40, 50};
    std::vector<int> user_counts{20, 40};
    unsigned threads = 0;

    GuardConfig guard() const noexcept {
        return {paths.max_delay_tap, paths.max_doppler_tap, extra_doppler_guard};
    }
    NormalizedPowers normalized_powers() const;
    void validate() const;

    /// N=20, M=30, 40 APs, 20 users, 200 realizations.
    static ExperimentConfig paper();
    /// N=4, M=8, 8 APs, 4 users, 50 realizations.
    static ExperimentConfig desk();
    /// N=2, M=4, 2 APs, 2 users, 2 paths with fractional Doppler: small enough for
    /// matrix-level Monte Carlo at every bin.
    static ExperimentConfig validation();
};

/// 10 log10(k_B T_0 M df F) + 30.
double noise_power_dbm(const OtfsGrid& grid, double noise_figure_db);
double noise_power_w(const OtfsGrid& grid, double noise_figure_db);

struct RealizationResult {
    std::vector<double> rate;            ///< per user, bit/s/Hz
    std::vector<double> throughput_bps;  ///< per user
    double max_power_deviation = 0.0;    ///< max_p |load_p - 1|
};

/// Layout, shadowing, paths, MMSE statistics and equal power control for one drop.
DownlinkScenario draw_scenario(const ExperimentConfig& config, ShadowingMode mode, int num_aps, int num_users,
                               std::uint64_t seed);

/// One drop: layout, shadowing, paths, statistics, equal power control and closed-form rates.
RealizationResult run_realization(const ExperimentConfig& config, ShadowingMode mode, int num_aps, int num_users,
                                  int index);

struct InstanceValidation {
    int index = 0;
    ValidationReport report;
    int checked_user = 0;  ///< (user, bin) whose four terms are held to the z-score gate
    int checked_bin = 0;
    bool terms_pass = false;
    bool sinr_pass = false;  ///< every bin within the relative SINR gate
};

struct ValidationRun {
    std::vector<InstanceValidation> instances;
    double max_relative_error = 0.0;
    int terms_checked = 0;        ///< all (user, bin, term) comparisons
    int terms_within_sigmas = 0;  ///< of which within the z-score gate
    bool passed = false;
};

/// Draws `config.realizations` instances and compares closed form and simulation on each.
/// One (user, bin) per instance, chosen from the instance seed, must have all four terms
/// within `sigmas` standard errors; every bin must meet the relative SINR gate.
ValidationRun run_validation(const ExperimentConfig& config, const MonteCarloOptions& options, double gate = 0.05,
                             double sigmas = 3.0);

/// Linear-interpolation quantile (rank h = (n - 1) p). Throws on empty input.
double quantile(std::vector<double> samples, double probability);

struct SummaryStats {
    double median = 0.0;
    double p5 = 0.0;  ///< 95%-likely value
    double mean = 0.0;
};
SummaryStats summary_stats(const std::vector<double>& samples);

struct CdfSample {
    int realization = 0;
    int user = 0;
    double rate = 0.0;
    double throughput_mbps = 0.0;
};

struct CdfTable {
    ShadowingMode mode = ShadowingMode::kUncorrelated;
    std::vector<CdfSample> samples;      ///< realization-major order
    std::vector<double> sorted_mbps;     ///< ascending throughput
    std::vector<double> cdf;             ///< (i + 1) / n for sorted_mbps[i]
    SummaryStats summary;
    double max_power_deviation = 0.0;
};

std::vector<CdfTable> run_cdf(const ExperimentConfig& config);

struct SweepPoint {
    ShadowingMode mode = ShadowingMode::kUncorrelated;
    int num_aps = 0;
    int num_users = 0;
    double mean_rate = 0.0;
    double mean_throughput_mbps = 0.0;
    std::vector<double> realization_means_mbps;  ///< per-realization mean over users
    double max_power_deviation = 0.0;
};

std::vector<SweepPoint> run_vs_aps(const ExperimentConfig& config, const std::vector<int>& ap_counts,
                                   const std::vector<int>& user_counts);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Percentile bootstrap interval for mean(a) - mean(b).
Interval bootstrap_mean_difference(const std::vector<double>& a, const std::vector<double>& b, double level,
                                   int resamples, std::uint64_t seed);

/// CSV writers; header row first, fixed "%.10g" formatting.
std::string cdf_csv(const std::vector<CdfTable>& tables);
std::string sweep_csv(const std::vector<SweepPoint>& points);

std::string to_string(ShadowingMode mode);

}  // namespace cfotfs
