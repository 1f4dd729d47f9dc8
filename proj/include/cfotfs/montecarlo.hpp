#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cfotfs/rate.hpp"

namespace cfotfs {

/// Empirical SINR terms at one (user, bin), estimated by matrix-level simulation of the
/// received signal with taps frozen and gains/estimates/symbols redrawn per trial.
/// Standard errors come from batch means.
struct TermEstimates {
    int user = 0;
    int bin = 0;
    std::complex<double> desired;  ///< E{sum_p eta^1/2 [H]_(r,:) [H_hat^H]_(:,r)}
    double desired_se = 0.0;
    double beamforming_uncertainty = 0.0;  ///< variance of the same sum
    double beamforming_uncertainty_se = 0.0;
    double inter_symbol = 0.0;  ///< E|I_1|^2 with i.i.d. N(0,1) symbols
    double inter_symbol_se = 0.0;
    double inter_symbol_coherent = 0.0;  ///< same with every other symbol set to 1
    double inter_symbol_coherent_se = 0.0;
    double inter_user = 0.0;  ///< E|I_2|^2
    double inter_user_se = 0.0;
    long trials = 0;
    int batches = 0;
    bool insufficient_trials = false;  ///< fewer than 100 trials

    double sinr(double downlink_snr) const noexcept;
};

struct MonteCarloOptions {
    long trials = 10000;
    int batches = 100;
    unsigned threads = 0;
};

/// Estimates for every (user, bin), indexed user * MN + bin.
std::vector<TermEstimates> estimate_all_terms(const DownlinkScenario& scenario, std::uint64_t seed,
                                              const MonteCarloOptions& options = {});

TermEstimates estimate_terms(const DownlinkScenario& scenario, int user, int bin, std::uint64_t seed,
                             const MonteCarloOptions& options = {});

/// One (user, bin) comparison between the closed form and the simulation.
struct BinValidation {
    int user = 0;
    int bin = 0;
    SinrTerms closed_form;
    TermEstimates empirical;
    double z_desired = 0.0;
    double z_beamforming_uncertainty = 0.0;
    double z_inter_symbol = 0.0;
    double z_inter_user = 0.0;
    double sinr_closed_form = 0.0;
    double sinr_empirical = 0.0;
    double sinr_relative_error = 0.0;
    bool sinr_pass = false;

    /// All four terms within `sigmas` standard errors.
    bool terms_within(double sigmas) const noexcept;
};

struct ValidationReport {
    std::vector<BinValidation> bins;
    double gate = 0.05;
    double max_relative_error = 0.0;
    /// Per user: (max - min) / mean of the empirical SINR over bins.
    std::vector<double> empirical_bin_spread;
    bool passed = false;
};

/// Compares sinr_bin with the empirical SINR for every (user, bin); passes when every
/// relative error is within `gate`.
ValidationReport validate_rate(const DownlinkScenario& scenario, std::uint64_t seed,
                               const MonteCarloOptions& options = {}, double gate = 0.05,
                               IsiWeight isi = IsiWeight::kRowSum);

}  // namespace cfotfs
