#pragma once

#include <vector>

#include <Eigen/Core>

#include "cfotfs/channel.hpp"
#include "cfotfs/estimation.hpp"

namespace cfotfs {

/// eta(p, q) >= 0; per-AP load sum_q sum_i eta_pq gamma_pq,i must not exceed 1.
struct PowerControl {
    Eigen::MatrixXd eta;
};

/// Same coefficient for every user at an AP: eta_pq = (sum_q' sum_i gamma_pq',i)^-1.
PowerControl equal_power_control(const LinkStats& stats);

/// sum_q sum_i eta_pq gamma_pq,i for one AP.
double power_load(const LinkStats& stats, const PowerControl& power, int ap);

/// Weight of an off-diagonal (i != j) path pair in the inter-symbol interference term.
enum class IsiWeight {
    /// |sum_{r' != r} [T_i T_j^H]_(r,r')|^2, the closed form as published.
    kRowSum,
    /// sum_{r' != r} |[T_i T_j^H]_(r,r')|^2 = 1 - chi, exact for i.i.d. data symbols.
    kRowEnergy,
};

/// Everything the closed form needs for one downlink evaluation.
struct DownlinkScenario {
    OtfsGrid grid;
    int num_aps = 0;
    int num_users = 0;
    std::vector<PathSet> links;  ///< p * num_users + q
    LinkStats stats;
    PowerControl power;
    double downlink_snr = 1.0;  ///< rho_d

    const PathSet& link(int ap, int user) const { return links.at(static_cast<std::size_t>(ap) * num_users + user); }
};

/// Builds statistics (MMSE) and equal power control for the given links.
DownlinkScenario make_scenario(const OtfsGrid& grid, std::vector<PathSet> links, int num_aps, int num_users,
                               const NormalizedPowers& powers, const GuardConfig& guard);

/// Closed-form SINR terms at bin r, without the rho_d factor:
/// desired = sum_p sum_i eta^1/2 gamma, and the variances of the beamforming uncertainty,
/// inter-symbol and inter-user terms.
struct SinrTerms {
    double desired = 0.0;
    double beamforming_uncertainty = 0.0;
    double inter_symbol = 0.0;
    double inter_user = 0.0;

    double sinr(double downlink_snr) const noexcept;
};

/// Evaluated from explicit rows of T_i T_j^H at bin r.
SinrTerms closed_form_terms(const DownlinkScenario& scenario, int user, int r, IsiWeight isi = IsiWeight::kRowSum);

double sinr_bin(const DownlinkScenario& scenario, int user, int r, IsiWeight isi = IsiWeight::kRowSum);

struct RateReport {
    int user = 0;
    Eigen::VectorXd sinr;  ///< per bin (MN entries), or one entry for the distinct-delay form
    double rate = 0.0;     ///< bit/s/Hz
    double throughput_bps = 0.0;
};

/// (1/MN) sum_r log2(1 + SINR_r). SINRs depend on r only through its delay index, so M
/// evaluations are expanded to the MN bins.
RateReport achievable_rate(const DownlinkScenario& scenario, int user, IsiWeight isi = IsiWeight::kRowSum);

/// Bin-independent form for links whose paths all have distinct delay taps. Throws
/// PreconditionViolation otherwise.
RateReport rate_distinct_delays(const DownlinkScenario& scenario, int user);

/// M df R: bandwidth times spectral efficiency (no overhead deduction).
double throughput(const RateReport& report, const OtfsGrid& grid) noexcept;

}  // namespace cfotfs
