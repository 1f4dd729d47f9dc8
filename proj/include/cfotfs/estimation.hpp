#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cfotfs/channel.hpp"
#include "cfotfs/rng.hpp"

namespace cfotfs {

/// Transmit powers normalized by the noise power (linear).
struct NormalizedPowers {
    double downlink = 1.0;  ///< rho_d
    double uplink = 1.0;    ///< rho_u
    double pilot = 1.0;     ///< rho_p
};

/// Guard half-widths around each embedded pilot.
struct GuardConfig {
    int max_delay_tap = 2;        ///< l_max
    int max_doppler_tap = 3;      ///< k_max
    int extra_doppler_guard = 1;  ///< k_hat, absorbs fractional-Doppler spread

    /// (2 l_max + 1)(4 k_max + 4 k_hat + 1) bins per user.
    int overhead() const noexcept {
        return (2 * max_delay_tap + 1) * doppler_span();
    }
    int doppler_span() const noexcept { return 4 * max_doppler_tap + 4 * extra_doppler_guard + 1; }
};

enum class PilotMode {
    kStrict,      ///< pilot + guard regions of different users never overlap
    kSharedGrid,  ///< users transmit data over each other's pilot/guard bins
};

struct PilotLocation {
    int doppler = 0;
    int delay = 0;
};

struct PilotPlan {
    PilotMode mode = PilotMode::kSharedGrid;
    GuardConfig guard;
    std::vector<PilotLocation> locations;  ///< one per user
    int guard_overhead = 0;
};

/// Pilots on a lattice with guard-sized spacing. Strict mode throws InfeasibleConfiguration
/// when K_u N_guard > MN or the lattice has fewer slots than users; shared-grid mode wraps
/// around the lattice.
PilotPlan plan_pilots(int num_users, const OtfsGrid& grid, const GuardConfig& guard,
                      PilotMode mode = PilotMode::kSharedGrid);

struct InterferencePowers {
    double own_data = 0.0;    ///< E|I_1|^2: own data leaking into the guard window
    double other_users = 0.0; ///< E|I_2|^2: other users' data
};

/// variances_by_user[q'] holds beta_{p q', i} for one AP p.
InterferencePowers interference_powers(const std::vector<Eigen::VectorXd>& variances_by_user, int user,
                                       double uplink_snr, int doppler_bins, const GuardConfig& guard);

/// Xi = (1/N) sum_{q'} sum_i beta_{pq',i} - ((4k_max+4k_hat+1)/N^2) sum_i beta_{pq,i},
/// clamped at zero (warning on stderr when clamping happens).
double interference_constant(const std::vector<Eigen::VectorXd>& variances_by_user, int user, int doppler_bins,
                             const GuardConfig& guard);

/// c = sqrt(rho_p) beta / (rho_p beta + rho_u Xi + 1).
double mmse_coeff(double beta, double pilot_snr, double uplink_snr, double xi);

/// gamma = E|h_hat|^2 = sqrt(rho_p) beta c.
inline double estimate_variance(double beta, double pilot_snr, double coeff) {
    return std::sqrt(pilot_snr) * beta * coeff;
}

/// Per-link MMSE statistics. Vectors are indexed by path.
struct LinkStat {
    Eigen::VectorXd beta;
    Eigen::VectorXd coeff;
    Eigen::VectorXd gamma;
    double xi = 0.0;
};

/// Statistics for every (AP, user) link, stored p * num_users + q.
struct LinkStats {
    int num_aps = 0;
    int num_users = 0;
    std::vector<LinkStat> links;

    const LinkStat& link(int ap, int user) const { return links.at(static_cast<std::size_t>(ap) * num_users + user); }
    LinkStat& link(int ap, int user) { return links.at(static_cast<std::size_t>(ap) * num_users + user); }
};

/// links[p * num_users + q] are the path sets; only tap variances are read.
LinkStats compute_link_stats(const std::vector<PathSet>& links, int num_aps, int num_users,
                             const NormalizedPowers& powers, const GuardConfig& guard, const OtfsGrid& grid);

struct EstimateDraw {
    std::complex<double> estimate;  ///< h_hat ~ CN(0, gamma)
    std::complex<double> error;     ///< eps ~ CN(0, beta - gamma), independent of h_hat

    std::complex<double> channel() const noexcept { return estimate + error; }
};

/// Orthogonal MMSE decomposition h = h_hat + eps. Throws InvalidStatistics if gamma > beta.
EstimateDraw sample_estimate(double beta, double gamma, Rng& rng);
EstimateDraw sample_estimate(double beta, double gamma, std::uint64_t seed);

}  // namespace cfotfs
