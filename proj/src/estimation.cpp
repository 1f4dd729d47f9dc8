#include "cfotfs/estimation.hpp"

#include <cmath>
#include <iostream>

#include "cfotfs/errors.hpp"

namespace cfotfs {

PilotPlan plan_pilots(int num_users, const OtfsGrid& grid, const GuardConfig& guard, PilotMode mode) {
    if (num_users < 1) {
        throw PreconditionViolation("pilot plan needs at least one user");
    }
    PilotPlan plan;
    plan.mode = mode;
    plan.guard = guard;
    plan.guard_overhead = guard.overhead();

    const int doppler_slots = std::max(1, grid.doppler_bins / guard.doppler_span());
    const int delay_slots = std::max(1, grid.delay_bins / (2 * guard.max_delay_tap + 1));
    const int slots = doppler_slots * delay_slots;
    if (mode == PilotMode::kStrict) {
        if (static_cast<long long>(num_users) * plan.guard_overhead > grid.size()) {
            throw InfeasibleConfiguration("pilot and guard overhead " + std::to_string(num_users) + " x " +
                                          std::to_string(plan.guard_overhead) + " exceeds the " +
                                          std::to_string(grid.size()) + "-bin frame");
        }
        if (num_users > slots || guard.doppler_span() > grid.doppler_bins ||
            2 * guard.max_delay_tap + 1 > grid.delay_bins) {
            throw InfeasibleConfiguration("guard regions cannot be placed without overlap");
        }
    }
    plan.locations.reserve(num_users);
    for (int q = 0; q < num_users; ++q) {
        const int slot = q % slots;
        const int dk = slot % doppler_slots;
        const int dl = slot / doppler_slots;
        // pilot sits at the centre of its guard box
        PilotLocation loc;
        loc.doppler = (dk * guard.doppler_span() + guard.doppler_span() / 2) % grid.doppler_bins;
        loc.delay = (dl * (2 * guard.max_delay_tap + 1) + guard.max_delay_tap) % grid.delay_bins;
        plan.locations.push_back(loc);
    }
    return plan;
}

namespace {

void check_window(int doppler_bins, const GuardConfig& guard) {
    if (doppler_bins <= guard.doppler_span()) {
        throw PreconditionViolation("Doppler guard (4k_max + 4k_hat + 1 = " + std::to_string(guard.doppler_span()) +
                                    ") must be smaller than N = " + std::to_string(doppler_bins));
    }
}

}  // namespace

InterferencePowers interference_powers(const std::vector<Eigen::VectorXd>& variances_by_user, int user,
                                       double uplink_snr, int doppler_bins, const GuardConfig& guard) {
    check_window(doppler_bins, guard);
    const double n = doppler_bins;
    InterferencePowers out;
    for (std::size_t q = 0; q < variances_by_user.size(); ++q) {
        const double total = variances_by_user[q].sum();
        if (static_cast<int>(q) == user) {
            out.own_data = uplink_snr * (n - guard.doppler_span()) / (n * n) * total;
        } else {
            out.other_users += uplink_snr / n * total;
        }
    }
    return out;
}

double interference_constant(const std::vector<Eigen::VectorXd>& variances_by_user, int user, int doppler_bins,
                             const GuardConfig& guard) {
    const double n = doppler_bins;
    double all = 0.0;
    for (const auto& v : variances_by_user) {
        all += v.sum();
    }
    const double xi = all / n - guard.doppler_span() / (n * n) * variances_by_user.at(user).sum();
    if (xi < 0.0) {
        std::clog << "cfotfs: negative interference constant " << xi << " clamped to 0\n";
        return 0.0;
    }
    return xi;
}

double mmse_coeff(double beta, double pilot_snr, double uplink_snr, double xi) {
    return std::sqrt(pilot_snr) * beta / (pilot_snr * beta + uplink_snr * std::max(xi, 0.0) + 1.0);
}

LinkStats compute_link_stats(const std::vector<PathSet>& links, int num_aps, int num_users,
                             const NormalizedPowers& powers, const GuardConfig& guard, const OtfsGrid& grid) {
    if (links.size() != static_cast<std::size_t>(num_aps) * num_users) {
        throw PreconditionViolation("expected one path set per (AP, user) link");
    }
    check_window(grid.doppler_bins, guard);
    LinkStats stats;
    stats.num_aps = num_aps;
    stats.num_users = num_users;
    stats.links.resize(links.size());

    std::vector<Eigen::VectorXd> per_user(num_users);
    for (int p = 0; p < num_aps; ++p) {
        for (int q = 0; q < num_users; ++q) {
            const auto& set = links[static_cast<std::size_t>(p) * num_users + q];
            per_user[q].resize(static_cast<Eigen::Index>(set.paths.size()));
            for (std::size_t i = 0; i < set.paths.size(); ++i) {
                per_user[q](static_cast<Eigen::Index>(i)) = set.paths[i].variance;
            }
        }
        for (int q = 0; q < num_users; ++q) {
            LinkStat& link = stats.link(p, q);
            link.beta = per_user[q];
            link.xi = interference_constant(per_user, q, grid.doppler_bins, guard);
            link.coeff = link.beta.unaryExpr(
                [&](double b) { return mmse_coeff(b, powers.pilot, powers.uplink, link.xi); });
            link.gamma = std::sqrt(powers.pilot) * link.beta.cwiseProduct(link.coeff);
        }
    }
    return stats;
}

EstimateDraw sample_estimate(double beta, double gamma, Rng& rng) {
    if (gamma < 0.0 || gamma > beta * (1.0 + 1e-12)) {
        throw InvalidStatistics("estimate variance must satisfy 0 <= gamma <= beta");
    }
    EstimateDraw draw;
    draw.estimate = gamma > 0.0 ? rng.complex_normal(gamma) : std::complex<double>{};
    const double error_var = std::max(beta - gamma, 0.0);
    draw.error = error_var > 0.0 ? rng.complex_normal(error_var) : std::complex<double>{};
    return draw;
}

EstimateDraw sample_estimate(double beta, double gamma, std::uint64_t seed) {
    Rng rng(seed);
    return sample_estimate(beta, gamma, rng);
}

}  // namespace cfotfs
