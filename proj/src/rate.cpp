#include "cfotfs/rate.hpp"

#include <cmath>

#include "cfotfs/errors.hpp"
#include "cfotfs/otfs_core.hpp"

namespace cfotfs {

PowerControl equal_power_control(const LinkStats& stats) {
    PowerControl pc;
    pc.eta.resize(stats.num_aps, stats.num_users);
    for (int p = 0; p < stats.num_aps; ++p) {
        double total = 0.0;
        for (int q = 0; q < stats.num_users; ++q) {
            total += stats.link(p, q).gamma.sum();
        }
        if (!(total > 0.0)) {
            throw InvalidStatistics("AP " + std::to_string(p) + " has no channel estimate energy");
        }
        pc.eta.row(p).setConstant(1.0 / total);
    }
    return pc;
}

double power_load(const LinkStats& stats, const PowerControl& power, int ap) {
    double load = 0.0;
    for (int q = 0; q < stats.num_users; ++q) {
        load += power.eta(ap, q) * stats.link(ap, q).gamma.sum();
    }
    return load;
}

DownlinkScenario make_scenario(const OtfsGrid& grid, std::vector<PathSet> links, int num_aps, int num_users,
                               const NormalizedPowers& powers, const GuardConfig& guard) {
    DownlinkScenario s;
    s.grid = grid;
    s.num_aps = num_aps;
    s.num_users = num_users;
    s.stats = compute_link_stats(links, num_aps, num_users, powers, guard, grid);
    s.links = std::move(links);
    s.power = equal_power_control(s.stats);
    s.downlink_snr = powers.downlink;
    return s;
}

double SinrTerms::sinr(double downlink_snr) const noexcept {
    const double signal = downlink_snr * desired * desired;
    const double noise = downlink_snr * (beamforming_uncertainty + inter_symbol + inter_user) + 1.0;
    return signal / noise;
}

namespace {

bool same_delay(const DdPath& a, const DdPath& b, int delay_bins) {
    return ((a.delay_tap - b.delay_tap) % delay_bins + delay_bins) % delay_bins == 0;
}

// Terms that do not depend on the bin: desired signal and inter-user interference.
void bin_free_terms(const DownlinkScenario& s, int user, SinrTerms& terms) {
    for (int p = 0; p < s.num_aps; ++p) {
        const LinkStat& own = s.stats.link(p, user);
        terms.desired += std::sqrt(s.power.eta(p, user)) * own.gamma.sum();
        const double own_beta = own.beta.sum();
        for (int q = 0; q < s.num_users; ++q) {
            if (q != user) {
                terms.inter_user += s.power.eta(p, q) * own_beta * s.stats.link(p, q).gamma.sum();
            }
        }
    }
}

void check_user(const DownlinkScenario& s, int user) {
    if (user < 0 || user >= s.num_users) {
        throw PreconditionViolation("user index out of range");
    }
}

}  // namespace

SinrTerms closed_form_terms(const DownlinkScenario& s, int user, int r, IsiWeight isi) {
    check_user(s, user);
    SinrTerms terms;
    bin_free_terms(s, user, terms);
    for (int p = 0; p < s.num_aps; ++p) {
        const LinkStat& st = s.stats.link(p, user);
        const auto& paths = s.link(p, user).paths;
        const double eta = s.power.eta(p, user);
        double bu = 0.0;
        double isi_sum = 0.0;
        for (std::size_t i = 0; i < paths.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            bu += st.beta(ii) * st.gamma(ii);  // chi_ii + kappa_ii = 1
            for (std::size_t j = 0; j < paths.size(); ++j) {
                if (j == i) {
                    continue;
                }
                const auto jj = static_cast<Eigen::Index>(j);
                const RowCoupling c = chi_kappa<double>(paths[i], paths[j], r, s.grid);
                const double weight = isi == IsiWeight::kRowSum ? c.kappa : c.off_diagonal_energy;
                bu += c.chi * st.beta(ii) * st.gamma(jj);
                isi_sum += weight * st.beta(ii) * st.gamma(jj);
            }
        }
        terms.beamforming_uncertainty += eta * bu;
        terms.inter_symbol += eta * isi_sum;
    }
    return terms;
}

double sinr_bin(const DownlinkScenario& s, int user, int r, IsiWeight isi) {
    return closed_form_terms(s, user, r, isi).sinr(s.downlink_snr);
}

RateReport achievable_rate(const DownlinkScenario& s, int user, IsiWeight isi) {
    check_user(s, user);
    const int m_del = s.grid.delay_bins;
    SinrTerms base;
    bin_free_terms(s, user, base);

    Eigen::VectorXd bu = Eigen::VectorXd::Zero(m_del);
    Eigen::VectorXd isi_by_delay = Eigen::VectorXd::Zero(m_del);
    for (int p = 0; p < s.num_aps; ++p) {
        const LinkStat& st = s.stats.link(p, user);
        const auto& paths = s.link(p, user).paths;
        const double eta = s.power.eta(p, user);
        for (std::size_t i = 0; i < paths.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            bu.array() += eta * st.beta(ii) * st.gamma(ii);
            for (std::size_t j = 0; j < paths.size(); ++j) {
                if (j == i) {
                    continue;
                }
                const double w = eta * st.beta(ii) * st.gamma(static_cast<Eigen::Index>(j));
                if (!same_delay(paths[i], paths[j], m_del)) {
                    // zero diagonal and unit row sum: chi = 0, kappa = energy = 1
                    isi_by_delay.array() += w;
                    continue;
                }
                const auto couplings = coupling_by_delay(paths[i], paths[j], s.grid);
                for (int l = 0; l < m_del; ++l) {
                    const RowCoupling& c = couplings[static_cast<std::size_t>(l)];
                    bu(l) += w * c.chi;
                    isi_by_delay(l) += w * (isi == IsiWeight::kRowSum ? c.kappa : c.off_diagonal_energy);
                }
            }
        }
    }

    RateReport report;
    report.user = user;
    report.sinr.resize(s.grid.size());
    Eigen::VectorXd by_delay(m_del);
    for (int l = 0; l < m_del; ++l) {
        SinrTerms t = base;
        t.beamforming_uncertainty = bu(l);
        t.inter_symbol = isi_by_delay(l);
        by_delay(l) = t.sinr(s.downlink_snr);
    }
    double acc = 0.0;
    for (int r = 0; r < s.grid.size(); ++r) {
        report.sinr(r) = by_delay(r % m_del);
    }
    for (int l = 0; l < m_del; ++l) {
        acc += std::log2(1.0 + by_delay(l));
    }
    report.rate = acc / m_del;
    report.throughput_bps = throughput(report, s.grid);
    return report;
}

RateReport rate_distinct_delays(const DownlinkScenario& s, int user) {
    check_user(s, user);
    for (int p = 0; p < s.num_aps; ++p) {
        if (!s.link(p, user).has_distinct_delays()) {
            throw PreconditionViolation("link (" + std::to_string(p) + ", " + std::to_string(user) +
                                        ") has repeated delay taps");
        }
    }
    SinrTerms terms;
    bin_free_terms(s, user, terms);
    for (int p = 0; p < s.num_aps; ++p) {
        const LinkStat& st = s.stats.link(p, user);
        const double eta = s.power.eta(p, user);
        const double own = st.beta.dot(st.gamma);
        // chi = 0 and kappa = 1 for every i != j
        terms.beamforming_uncertainty += eta * own;
        terms.inter_symbol += eta * (st.beta.sum() * st.gamma.sum() - own);
    }
    RateReport report;
    report.user = user;
    report.sinr = Eigen::VectorXd::Constant(1, terms.sinr(s.downlink_snr));
    report.rate = std::log2(1.0 + report.sinr(0));
    report.throughput_bps = throughput(report, s.grid);
    return report;
}

double throughput(const RateReport& report, const OtfsGrid& grid) noexcept {
    return grid.bandwidth_hz() * report.rate;
}

}  // namespace cfotfs
