#include <gtest/gtest.h>

#include <cmath>

#include "cfotfs/channel.hpp"
#include "cfotfs/experiments.hpp"
#include "cfotfs/montecarlo.hpp"
#include "cfotfs/rate.hpp"
#include "cfotfs/rng.hpp"

namespace cfotfs {
namespace {

OtfsGrid grid(int n, int m) { return OtfsGrid::critically_sampled(n, m, 15e3, 4e9); }

DdPath path(int l, int k, double kappa, double variance) {
    DdPath p;
    p.delay_tap = l;
    p.doppler_tap = k;
    p.fractional_doppler = kappa;
    p.variance = variance;
    return p;
}

// Hand-built scenario: explicit paths and estimate variances, equal power control.
DownlinkScenario manual(const OtfsGrid& g, int aps, int users, const std::vector<std::vector<DdPath>>& paths,
                        const std::vector<std::vector<double>>& gammas, double rho_d) {
    DownlinkScenario s;
    s.grid = g;
    s.num_aps = aps;
    s.num_users = users;
    s.stats.num_aps = aps;
    s.stats.num_users = users;
    for (std::size_t l = 0; l < paths.size(); ++l) {
        PathSet set;
        set.paths = paths[l];
        set.ap = static_cast<int>(l) / users;
        set.user = static_cast<int>(l) % users;
        s.links.push_back(set);
        LinkStat st;
        const auto n = static_cast<Eigen::Index>(paths[l].size());
        st.beta.resize(n);
        st.gamma.resize(n);
        st.coeff = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            st.beta(i) = paths[l][static_cast<std::size_t>(i)].variance;
            st.gamma(i) = gammas[l][static_cast<std::size_t>(i)];
        }
        s.stats.links.push_back(st);
    }
    s.power = equal_power_control(s.stats);
    s.downlink_snr = rho_d;
    return s;
}

TEST(MonteCarlo, PerfectCsiSinglePathVariance) {
    const double beta = 2.0;
    const DownlinkScenario s = manual(grid(2, 4), 1, 1, {{path(1, 0, 0.2, beta)}}, {{beta}}, 10.0);
    MonteCarloOptions opt;
    opt.trials = 10000;
    const TermEstimates e = estimate_terms(s, 0, 3, 1, opt);
    const double eta = 1.0 / beta;
    EXPECT_NEAR(e.beamforming_uncertainty, eta * beta * beta, 0.05 * eta * beta * beta);
    EXPECT_NEAR(e.desired.real(), std::sqrt(eta) * beta, 4 * e.desired_se);
    EXPECT_EQ(e.inter_user, 0.0);
    EXPECT_LT(e.inter_symbol, 1e-20);
    EXPECT_FALSE(e.insufficient_trials);
}

TEST(MonteCarlo, FlagsTooFewTrials) {
    const DownlinkScenario s = manual(grid(2, 4), 1, 1, {{path(0, 0, 0.0, 1.0)}}, {{0.5}}, 1.0);
    MonteCarloOptions opt;
    opt.trials = 50;
    opt.batches = 10;
    EXPECT_TRUE(estimate_terms(s, 0, 0, 1, opt).insufficient_trials);
}

TEST(MonteCarlo, ZeroEstimateUserHasNoSignal) {
    const OtfsGrid g = grid(2, 4);
    const DownlinkScenario s =
        manual(g, 1, 2, {{path(0, 0, 0.1, 1.0)}, {path(1, 0, -0.2, 1.0)}}, {{0.8}, {0.0}}, 100.0);
    MonteCarloOptions opt;
    opt.trials = 2000;
    opt.batches = 20;
    const TermEstimates e = estimate_terms(s, 1, 2, 2, opt);
    EXPECT_EQ(e.desired, std::complex<double>(0.0));
    EXPECT_EQ(e.sinr(s.downlink_snr), 0.0);
    EXPECT_EQ(sinr_bin(s, 1, 2), 0.0);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
    const ExperimentConfig c = ExperimentConfig::validation();
    const DownlinkScenario s = draw_scenario(c, ShadowingMode::kUncorrelated, 2, 2, 5);
    MonteCarloOptions one;
    one.trials = 1000;
    one.batches = 10;
    one.threads = 1;
    MonteCarloOptions many = one;
    many.threads = 3;
    const auto a = estimate_all_terms(s, 11, one);
    const auto b = estimate_all_terms(s, 11, many);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].desired, b[i].desired);
        EXPECT_EQ(a[i].beamforming_uncertainty, b[i].beamforming_uncertainty);
        EXPECT_EQ(a[i].inter_symbol, b[i].inter_symbol);
        EXPECT_EQ(a[i].inter_user, b[i].inter_user);
    }
}

TEST(MonteCarlo, ClosedFormTermsOnValidationInstances) {
    const ExperimentConfig c = ExperimentConfig::validation();
    MonteCarloOptions opt;
    opt.trials = 10000;
    int within = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const DownlinkScenario s = draw_scenario(c, ShadowingMode::kUncorrelated, 2, 2, seed);
        const ValidationReport rep = validate_rate(s, seed + 100, opt);
        for (const auto& b : rep.bins) {
            for (double z : {b.z_desired, b.z_beamforming_uncertainty, b.z_inter_symbol, b.z_inter_user}) {
                ++total;
                within += std::abs(z) <= 3.0 ? 1 : 0;
                EXPECT_LT(std::abs(z), 5.0);
            }
            EXPECT_LT(std::abs(b.empirical.desired.imag()), 5 * b.empirical.desired_se);
        }
    }
    // 3-SE coverage is 99.7% for an unbiased estimator; leave room for correlated bins
    EXPECT_GE(within, static_cast<int>(0.97 * total));
}

TEST(MonteCarlo, IsiConventionsAtFourDopplerBins) {
    // Shared delay taps with fractional Doppler: the i.i.d.-symbol ISI matches the row-energy
    // weight and the coherent (all-ones) ISI matches the row-sum weight.
    const OtfsGrid g = grid(4, 4);
    const std::vector<DdPath> link{path(1, 0, 0.35, 1.0), path(1, 1, -0.3, 0.8), path(2, -1, 0.1, 0.5)};
    const DownlinkScenario s = manual(g, 1, 1, {link}, {{0.7, 0.5, 0.3}}, 1e6);
    MonteCarloOptions opt;
    opt.trials = 20000;
    const auto est = estimate_all_terms(s, 3, opt);
    double max_gap = 0.0;
    for (int r = 0; r < g.size(); ++r) {
        const SinrTerms row_sum = closed_form_terms(s, 0, r, IsiWeight::kRowSum);
        const SinrTerms energy = closed_form_terms(s, 0, r, IsiWeight::kRowEnergy);
        const TermEstimates& e = est[static_cast<std::size_t>(r)];
        EXPECT_NEAR(e.inter_symbol, energy.inter_symbol, 4.5 * e.inter_symbol_se) << "bin " << r;
        EXPECT_NEAR(e.inter_symbol_coherent, row_sum.inter_symbol, 4.5 * e.inter_symbol_coherent_se) << "bin " << r;
        max_gap = std::max(max_gap, std::abs(row_sum.inter_symbol - energy.inter_symbol) / energy.inter_symbol);
    }
    EXPECT_GT(max_gap, 0.05);  // the two conventions really differ here
}

TEST(MonteCarlo, DistinctDelaysEmpiricallyBinFree) {
    ExperimentConfig c = ExperimentConfig::validation();
    c.paths.distinct_delays = true;
    c.paths.max_delay_tap = 2;
    const DownlinkScenario s = draw_scenario(c, ShadowingMode::kUncorrelated, 2, 2, 8);
    MonteCarloOptions opt;
    opt.trials = 10000;
    const ValidationReport rep = validate_rate(s, 9, opt);
    for (const auto& b : rep.bins) {
        EXPECT_NEAR(b.sinr_closed_form, rep.bins[static_cast<std::size_t>(b.user) * 8].sinr_closed_form,
                    1e-9 * b.sinr_closed_form);
        EXPECT_TRUE(b.terms_within(4.5));
    }
    for (double spread : rep.empirical_bin_spread) {
        EXPECT_LT(spread, 0.15);
    }
}

TEST(MonteCarlo, InterferenceLimitedRegime) {
    ExperimentConfig c = ExperimentConfig::validation();
    DownlinkScenario s = draw_scenario(c, ShadowingMode::kUncorrelated, 2, 2, 4);
    s.downlink_snr = 1e30;
    MonteCarloOptions opt;
    opt.trials = 100000;
    const ValidationReport rep = validate_rate(s, 5, opt);
    EXPECT_TRUE(rep.passed) << "max relative error " << rep.max_relative_error;
}

}  // namespace
}  // namespace cfotfs
