// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cfotfs/channel.hpp"
#include "cfotfs/errors.hpp"
#include "cfotfs/estimation.hpp"
#include "cfotfs/experiments.hpp"
#include "cfotfs/montecarlo.hpp"
#include "cfotfs/otfs_core.hpp"
#include "cfotfs/rate.hpp"
#include "cfotfs/rng.hpp"

namespace {

using namespace cfotfs;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// 1. Operator identities on 100 random paths at M=8, N=4, all pairs.
Outcome identities() {
    const OtfsGrid g = OtfsGrid::critically_sampled(4, 8, 15e3, 4e9);
    Rng rng(derive_seed(2024, {1}));
    PathSet set;
    for (int i = 0; i < 100; ++i) {
        DdPath p;
        p.delay_tap = static_cast<int>(rng.uniform_int(0, 7));
        p.doppler_tap = static_cast<int>(rng.uniform_int(-2, 1));
        p.fractional_doppler = rng.uniform_open(-0.5, 0.5);
        set.paths.push_back(p);
    }
    const double tol = 1e-9;
    IdentityReport r;
    try {
        r = verify_operator_identities(set, g, tol);
    } catch (const IdentityViolation& e) {
        return {false, e.what()};
    }
    const bool ok = r.unitarity < tol && r.diagonal_zero < tol && r.row_sum < tol;
    return {ok, "unitarity " + fmt("%.2e", r.unitarity) + ", diagonal " + fmt("%.2e", r.diagonal_zero) +
                    ", row sum " + fmt("%.2e", r.row_sum) + " over " + std::to_string(r.pairs_checked) +
                    " pairs (tol 1e-9)"};
}

// 2. Closed form against the matrix-level simulation on 10 small instances.
Outcome theorem_vs_oracle() {
    ExperimentConfig c = ExperimentConfig::validation();
    c.realizations = 10;
    c.seed = 2024;
    MonteCarloOptions opt;
    opt.trials = 100000;
    opt.batches = 100;
    const ValidationRun run = run_validation(c, opt, 0.05, 3.0);
    int terms_ok = 0, sinr_ok = 0;
    for (const auto& inst : run.instances) {
        terms_ok += inst.terms_pass ? 1 : 0;
        sinr_ok += inst.sinr_pass ? 1 : 0;
    }
    return {run.passed, std::to_string(terms_ok) + "/10 checked bins with all terms within 3 SE, " +
                            std::to_string(sinr_ok) + "/10 instances with every bin SINR within 5% (max " +
                            fmt("%.2f%%", 100 * run.max_relative_error) + "); all-bin coverage " +
                            std::to_string(run.terms_within_sigmas) + "/" + std::to_string(run.terms_checked) +
                            "; 1e5 trials"};
}

// 3. Distinct-delay form against the per-bin evaluation.
Outcome corollary() {
    ExperimentConfig c = ExperimentConfig::desk();
    c.grid = OtfsGrid::critically_sampled(8, 8, 15e3, 4e9);
    c.paths.num_paths = 3;
    c.paths.max_delay_tap = 4;
    c.paths.max_doppler_tap = 1;
    c.paths.distinct_delays = true;
    double worst_rate = 0.0, worst_spread = 0.0;
    for (int i = 0; i < 10; ++i) {
        const DownlinkScenario s =
            draw_scenario(c, ShadowingMode::kUncorrelated, 4, 3, derive_seed(2024, {3, static_cast<std::uint64_t>(i)}));
        for (int q = 0; q < s.num_users; ++q) {
            const RateReport fast = rate_distinct_delays(s, q);
            double acc = 0.0, lo = INFINITY, hi = -INFINITY;
            for (int r = 0; r < s.grid.size(); ++r) {
                const double v = sinr_bin(s, q, r);
                acc += std::log2(1.0 + v);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double per_bin_rate = acc / s.grid.size();
            worst_rate = std::max(worst_rate, std::abs(fast.rate - per_bin_rate) / per_bin_rate);
            worst_spread = std::max(worst_spread, (hi - lo) / hi);
        }
    }
    return {worst_rate <= 1e-9 && worst_spread <= 1e-9,
            "rate relative difference " + fmt("%.2e", worst_rate) + ", per-bin SINR spread " +
                fmt("%.2e", worst_spread) + " (tol 1e-9)"};
}

// 4. MMSE coefficient against a scalar LMMSE oracle built from the joint covariance.
Outcome mmse() {
    Rng rng(derive_seed(2024, {4}));
    double worst = 0.0;
    bool bounds = true;
    for (int i = 0; i < 1000; ++i) {
        const double beta = std::pow(10.0, rng.uniform_open(-16.0, 0.0));
        const double rho_p = std::pow(10.0, rng.uniform_open(-2.0, 14.0));
        const double rho_u = std::pow(10.0, rng.uniform_open(-2.0, 14.0));
        const double xi = std::pow(10.0, rng.uniform_open(-16.0, 0.0));
        const double c = mmse_coeff(beta, rho_p, rho_u, xi);
        const double gamma = estimate_variance(beta, rho_p, c);
        // [h; y] = A [u; v]: h = sqrt(beta) u, y = sqrt(rho_p) h + sqrt(rho_u xi + 1) v
        Eigen::Matrix2d a;
        a << std::sqrt(beta), 0.0, std::sqrt(rho_p * beta), std::sqrt(rho_u * xi + 1.0);
        const Eigen::Matrix2d cov = a * a.transpose();
        const double oracle_c = cov(0, 1) / cov(1, 1);
        const double oracle_gamma = oracle_c * oracle_c * cov(1, 1);
        worst = std::max({worst, std::abs(c - oracle_c) / oracle_c, std::abs(gamma - oracle_gamma) / oracle_gamma});
        bounds = bounds && gamma >= 0.0 && gamma <= beta;
    }
    return {worst <= 1e-12 && bounds,
            "max relative difference " + fmt("%.2e", worst) + " over 1000 points, 0 <= gamma <= beta " +
                (bounds ? "everywhere" : "VIOLATED")};
}

Outcome noise() {
    const double dbm = noise_power_dbm(OtfsGrid::critically_sampled(20, 30, 15e3, 4e9), 9.0);
    return {std::abs(dbm + 108.0) <= 0.5, fmt("%.3f dBm (target -108 +/- 0.5)", dbm)};
}

Outcome doppler_index() {
    const int k = max_doppler_index(500.0, OtfsGrid::critically_sampled(20, 30, 15e3, 4e9));
    return {k == 3, "k_max = " + std::to_string(k) + " (target 3)"};
}

Outcome guard_overhead() {
    const int a = GuardConfig{2, 3, 1}.overhead();
    const int b = GuardConfig{0, 0, 0}.overhead();
    return {a == 85 && b == 1, "N_guard(2,3,1) = " + std::to_string(a) + ", N_guard(0,0,0) = " + std::to_string(b)};
}

// 8. Per-AP power load under the equal-power rule, 50 desk realizations.
Outcome power_constraint() {
    const ExperimentConfig c = ExperimentConfig::desk();
    double worst = 0.0;
    for (int i = 0; i < c.realizations; ++i) {
        const DownlinkScenario s = draw_scenario(c, ShadowingMode::kUncorrelated, c.network.num_aps,
                                                 c.network.num_users, derive_seed(2024, {8, static_cast<std::uint64_t>(i)}));
        for (int p = 0; p < s.num_aps; ++p) {
            double load = 0.0;
            for (int q = 0; q < s.num_users; ++q) {
                load += s.power.eta(p, q) * s.stats.link(p, q).gamma.sum();
            }
            worst = std::max(worst, std::abs(load - 1.0));
        }
    }
    const auto tables = run_cdf(c);
    worst = std::max(worst, tables.at(0).max_power_deviation);
    return {worst <= 1e-12, "max |load - 1| = " + fmt("%.2e", worst) + " over 50 realizations (tol 1e-12)"};
}

// 9. Paper-scale trends with bootstrap confidence.
Outcome paper_trends() {
    ExperimentConfig c = ExperimentConfig::paper();
    c.shadowing_modes = {ShadowingMode::kUncorrelated};
    const auto pts = run_vs_aps(c, c.ap_counts, c.user_counts);
    const std::size_t na = c.ap_counts.size();
    bool ok = true;
    double min_growth_low = INFINITY, min_gap_low = INFINITY;
    std::uint64_t tag = 0;
    for (std::size_t u = 0; u < c.user_counts.size(); ++u) {
        for (std::size_t a = 1; a < na; ++a) {
            const auto& prev = pts[u * na + a - 1];
            const auto& next = pts[u * na + a];
            const Interval ci = bootstrap_mean_difference(next.realization_means_mbps, prev.realization_means_mbps,
                                                          0.95, 2000, derive_seed(2024, {9, tag++}));
            min_growth_low = std::min(min_growth_low, ci.low);
            ok = ok && ci.low > 0.0;
        }
    }
    for (std::size_t a = 0; a < na; ++a) {
        const auto& k20 = pts[a];
        const auto& k40 = pts[na + a];
        const Interval ci = bootstrap_mean_difference(k20.realization_means_mbps, k40.realization_means_mbps, 0.95,
                                                      2000, derive_seed(2024, {9, tag++}));
        min_gap_low = std::min(min_gap_low, ci.low);
        ok = ok && ci.low > 0.0;
    }
    std::string curve;
    for (const auto& p : pts) {
        curve += " " + std::to_string(p.num_aps) + "/" + std::to_string(p.num_users) + ":" +
                 fmt("%.3f", p.mean_throughput_mbps);
    }
    return {ok, "min 95% lower bound of step increase " + fmt("%.4f", min_growth_low) +
                    " Mbit/s, of K20-K40 gap " + fmt("%.4f", min_gap_low) + " Mbit/s; mean Mbit/s (APs/users):" +
                    curve};
}

// 10. Byte-identical CSV across repeated runs and thread counts.
Outcome determinism() {
    ExperimentConfig c = ExperimentConfig::desk();
    c.shadowing_modes = {ShadowingMode::kUncorrelated, ShadowingMode::kCorrelated};
    c.threads = 1;
    const std::string a = cdf_csv(run_cdf(c));
    const std::string sa = sweep_csv(run_vs_aps(c, c.ap_counts, c.user_counts));
    c.threads = 4;
    const std::string b = cdf_csv(run_cdf(c));
    const std::string sb = sweep_csv(run_vs_aps(c, c.ap_counts, c.user_counts));
    const std::string b2 = cdf_csv(run_cdf(c));
    const bool ok = a == b && b == b2 && sa == sb;
    return {ok, std::to_string(a.size()) + "-byte CDF CSV and " + std::to_string(sa.size()) +
                    "-byte sweep CSV identical across runs with 1 and 4 threads"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double budget_s;  // 0: no runtime requirement
    };
    const std::vector<Criterion> criteria{
        {1, "operator identities", identities, 10.0},
        {2, "closed form vs Monte Carlo", theorem_vs_oracle, 120.0},
        {3, "distinct-delay consistency", corollary, 0.0},
        {4, "MMSE vs scalar LMMSE", mmse, 0.0},
        {5, "noise power", noise, 0.0},
        {6, "Doppler index", doppler_index, 0.0},
        {7, "guard overhead", guard_overhead, 0.0},
        {8, "per-AP power constraint", power_constraint, 0.0},
        {9, "paper-scale trends", paper_trends, 1800.0},
        {10, "determinism", determinism, 0.0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) {
            o.pass = false;
            o.detail += "; over the " + fmt("%.0f s", c.budget_s) + " budget";
        }
        failed += o.pass ? 0 : 1;
        std::printf("[%s] %2d %-28s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
