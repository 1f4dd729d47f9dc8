#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "cfotfs/channel.hpp"
#include "cfotfs/errors.hpp"
#include "cfotfs/rng.hpp"

namespace cfotfs {
namespace {

OtfsGrid paper_grid() { return OtfsGrid::critically_sampled(20, 30, 15e3, 4e9); }

TEST(OtfsGrid, CriticalSampling) {
    const OtfsGrid g = paper_grid();
    EXPECT_NO_THROW(g.validate());
    EXPECT_EQ(g.size(), 600);
    EXPECT_DOUBLE_EQ(g.bandwidth_hz(), 450e3);
    OtfsGrid bad = g;
    bad.symbol_duration_s *= 2;
    EXPECT_THROW(bad.validate(), PreconditionViolation);
}

TEST(MaxDopplerIndex, PaperScenario) { EXPECT_EQ(max_doppler_index(500.0, paper_grid()), 3); }

TEST(MaxDopplerIndex, StaticUser) { EXPECT_EQ(max_doppler_index(0.0, paper_grid()), 0); }

TEST(MaxDopplerIndex, HundredKmh) {
    // nu_max = 4e9 * (100 / 3.6) / 2.998e8 = 370.6 Hz; Doppler resolution 15e3 / 20 = 750 Hz
    const double nu = 4e9 * (100.0 / 3.6) / 2.998e8;
    EXPECT_NEAR(nu, 370.6, 0.1);
    EXPECT_EQ(max_doppler_index(100.0, paper_grid()), 1);
    EXPECT_THROW(max_doppler_index(-1.0, paper_grid()), PreconditionViolation);
}

TEST(SamplePaths, PaperTapRanges) {
    PathSampling s;
    s.num_paths = 5;
    s.max_delay_tap = 2;
    s.max_doppler_tap = 3;
    const OtfsGrid g = paper_grid();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const PathSet set = sample_paths(1e-9, s, g, seed);
        ASSERT_EQ(set.paths.size(), 5u);
        for (const auto& p : set.paths) {
            EXPECT_GE(p.delay_tap, 0);
            EXPECT_LE(p.delay_tap, 2);
            EXPECT_GE(p.doppler_tap, -3);
            EXPECT_LE(p.doppler_tap, 3);
            EXPECT_GT(p.fractional_doppler, -0.5);
            EXPECT_LT(p.fractional_doppler, 0.5);
            EXPECT_DOUBLE_EQ(p.variance, 1e-9 / 5);
        }
        EXPECT_NEAR(set.total_variance(), 1e-9, 1e-24);
    }
}

TEST(SamplePaths, DegenerateSinglePath) {
    PathSampling s;
    s.num_paths = 1;
    s.max_delay_tap = 0;
    s.max_doppler_tap = 0;
    s.fractional = false;
    const PathSet set = sample_paths(2.0, s, paper_grid(), 3);
    ASSERT_EQ(set.paths.size(), 1u);
    EXPECT_EQ(set.paths[0].delay_tap, 0);
    EXPECT_EQ(set.paths[0].doppler_tap, 0);
    EXPECT_EQ(set.paths[0].fractional_doppler, 0.0);
    EXPECT_EQ(set.paths[0].variance, 2.0);
}

TEST(SamplePaths, TotalGainPowerMatchesPairBeta) {
    PathSampling s;
    const double beta = 3e-7;
    const PathSet base = sample_paths(beta, s, paper_grid(), 1);
    const int n = 10000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const PathSet set = resample_gains(base, derive_seed(2, {static_cast<std::uint64_t>(i)}));
        for (const auto& p : set.paths) {
            sum += std::norm(p.gain);
        }
    }
    EXPECT_NEAR(sum / n, beta, 0.03 * beta);
}

TEST(SamplePaths, ReplicateProfile) {
    PathSampling s;
    s.profile = PowerProfile::kReplicate;
    const PathSet set = sample_paths(4.0, s, paper_grid(), 1);
    for (const auto& p : set.paths) {
        EXPECT_EQ(p.variance, 4.0);
    }
}

TEST(SamplePaths, DistinctDelays) {
    PathSampling s;
    s.num_paths = 3;
    s.max_delay_tap = 2;
    s.distinct_delays = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const PathSet set = sample_paths(1.0, s, paper_grid(), seed);
        EXPECT_TRUE(set.has_distinct_delays());
        std::set<int> taps;
        for (const auto& p : set.paths) {
            taps.insert(p.delay_tap);
        }
        EXPECT_EQ(taps.size(), 3u);
    }
    s.num_paths = 4;
    EXPECT_THROW(sample_paths(1.0, s, paper_grid(), 1), InfeasibleConfiguration);
}

TEST(SamplePaths, PreconditionErrors) {
    PathSampling s;
    EXPECT_THROW(sample_paths(0.0, s, paper_grid(), 1), PreconditionViolation);
    s.max_doppler_tap = 10;
    EXPECT_THROW(sample_paths(1.0, s, paper_grid(), 1), PreconditionViolation);
    s = PathSampling{};
    s.max_delay_tap = 30;
    EXPECT_THROW(sample_paths(1.0, s, paper_grid(), 1), PreconditionViolation);
    s = PathSampling{};
    s.num_paths = 0;
    EXPECT_THROW(sample_paths(1.0, s, paper_grid(), 1), PreconditionViolation);
}

TEST(ResampleGains, RejectsNonPositiveVariance) {
    PathSet set;
    set.paths.push_back(DdPath{});
    set.paths[0].variance = 0.0;
    EXPECT_THROW(resample_gains(set, 1), InvalidStatistics);
}

TEST(ResampleGains, DeterministicAndTapsUnchanged) {
    const PathSet base = sample_paths(1.0, PathSampling{}, paper_grid(), 4);
    const PathSet a = resample_gains(base, 9);
    const PathSet b = resample_gains(base, 9);
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        EXPECT_EQ(a.paths[i].gain, b.paths[i].gain);
        EXPECT_EQ(a.paths[i].delay_tap, base.paths[i].delay_tap);
        EXPECT_EQ(a.paths[i].doppler_tap, base.paths[i].doppler_tap);
        EXPECT_EQ(a.paths[i].fractional_doppler, base.paths[i].fractional_doppler);
    }
}

TEST(ResampleGains, PathsUncorrelatedAndCircular) {
    PathSampling s;
    s.num_paths = 2;
    const PathSet base = sample_paths(2.0, s, paper_grid(), 5);
    const int n = 10000;
    std::complex<double> cross = 0.0;
    double p0 = 0.0, re = 0.0, im = 0.0;
    for (int i = 0; i < n; ++i) {
        const PathSet set = resample_gains(base, derive_seed(6, {static_cast<std::uint64_t>(i)}));
        const auto h0 = set.paths[0].gain, h1 = set.paths[1].gain;
        cross += h0 * std::conj(h1);
        p0 += std::norm(h0);
        re += h0.real() * h0.real();
        im += h0.imag() * h0.imag();
    }
    // each path has variance 1, so |h0 h1*| has standard deviation 1
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    EXPECT_LT(std::abs(cross.real() / n), 3 * se);
    EXPECT_LT(std::abs(cross.imag() / n), 3 * se);
    EXPECT_NEAR(p0 / n, 1.0, 0.03);
    EXPECT_NEAR(re / n, 0.5, 0.03);
    EXPECT_NEAR(im / n, 0.5, 0.03);
}

}  // namespace
}  // namespace cfotfs
