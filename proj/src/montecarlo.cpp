#include "cfotfs/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "cfotfs/errors.hpp"
#include "cfotfs/otfs_core.hpp"
#include "cfotfs/parallel.hpp"
#include "cfotfs/rng.hpp"

namespace cfotfs {

double TermEstimates::sinr(double downlink_snr) const noexcept {
    const double signal = downlink_snr * std::norm(desired);
    return signal / (downlink_snr * (beamforming_uncertainty + inter_symbol + inter_user) + 1.0);
}

namespace {

using Mat = CMatrix<double>;

// Welford accumulator for a real or complex stream.
struct Moments {
    long n = 0;
    std::complex<double> mean{0.0, 0.0};
    double m2 = 0.0;  // sum |x - mean|^2

    void add(std::complex<double> x) {
        ++n;
        const std::complex<double> delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += std::real(std::conj(delta) * (x - mean));
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

// Per (user, bin) accumulators of one batch.
struct BatchStats {
    Moments signal;        // g = sum_p eta^1/2 G_pqq(r, r)
    Moments isi;           // |I_1|^2
    Moments isi_coherent;  // |I_1|^2 with unit symbols
    Moments inter_user;    // |I_2|^2
};

// Mean and standard error across batch estimates.
std::pair<double, double> mean_and_se(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double se = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return {mean, se};
}

}  // namespace

std::vector<TermEstimates> estimate_all_terms(const DownlinkScenario& s, std::uint64_t seed,
                                              const MonteCarloOptions& options) {
    const int aps = s.num_aps;
    const int users = s.num_users;
    const int size = s.grid.size();
    const int batches = std::max(1, static_cast<int>(std::min<long>(options.batches, options.trials)));
    const long trials = std::max(options.trials, 1L);

    // Frozen taps: operators are built once per link.
    std::vector<std::vector<Mat>> ops(s.links.size());
    for (std::size_t l = 0; l < s.links.size(); ++l) {
        for (const auto& path : s.links[l].paths) {
            ops[l].push_back(dd_operator<double>(path, s.grid));
        }
    }

    std::vector<std::vector<BatchStats>> per_batch(
        static_cast<std::size_t>(batches), std::vector<BatchStats>(static_cast<std::size_t>(users) * size));

    parallel_for(static_cast<std::size_t>(batches), options.threads, [&](std::size_t b) {
        Rng rng(derive_seed(seed, {0x6D6322ull, b}));
        const long begin = trials * static_cast<long>(b) / batches;
        const long end = trials * static_cast<long>(b + 1) / batches;
        auto& acc = per_batch[b];

        std::vector<Mat> channel(s.links.size());
        std::vector<Mat> estimate(s.links.size());
        std::vector<Eigen::VectorXd> symbols(static_cast<std::size_t>(users));
        for (long t = begin; t < end; ++t) {
            for (std::size_t l = 0; l < s.links.size(); ++l) {
                const int p = static_cast<int>(l) / users;
                const int q = static_cast<int>(l) % users;
                const LinkStat& st = s.stats.link(p, q);
                channel[l] = Mat::Zero(size, size);
                estimate[l] = Mat::Zero(size, size);
                for (std::size_t i = 0; i < ops[l].size(); ++i) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    const EstimateDraw d = sample_estimate(st.beta(ii), st.gamma(ii), rng);
                    channel[l] += d.channel() * ops[l][i];
                    estimate[l] += d.estimate * ops[l][i];
                }
            }
            for (auto& sym : symbols) {
                sym.resize(size);
                for (int r = 0; r < size; ++r) {
                    sym(r) = rng.normal();
                }
            }
            for (int q = 0; q < users; ++q) {
                CVector<double> signal = CVector<double>::Zero(size);
                CVector<double> isi = CVector<double>::Zero(size);
                CVector<double> isi_coherent = CVector<double>::Zero(size);
                CVector<double> inter_user = CVector<double>::Zero(size);
                for (int p = 0; p < aps; ++p) {
                    const Mat& h = channel[static_cast<std::size_t>(p) * users + q];
                    for (int qp = 0; qp < users; ++qp) {
                        const double amp = std::sqrt(s.power.eta(p, qp));
                        const Mat g = h * estimate[static_cast<std::size_t>(p) * users + qp].adjoint();
                        const CVector<double> mixed = g * symbols[static_cast<std::size_t>(qp)].cast<std::complex<double>>();
                        if (qp == q) {
                            const CVector<double> diag = g.diagonal();
                            signal += amp * diag;
                            isi += amp * (mixed - diag.cwiseProduct(symbols[static_cast<std::size_t>(q)].cast<std::complex<double>>()));
                            isi_coherent += amp * (g.rowwise().sum() - diag);
                        } else {
                            inter_user += amp * mixed;
                        }
                    }
                }
                for (int r = 0; r < size; ++r) {
                    BatchStats& a = acc[static_cast<std::size_t>(q) * size + r];
                    a.signal.add(signal(r));
                    a.isi.add(std::norm(isi(r)));
                    a.isi_coherent.add(std::norm(isi_coherent(r)));
                    a.inter_user.add(std::norm(inter_user(r)));
                }
            }
        }
    });

    std::vector<TermEstimates> out(static_cast<std::size_t>(users) * size);
    for (int q = 0; q < users; ++q) {
        for (int r = 0; r < size; ++r) {
            const std::size_t idx = static_cast<std::size_t>(q) * size + r;
            std::vector<double> re(batches), im(batches), var(batches), isi(batches), coh(batches), iu(batches);
            Moments pooled;
            for (int b = 0; b < batches; ++b) {
                const BatchStats& a = per_batch[static_cast<std::size_t>(b)][idx];
                re[b] = a.signal.mean.real();
                im[b] = a.signal.mean.imag();
                var[b] = a.signal.variance();
                isi[b] = a.isi.mean.real();
                coh[b] = a.isi_coherent.mean.real();
                iu[b] = a.inter_user.mean.real();
            }
            TermEstimates& e = out[idx];
            e.user = q;
            e.bin = r;
            e.trials = trials;
            e.batches = batches;
            e.insufficient_trials = trials < 100;
            const auto [re_mean, re_se] = mean_and_se(re);
            const auto [im_mean, im_se] = mean_and_se(im);
            e.desired = {re_mean, im_mean};
            e.desired_se = std::hypot(re_se, im_se);
            std::tie(e.beamforming_uncertainty, e.beamforming_uncertainty_se) = mean_and_se(var);
            std::tie(e.inter_symbol, e.inter_symbol_se) = mean_and_se(isi);
            std::tie(e.inter_symbol_coherent, e.inter_symbol_coherent_se) = mean_and_se(coh);
            std::tie(e.inter_user, e.inter_user_se) = mean_and_se(iu);
        }
    }
    return out;
}

TermEstimates estimate_terms(const DownlinkScenario& scenario, int user, int bin, std::uint64_t seed,
                             const MonteCarloOptions& options) {
    if (user < 0 || user >= scenario.num_users || bin < 0 || bin >= scenario.grid.size()) {
        throw PreconditionViolation("user or bin index out of range");
    }
    return estimate_all_terms(scenario, seed, options).at(static_cast<std::size_t>(user) * scenario.grid.size() + bin);
}

bool BinValidation::terms_within(double sigmas) const noexcept {
    return std::abs(z_desired) <= sigmas && std::abs(z_beamforming_uncertainty) <= sigmas &&
           std::abs(z_inter_symbol) <= sigmas && std::abs(z_inter_user) <= sigmas;
}

namespace {

double z_score(double empirical, double closed_form, double se) {
    const double diff = empirical - closed_form;
    if (se > 0.0) {
        return diff / se;
    }
    // zero spread: agreement must be exact up to rounding
    const double scale = std::max({std::abs(empirical), std::abs(closed_form), 1e-300});
    return std::abs(diff) <= 1e-9 * scale ? 0.0 : std::copysign(INFINITY, diff);
}

}  // namespace

ValidationReport validate_rate(const DownlinkScenario& s, std::uint64_t seed, const MonteCarloOptions& options,
                               double gate, IsiWeight isi) {
    const auto estimates = estimate_all_terms(s, seed, options);
    ValidationReport report;
    report.gate = gate;
    report.passed = true;
    const int size = s.grid.size();
    for (int q = 0; q < s.num_users; ++q) {
        double lo = INFINITY, hi = -INFINITY, sum = 0.0;
        for (int r = 0; r < size; ++r) {
            BinValidation v;
            v.user = q;
            v.bin = r;
            v.closed_form = closed_form_terms(s, q, r, isi);
            v.empirical = estimates[static_cast<std::size_t>(q) * size + r];
            const TermEstimates& e = v.empirical;
            v.z_desired = z_score(e.desired.real(), v.closed_form.desired, e.desired_se);
            v.z_beamforming_uncertainty =
                z_score(e.beamforming_uncertainty, v.closed_form.beamforming_uncertainty, e.beamforming_uncertainty_se);
            v.z_inter_symbol = z_score(e.inter_symbol, v.closed_form.inter_symbol, e.inter_symbol_se);
            v.z_inter_user = z_score(e.inter_user, v.closed_form.inter_user, e.inter_user_se);
            v.sinr_closed_form = v.closed_form.sinr(s.downlink_snr);
            v.sinr_empirical = e.sinr(s.downlink_snr);
            const double denom = std::max(std::abs(v.sinr_empirical), 1e-300);
            v.sinr_relative_error = v.sinr_closed_form == v.sinr_empirical
                                        ? 0.0
                                        : std::abs(v.sinr_closed_form - v.sinr_empirical) / denom;
            v.sinr_pass = v.sinr_relative_error <= gate;
            report.passed = report.passed && v.sinr_pass;
            report.max_relative_error = std::max(report.max_relative_error, v.sinr_relative_error);
            lo = std::min(lo, v.sinr_empirical);
            hi = std::max(hi, v.sinr_empirical);
            sum += v.sinr_empirical;
            report.bins.push_back(std::move(v));
        }
        const double mean = sum / size;
        report.empirical_bin_spread.push_back(mean > 0.0 ? (hi - lo) / mean : 0.0);
    }
    return report;
}

}  // namespace cfotfs
