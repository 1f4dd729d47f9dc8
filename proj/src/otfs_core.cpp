#include "cfotfs/otfs_core.hpp"

namespace cfotfs {

std::complex<double> doppler_spread_factor(int c, double fractional_doppler, int doppler_bins) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double x = -static_cast<double>(c) - fractional_doppler;
    const std::complex<double> num = std::polar(1.0, -two_pi * x) - 1.0;
    const std::complex<double> den = std::polar(1.0, -two_pi * x / doppler_bins) - 1.0;
    if (std::abs(den) < 1e-12) {
        // (c + kappa') / N integer: every term of the geometric series is 1
        return {static_cast<double>(doppler_bins), 0.0};
    }
    return num / den;
}

std::complex<double> alpha_coeff(int k, int l, int c, const DdPath& path, const OtfsGrid& grid) {
    const int n_dop = grid.doppler_bins;
    const int m_del = grid.delay_bins;
    if (l < 0 || l >= m_del || path.delay_tap < 0 || path.delay_tap >= m_del) {
        throw PreconditionViolation("delay indices must lie in [0, M)");
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const std::complex<double> spread = doppler_spread_factor(c, path.fractional_doppler, n_dop);
    const double nu = path.doppler();
    const std::complex<double> delay_phase =
        std::polar(1.0, -two_pi * (l - path.delay_tap) * nu / (static_cast<double>(m_del) * n_dop));
    if (l >= path.delay_tap) {
        return spread * delay_phase / static_cast<double>(n_dop);
    }
    const int wrapped = ((k - path.doppler_tap + c) % n_dop + n_dop) % n_dop;
    const std::complex<double> wrap_phase = std::polar(1.0, -two_pi * wrapped / n_dop);
    return (spread - 1.0) * delay_phase * wrap_phase / static_cast<double>(n_dop);
}

}  // namespace cfotfs
