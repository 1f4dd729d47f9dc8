#pragma once

// Delay-Doppler operators T = (F_N (x) I_M) Pi^l Delta^(k + kappa) (F_N^H (x) I_M), the
// effective channels built from them, and the row couplings of T_i T_j^H that weight the
// beamforming-uncertainty and inter-symbol terms of the downlink SINR.
//
// Bin index convention: r = k M + l (k Doppler, l delay).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "cfotfs/channel.hpp"
#include "cfotfs/errors.hpp"

namespace cfotfs {

template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
CMatrix<Scalar> unitary_dft(int size) {
    CMatrix<Scalar> f(size, size);
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(size));
    for (int k = 0; k < size; ++k) {
        for (int n = 0; n < size; ++n) {
            // reduce the exponent first so large sizes keep full phase accuracy
            const long long t = (static_cast<long long>(k) * n) % size;
            f(k, n) = std::polar(scale, -Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(t) / Scalar(size));
        }
    }
    return f;
}

/// Forward cyclic shift: Pi(i, j) = 1 iff i = (j + 1) mod size.
template <typename Scalar>
CMatrix<Scalar> cyclic_shift(int size) {
    CMatrix<Scalar> pi = CMatrix<Scalar>::Zero(size, size);
    for (int j = 0; j < size; ++j) {
        pi((j + 1) % size, j) = Scalar(1);
    }
    return pi;
}

/// Diagonal of Delta^exponent, entries z^(exponent n) with z = exp(j 2 pi / size), n in [0, size).
template <typename Scalar>
CVector<Scalar> doppler_phases(int size, Scalar exponent) {
    CVector<Scalar> d(size);
    for (int n = 0; n < size; ++n) {
        d(n) = std::polar(Scalar(1), Scalar(2) * std::numbers::pi_v<Scalar> * exponent * Scalar(n) / Scalar(size));
    }
    return d;
}

/// Dense T for one path. Uses the sparsity of Pi^l Delta^nu and of F_N (x) I_M instead of
/// two full products.
template <typename Scalar>
CMatrix<Scalar> dd_operator(const DdPath& path, const OtfsGrid& grid) {
    const int n_dop = grid.doppler_bins;
    const int m_del = grid.delay_bins;
    const int size = grid.size();
    const CMatrix<Scalar> f = unitary_dft<Scalar>(n_dop);
    const CVector<Scalar> d = doppler_phases<Scalar>(size, static_cast<Scalar>(path.doppler()));
    const int shift = ((path.delay_tap % size) + size) % size;

    // X = Pi^l Delta^nu (F_N^H (x) I_M): row (n + l) of X is d_n times row n of F_N^H (x) I_M,
    // i.e. X[(n + l) mod MN, b' M + l0] = d_n conj(F(b', b)) with n = b M + l0.
    CMatrix<Scalar> x = CMatrix<Scalar>::Zero(size, size);
    for (int n = 0; n < size; ++n) {
        const int b = n / m_del;
        const int l0 = n % m_del;
        const int row = (n + shift) % size;
        for (int bp = 0; bp < n_dop; ++bp) {
            x(row, bp * m_del + l0) = d(n) * std::conj(f(bp, b));
        }
    }
    // T = (F_N (x) I_M) X: mixes rows sharing the same delay index.
    CMatrix<Scalar> t = CMatrix<Scalar>::Zero(size, size);
    for (int l0 = 0; l0 < m_del; ++l0) {
        for (int k = 0; k < n_dop; ++k) {
            for (int b = 0; b < n_dop; ++b) {
                t.row(k * m_del + l0) += f(k, b) * x.row(b * m_del + l0);
            }
        }
    }
    return t;
}

/// H = sum_i h_i T_i.
template <typename Scalar>
CMatrix<Scalar> effective_channel(const PathSet& set, const OtfsGrid& grid) {
    CMatrix<Scalar> h = CMatrix<Scalar>::Zero(grid.size(), grid.size());
    for (const auto& path : set.paths) {
        h += std::complex<Scalar>(static_cast<Scalar>(path.gain.real()), static_cast<Scalar>(path.gain.imag())) *
             dd_operator<Scalar>(path, grid);
    }
    return h;
}

/// Row r of T_i T_j^H. Only the N columns sharing one delay index are non-zero.
template <typename Scalar>
struct ProductRow {
    int delay = 0;               ///< delay index l' of the non-zero columns
    CVector<Scalar> by_doppler;  ///< value at column k' M + l'

    int column(int doppler, int delay_bins) const noexcept { return doppler * delay_bins + delay; }
};

template <typename Scalar>
ProductRow<Scalar> product_row(const DdPath& path_i, const DdPath& path_j, int r, const OtfsGrid& grid) {
    const int n_dop = grid.doppler_bins;
    const int m_del = grid.delay_bins;
    const int size = grid.size();
    if (r < 0 || r >= size) {
        throw PreconditionViolation("bin index outside [0, MN)");
    }
    const int k = r / m_del;
    const int l = r % m_del;
    const Scalar dnu = static_cast<Scalar>(path_i.doppler() - path_j.doppler());
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    const int li = ((path_i.delay_tap % size) + size) % size;
    const int lj = ((path_j.delay_tap % size) + size) % size;

    ProductRow<Scalar> row;
    row.delay = ((l - li + lj) % m_del + m_del) % m_del;
    row.by_doppler = CVector<Scalar>::Zero(n_dop);
    for (int n = 0; n < n_dop; ++n) {
        const int m = n * m_del + l;
        const int src = ((m - li) % size + size) % size;
        const std::complex<Scalar> w = std::polar(Scalar(1), two_pi * dnu * Scalar(src) / Scalar(size));
        const int col = ((m - li + lj) % size + size) % size;
        const int np = col / m_del;
        for (int kp = 0; kp < n_dop; ++kp) {
            const long long t = ((static_cast<long long>(kp) * np - static_cast<long long>(k) * n) % n_dop + n_dop) % n_dop;
            row.by_doppler(kp) += w * std::polar(Scalar(1) / Scalar(n_dop), two_pi * Scalar(t) / Scalar(n_dop));
        }
    }
    return row;
}

/// chi = |[T_i T_j^H]_(r,r)|^2, kappa = |sum_{r' != r} [T_i T_j^H]_(r,r')|^2 and
/// off_diagonal_energy = sum_{r' != r} |[T_i T_j^H]_(r,r')|^2.
struct RowCoupling {
    double chi = 0.0;
    double kappa = 0.0;
    double off_diagonal_energy = 0.0;
};

/// Explicit row summation over the product row.
template <typename Scalar = double>
RowCoupling chi_kappa(const DdPath& path_i, const DdPath& path_j, int r, const OtfsGrid& grid) {
    const ProductRow<Scalar> row = product_row<Scalar>(path_i, path_j, r, grid);
    const int m_del = grid.delay_bins;
    const int k = r / m_del;
    const int l = r % m_del;
    std::complex<Scalar> diag{0, 0};
    if (row.delay == l) {
        diag = row.by_doppler(k);
    }
    const std::complex<Scalar> off_sum = row.by_doppler.sum() - diag;
    const Scalar energy = row.by_doppler.squaredNorm() - std::norm(diag);
    return {static_cast<double>(std::norm(diag)), static_cast<double>(std::norm(off_sum)),
            static_cast<double>(energy)};
}

/// Couplings per delay index l in [0, M): the magnitudes are the same for every Doppler index
/// of a row, so a (i, j) pair needs M evaluations, each O(N).
inline std::vector<RowCoupling> coupling_by_delay(const DdPath& path_i, const DdPath& path_j, const OtfsGrid& grid) {
    const int n_dop = grid.doppler_bins;
    const int m_del = grid.delay_bins;
    const int size = grid.size();
    const int li = ((path_i.delay_tap % size) + size) % size;
    const int lj = ((path_j.delay_tap % size) + size) % size;
    const double dnu = path_i.doppler() - path_j.doppler();
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<RowCoupling> out(m_del);
    for (int l = 0; l < m_del; ++l) {
        const bool same_delay = ((l - li + lj) % m_del + m_del) % m_del == l;
        std::complex<double> row_sum{0.0, 0.0};
        std::complex<double> diag_sum{0.0, 0.0};
        for (int n = 0; n < n_dop; ++n) {
            const int m = n * m_del + l;
            const int src = ((m - li) % size + size) % size;
            const std::complex<double> w = std::polar(1.0, two_pi * dnu * src / size);
            const int col = ((m - li + lj) % size + size) % size;
            if (col / m_del == 0) {
                row_sum += w;
            }
            diag_sum += w;
        }
        // Doppler row k = 0: sum_k' e^{j 2 pi k' n'/N} = N [n' = 0]
        const std::complex<double> diag = same_delay ? diag_sum / static_cast<double>(n_dop) : 0.0;
        RowCoupling& c = out[l];
        c.chi = std::norm(diag);
        c.kappa = std::norm(row_sum - diag);
        c.off_diagonal_energy = std::max(0.0, 1.0 - c.chi);
    }
    return out;
}

/// Fractional-Doppler spreading coefficient alpha[k, l, c] of a path with taps
/// (k', l', kappa'). c is the Doppler offset in [-N/2, N/2).
std::complex<double> alpha_coeff(int k, int l, int c, const DdPath& path, const OtfsGrid& grid);

/// Geometric-series factor sum_{n<N} exp(j 2 pi (c + kappa') n / N) in ratio form.
std::complex<double> doppler_spread_factor(int c, double fractional_doppler, int doppler_bins);

struct IdentityReport {
    double unitarity = 0.0;       ///< max ||T_i T_i^H - I||_inf
    double diagonal_zero = 0.0;   ///< max |diag(T_i T_j^H)| over pairs with different delay mod M
    double row_sum = 0.0;         ///< max | |row sum of T_i T_j^H|^2 - 1 |
    int pairs_checked = 0;
    int pairs_with_distinct_delay = 0;
};

/// Dense check of unitarity, zero diagonals for differing delays, and unit row-sum magnitude.
/// Throws IdentityViolation naming the first identity above tol.
template <typename Scalar = double>
IdentityReport verify_operator_identities(const PathSet& set, const OtfsGrid& grid, double tol = 1e-9) {
    const int size = grid.size();
    std::vector<CMatrix<Scalar>> ops;
    ops.reserve(set.paths.size());
    for (const auto& p : set.paths) {
        ops.push_back(dd_operator<Scalar>(p, grid));
    }
    IdentityReport report;
    const CMatrix<Scalar> eye = CMatrix<Scalar>::Identity(size, size);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const CMatrix<Scalar> gram = ops[i] * ops[i].adjoint();
        report.unitarity = std::max(report.unitarity,
                                    static_cast<double>((gram - eye).cwiseAbs().rowwise().sum().maxCoeff()));
        for (std::size_t j = 0; j < ops.size(); ++j) {
            const CMatrix<Scalar> prod = ops[i] * ops[j].adjoint();
            ++report.pairs_checked;
            const int dl = set.paths[i].delay_tap - set.paths[j].delay_tap;
            if (((dl % grid.delay_bins) + grid.delay_bins) % grid.delay_bins != 0) {
                ++report.pairs_with_distinct_delay;
                report.diagonal_zero =
                    std::max(report.diagonal_zero, static_cast<double>(prod.diagonal().cwiseAbs().maxCoeff()));
            }
            const auto sums = prod.rowwise().sum();
            for (int r = 0; r < size; ++r) {
                report.row_sum = std::max(report.row_sum, std::abs(static_cast<double>(std::norm(sums(r))) - 1.0));
            }
        }
    }
    if (report.unitarity > tol) {
        throw IdentityViolation("unitarity (T T^H = I)", report.unitarity, tol);
    }
    if (report.diagonal_zero > tol) {
        throw IdentityViolation("zero diagonal for distinct delays", report.diagonal_zero, tol);
    }
    if (report.row_sum > tol) {
        throw IdentityViolation("unit row-sum magnitude", report.row_sum, tol);
    }
    return report;
}

}  // namespace cfotfs
