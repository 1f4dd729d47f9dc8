#include "cfotfs/geometry.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "cfotfs/errors.hpp"
#include "cfotfs/rng.hpp"

namespace cfotfs {

void NetworkConfig::validate() const {
    if (num_aps < 1 || num_users < 1) {
        throw PreconditionViolation("network needs at least one AP and one user");
    }
    if (!(d0_m > 0.0 && d0_m < d1_m && d1_m < side_m())) {
        throw PreconditionViolation("path-loss breakpoints must satisfy 0 < d0 < d1 < D");
    }
    if (shadow_std_db < 0.0) {
        throw PreconditionViolation("shadowing std must be non-negative");
    }
    if (ap_user_mix < 0.0 || ap_user_mix > 1.0) {
        throw PreconditionViolation("AP/user shadowing mix must lie in [0, 1]");
    }
    if (shadowing == ShadowingMode::kCorrelated && !(decorrelation_m > 0.0)) {
        throw PreconditionViolation("decorrelation distance must be positive");
    }
}

Layout place_network(const NetworkConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(derive_seed(seed, {0x706C616365ull}));
    const double side = config.side_m();
    Layout layout;
    layout.ap_positions.resize(2, config.num_aps);
    layout.user_positions.resize(2, config.num_users);
    for (int p = 0; p < config.num_aps; ++p) {
        layout.ap_positions(0, p) = side * rng.uniform();
        layout.ap_positions(1, p) = side * rng.uniform();
    }
    for (int q = 0; q < config.num_users; ++q) {
        layout.user_positions(0, q) = side * rng.uniform();
        layout.user_positions(1, q) = side * rng.uniform();
    }
    layout.beta = Eigen::MatrixXd::Zero(config.num_aps, config.num_users);
    return layout;
}

double wrapped_distance(const Point& a, const Point& b, double side_m) noexcept {
    const Eigen::Array2d delta = (a - b).array().abs();
    const Eigen::Array2d wrapped = delta.min(side_m - delta);
    return wrapped.matrix().norm();
}

double path_loss_db(double distance_m, const NetworkConfig& config) noexcept {
    const double d_km = distance_m / 1000.0;
    const double d0_km = config.d0_m / 1000.0;
    const double d1_km = config.d1_m / 1000.0;
    if (distance_m > config.d1_m) {
        return -config.path_loss_db - 35.0 * std::log10(d_km);
    }
    if (distance_m > config.d0_m) {
        return -config.path_loss_db - 15.0 * std::log10(d1_km) - 20.0 * std::log10(d_km);
    }
    return -config.path_loss_db - 15.0 * std::log10(d1_km) - 20.0 * std::log10(d0_km);
}

namespace {

// Standard-normal field with covariance exp(-d / d_decorr) over wrapped distances.
Eigen::VectorXd correlated_normals(const Eigen::Matrix2Xd& points, double side_m, double decorrelation_m,
                                   Rng& rng) {
    const Eigen::Index n = points.cols();
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a; b < n; ++b) {
            const double d = wrapped_distance(points.col(a), points.col(b), side_m);
            cov(a, b) = cov(b, a) = std::exp(-d / decorrelation_m);
        }
    }
    // the torus metric can make the kernel slightly indefinite; clip negative modes
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd factor = eig.eigenvectors() * root.asDiagonal();

    Eigen::VectorXd white(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        white(i) = rng.normal();
    }
    return factor * white;
}

}  // namespace

Eigen::MatrixXd shadowing_field(const Layout& layout, const NetworkConfig& config, std::uint64_t seed) {
    const int aps = layout.num_aps();
    const int users = layout.num_users();
    Rng rng(derive_seed(seed, {0x736861646Full}));
    Eigen::MatrixXd z(aps, users);
    if (config.shadowing == ShadowingMode::kUncorrelated) {
        for (int p = 0; p < aps; ++p) {
            for (int q = 0; q < users; ++q) {
                z(p, q) = rng.normal();
            }
        }
        return z;
    }
    const double side = config.side_m();
    const Eigen::VectorXd ap_field = correlated_normals(layout.ap_positions, side, config.decorrelation_m, rng);
    const Eigen::VectorXd user_field = correlated_normals(layout.user_positions, side, config.decorrelation_m, rng);
    const double wa = std::sqrt(config.ap_user_mix);
    const double wu = std::sqrt(1.0 - config.ap_user_mix);
    z = wa * ap_field.replicate(1, users) + wu * user_field.transpose().replicate(aps, 1);
    return z;
}

Layout apply_shadowing(Layout layout, const NetworkConfig& config, std::uint64_t seed) {
    config.validate();
    const int aps = layout.num_aps();
    const int users = layout.num_users();
    const Eigen::MatrixXd z = shadowing_field(layout, config, seed);
    const double side = config.side_m();
    layout.beta.resize(aps, users);
    for (int p = 0; p < aps; ++p) {
        for (int q = 0; q < users; ++q) {
            const double d = wrapped_distance(layout.ap_positions.col(p), layout.user_positions.col(q), side);
            const double shadow_db = d > config.d1_m ? config.shadow_std_db * z(p, q) : 0.0;
            layout.beta(p, q) = std::pow(10.0, (path_loss_db(d, config) + shadow_db) / 10.0);
        }
    }
    return layout;
}

}  // namespace cfotfs
