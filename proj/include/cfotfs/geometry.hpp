#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace cfotfs {

enum class ShadowingMode { kUncorrelated, kCorrelated };

/// Network deployment and large-scale fading parameters.
struct NetworkConfig {
    int num_aps = 40;
    int num_users = 20;
    double area_side_km = 1.0;
    double d0_m = 10.0;
    double d1_m = 50.0;
    /// Frequency/height dependent constant of the three-slope model.
    double path_loss_db = 140.7;
    double shadow_std_db = 8.0;
    ShadowingMode shadowing = ShadowingMode::kUncorrelated;
    /// Correlated mode: z_pq = sqrt(mix) a_p + sqrt(1 - mix) b_q.
    double decorrelation_m = 100.0;
    double ap_user_mix = 0.5;

    double side_m() const noexcept { return area_side_km * 1000.0; }

    /// Throws PreconditionViolation when an invariant does not hold.
    void validate() const;
};

using Point = Eigen::Vector2d;

/// Positions in meters; beta is num_aps x num_users, linear scale.
struct Layout {
    Eigen::Matrix2Xd ap_positions;
    Eigen::Matrix2Xd user_positions;
    Eigen::MatrixXd beta;

    int num_aps() const noexcept { return static_cast<int>(ap_positions.cols()); }
    int num_users() const noexcept { return static_cast<int>(user_positions.cols()); }
};

/// Uniform i.i.d. placement over the square; beta is zero-filled.
Layout place_network(const NetworkConfig& config, std::uint64_t seed);

/// Torus distance on a square of the given side.
double wrapped_distance(const Point& a, const Point& b, double side_m) noexcept;

/// Three-slope path loss in dB (negative: it is a gain). Log arguments in km.
double path_loss_db(double distance_m, const NetworkConfig& config) noexcept;

/// Fills beta = 10^((PL + sigma z)/10). Shadowing only enters links with d > d1.
Layout apply_shadowing(Layout layout, const NetworkConfig& config, std::uint64_t seed);

/// Shadowing draws z (num_aps x num_users) without the d > d1 mask; exposed for testing
/// the correlation structure.
Eigen::MatrixXd shadowing_field(const Layout& layout, const NetworkConfig& config, std::uint64_t seed);

}  // namespace cfotfs
