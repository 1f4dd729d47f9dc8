#include "cfotfs/serialization.hpp"

#include <cstdio>

#include "cfotfs/errors.hpp"

namespace cfotfs {

namespace {

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

std::complex<double> complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json points_json(const Eigen::Matrix2Xd& pts) {
    json out = json::array();
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
        out.push_back({pts(0, i), pts(1, i)});
    }
    return out;
}

Eigen::Matrix2Xd points_from(const json& j) {
    Eigen::Matrix2Xd pts(2, static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        pts(0, static_cast<Eigen::Index>(i)) = j[i].at(0).get<double>();
        pts(1, static_cast<Eigen::Index>(i)) = j[i].at(1).get<double>();
    }
    return pts;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

void to_json(json& j, const Layout& layout) {
    json beta = json::array();
    for (Eigen::Index p = 0; p < layout.beta.rows(); ++p) {
        beta.push_back(vector_json(layout.beta.row(p).transpose()));
    }
    j = json{{"ap_positions_m", points_json(layout.ap_positions)},
             {"user_positions_m", points_json(layout.user_positions)},
             {"beta", beta}};
}

void from_json(const json& j, Layout& layout) {
    layout.ap_positions = points_from(j.at("ap_positions_m"));
    layout.user_positions = points_from(j.at("user_positions_m"));
    const json& beta = j.at("beta");
    layout.beta.resize(layout.num_aps(), layout.num_users());
    for (int p = 0; p < layout.num_aps(); ++p) {
        layout.beta.row(p) = vector_from(beta.at(static_cast<std::size_t>(p))).transpose();
    }
}

void to_json(json& j, const DdPath& path) {
    j = json{{"delay_tap", path.delay_tap},
             {"doppler_tap", path.doppler_tap},
             {"fractional_doppler", path.fractional_doppler},
             {"variance", path.variance},
             {"gain", complex_json(path.gain)}};
}

void from_json(const json& j, DdPath& path) {
    j.at("delay_tap").get_to(path.delay_tap);
    j.at("doppler_tap").get_to(path.doppler_tap);
    j.at("fractional_doppler").get_to(path.fractional_doppler);
    j.at("variance").get_to(path.variance);
    path.gain = complex_from(j.at("gain"));
}

void to_json(json& j, const PathSet& set) {
    j = json{{"ap", set.ap}, {"user", set.user}, {"paths", set.paths}};
}

void from_json(const json& j, PathSet& set) {
    j.at("ap").get_to(set.ap);
    j.at("user").get_to(set.user);
    j.at("paths").get_to(set.paths);
}

void to_json(json& j, const LinkStats& stats) {
    json links = json::array();
    for (int p = 0; p < stats.num_aps; ++p) {
        for (int q = 0; q < stats.num_users; ++q) {
            const LinkStat& l = stats.link(p, q);
            links.push_back({{"ap", p},
                             {"user", q},
                             {"beta", vector_json(l.beta)},
                             {"coeff", vector_json(l.coeff)},
                             {"gamma", vector_json(l.gamma)},
                             {"xi", l.xi}});
        }
    }
    j = json{{"num_aps", stats.num_aps}, {"num_users", stats.num_users}, {"links", links}};
}

void from_json(const json& j, LinkStats& stats) {
    j.at("num_aps").get_to(stats.num_aps);
    j.at("num_users").get_to(stats.num_users);
    stats.links.assign(static_cast<std::size_t>(stats.num_aps) * stats.num_users, LinkStat{});
    for (const json& l : j.at("links")) {
        LinkStat& link = stats.link(l.at("ap").get<int>(), l.at("user").get<int>());
        link.beta = vector_from(l.at("beta"));
        link.coeff = vector_from(l.at("coeff"));
        link.gamma = vector_from(l.at("gamma"));
        l.at("xi").get_to(link.xi);
    }
}

void to_json(json& j, const TermEstimates& e) {
    j = json{{"user", e.user},
             {"bin", e.bin},
             {"desired", complex_json(e.desired)},
             {"desired_se", e.desired_se},
             {"beamforming_uncertainty", e.beamforming_uncertainty},
             {"beamforming_uncertainty_se", e.beamforming_uncertainty_se},
             {"inter_symbol", e.inter_symbol},
             {"inter_symbol_se", e.inter_symbol_se},
             {"inter_symbol_coherent", e.inter_symbol_coherent},
             {"inter_symbol_coherent_se", e.inter_symbol_coherent_se},
             {"inter_user", e.inter_user},
             {"inter_user_se", e.inter_user_se},
             {"trials", e.trials},
             {"batches", e.batches},
             {"insufficient_trials", e.insufficient_trials}};
}

void to_json(json& j, const ValidationReport& report) {
    json bins = json::array();
    for (const auto& b : report.bins) {
        const auto term = [](double cf, double emp, double se, double z) {
            return json{{"closed_form", cf}, {"empirical", emp}, {"std_error", se}, {"z", z},
                        {"pass", std::abs(z) <= 3.0}};
        };
        const TermEstimates& e = b.empirical;
        bins.push_back({{"user", b.user},
                        {"bin", b.bin},
                        {"desired", term(b.closed_form.desired, e.desired.real(), e.desired_se, b.z_desired)},
                        {"beamforming_uncertainty",
                         term(b.closed_form.beamforming_uncertainty, e.beamforming_uncertainty,
                              e.beamforming_uncertainty_se, b.z_beamforming_uncertainty)},
                        {"inter_symbol", term(b.closed_form.inter_symbol, e.inter_symbol, e.inter_symbol_se,
                                              b.z_inter_symbol)},
                        {"inter_symbol_coherent", e.inter_symbol_coherent},
                        {"inter_user", term(b.closed_form.inter_user, e.inter_user, e.inter_user_se, b.z_inter_user)},
                        {"sinr_closed_form", b.sinr_closed_form},
                        {"sinr_empirical", b.sinr_empirical},
                        {"sinr_relative_error", b.sinr_relative_error},
                        {"pass", b.sinr_pass}});
    }
    j = json{{"gate", report.gate},
             {"max_relative_error", report.max_relative_error},
             {"empirical_bin_spread", report.empirical_bin_spread},
             {"passed", report.passed},
             {"bins", bins}};
}

namespace {

std::string profile_name(PowerProfile p) { return p == PowerProfile::kReplicate ? "replicate" : "uniform"; }
std::string isi_name(IsiWeight w) { return w == IsiWeight::kRowEnergy ? "row-energy" : "row-sum"; }

ShadowingMode mode_from(const std::string& s) {
    if (s == "corr" || s == "correlated") return ShadowingMode::kCorrelated;
    if (s == "uncorr" || s == "uncorrelated") return ShadowingMode::kUncorrelated;
    throw PreconditionViolation("unknown shadowing mode '" + s + "'");
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        j.at(key).get_to(out);
    }
}

}  // namespace

void to_json(json& j, const ExperimentConfig& c) {
    json modes = json::array();
    for (auto m : c.shadowing_modes) {
        modes.push_back(to_string(m));
    }
    j = json{{"network",
              {{"num_aps", c.network.num_aps},
               {"num_users", c.network.num_users},
               {"area_side_km", c.network.area_side_km},
               {"d0_m", c.network.d0_m},
               {"d1_m", c.network.d1_m},
               {"path_loss_db", c.network.path_loss_db},
               {"shadow_std_db", c.network.shadow_std_db},
               {"decorrelation_m", c.network.decorrelation_m},
               {"ap_user_mix", c.network.ap_user_mix}}},
             {"grid",
              {{"doppler_bins", c.grid.doppler_bins},
               {"delay_bins", c.grid.delay_bins},
               {"subcarrier_spacing_hz", c.grid.subcarrier_spacing_hz},
               {"carrier_hz", c.grid.carrier_hz}}},
             {"paths",
              {{"num_paths", c.paths.num_paths},
               {"max_delay_tap", c.paths.max_delay_tap},
               {"max_doppler_tap", c.paths.max_doppler_tap},
               {"fractional", c.paths.fractional},
               {"distinct_delays", c.paths.distinct_delays},
               {"profile", profile_name(c.paths.profile)}}},
             {"extra_doppler_guard", c.extra_doppler_guard},
             {"power_w", {{"downlink", c.downlink_power_w}, {"uplink", c.uplink_power_w}, {"pilot", c.pilot_power_w}}},
             {"noise_figure_db", c.noise_figure_db},
             {"realizations", c.realizations},
             {"seed", c.seed},
             {"isi_weight", isi_name(c.isi)},
             {"shadowing", modes},
             {"ap_counts", c.ap_counts},
             {"user_counts", c.user_counts}};
}

void apply_overrides(const json& j, ExperimentConfig& c) {
    if (j.contains("network")) {
        const json& n = j.at("network");
        maybe(n, "num_aps", c.network.num_aps);
        maybe(n, "num_users", c.network.num_users);
        maybe(n, "area_side_km", c.network.area_side_km);
        maybe(n, "d0_m", c.network.d0_m);
        maybe(n, "d1_m", c.network.d1_m);
        maybe(n, "path_loss_db", c.network.path_loss_db);
        maybe(n, "shadow_std_db", c.network.shadow_std_db);
        maybe(n, "decorrelation_m", c.network.decorrelation_m);
        maybe(n, "ap_user_mix", c.network.ap_user_mix);
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        maybe(g, "doppler_bins", c.grid.doppler_bins);
        maybe(g, "delay_bins", c.grid.delay_bins);
        maybe(g, "subcarrier_spacing_hz", c.grid.subcarrier_spacing_hz);
        maybe(g, "carrier_hz", c.grid.carrier_hz);
        c.grid.symbol_duration_s = 1.0 / c.grid.subcarrier_spacing_hz;
    }
    if (j.contains("paths")) {
        const json& p = j.at("paths");
        maybe(p, "num_paths", c.paths.num_paths);
        maybe(p, "max_delay_tap", c.paths.max_delay_tap);
        maybe(p, "max_doppler_tap", c.paths.max_doppler_tap);
        maybe(p, "fractional", c.paths.fractional);
        maybe(p, "distinct_delays", c.paths.distinct_delays);
        if (p.contains("profile")) {
            c.paths.profile = p.at("profile").get<std::string>() == "replicate" ? PowerProfile::kReplicate
                                                                                : PowerProfile::kUniform;
        }
    }
    if (j.contains("max_speed_kmh")) {
        c.paths.max_doppler_tap = max_doppler_index(j.at("max_speed_kmh").get<double>(), c.grid);
    }
    maybe(j, "extra_doppler_guard", c.extra_doppler_guard);
    if (j.contains("power_w")) {
        const json& w = j.at("power_w");
        maybe(w, "downlink", c.downlink_power_w);
        maybe(w, "uplink", c.uplink_power_w);
        maybe(w, "pilot", c.pilot_power_w);
    }
    maybe(j, "noise_figure_db", c.noise_figure_db);
    maybe(j, "realizations", c.realizations);
    maybe(j, "seed", c.seed);
    if (j.contains("isi_weight")) {
        c.isi = j.at("isi_weight").get<std::string>() == "row-energy" ? IsiWeight::kRowEnergy : IsiWeight::kRowSum;
    }
    if (j.contains("shadowing")) {
        c.shadowing_modes.clear();
        for (const auto& m : j.at("shadowing")) {
            c.shadowing_modes.push_back(mode_from(m.get<std::string>()));
        }
    }
    maybe(j, "ap_counts", c.ap_counts);
    maybe(j, "user_counts", c.user_counts);
    maybe(j, "threads", c.threads);
}

std::string content_hash(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cfotfs
