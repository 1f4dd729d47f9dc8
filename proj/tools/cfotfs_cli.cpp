// Command-line driver for the cell-free OTFS downlink simulator.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "cfotfs/channel.hpp"
#include "cfotfs/errors.hpp"
#include "cfotfs/experiments.hpp"
#include "cfotfs/otfs_core.hpp"
#include "cfotfs/rng.hpp"
#include "cfotfs/serialization.hpp"

namespace {

using cfotfs::json;

struct CommonOptions {
    std::string preset = "desk";
    std::string config_path;
    std::string out_path;
    std::string shadowing;
    std::string isi_weight;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int realizations = 0;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, const std::string& default_preset) {
    o.preset = default_preset;
    cmd->add_option("--preset", o.preset, "Parameter preset")
        ->check(CLI::IsMember({"desk", "paper", "validation"}))
        ->capture_default_str();
    cmd->add_option("--config", o.config_path, "JSON file whose keys override the preset")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_path, "CSV output path; a manifest is written next to it");
    cmd->add_option("--seed", o.seed, "Master seed")->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--shadowing", o.shadowing, "Shadowing model")->check(CLI::IsMember({"corr", "uncorr", "both"}));
    cmd->add_option("--isi-weight", o.isi_weight, "Inter-symbol pair weight")
        ->check(CLI::IsMember({"row-sum", "row-energy"}));
    cmd->add_option("--realizations", o.realizations, "Number of drops")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", o.threads, "Worker threads (0: hardware concurrency)");
}

cfotfs::ExperimentConfig resolve(const CommonOptions& o) {
    cfotfs::ExperimentConfig c = o.preset == "paper"        ? cfotfs::ExperimentConfig::paper()
                                 : o.preset == "validation" ? cfotfs::ExperimentConfig::validation()
                                                            : cfotfs::ExperimentConfig::desk();
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        cfotfs::apply_overrides(json::parse(in), c);
    }
    if (o.seed_set) {
        c.seed = o.seed;
    }
    if (o.shadowing == "corr") {
        c.shadowing_modes = {cfotfs::ShadowingMode::kCorrelated};
    } else if (o.shadowing == "uncorr") {
        c.shadowing_modes = {cfotfs::ShadowingMode::kUncorrelated};
    } else if (o.shadowing == "both") {
        c.shadowing_modes = {cfotfs::ShadowingMode::kUncorrelated, cfotfs::ShadowingMode::kCorrelated};
    }
    if (!o.isi_weight.empty()) {
        c.isi = o.isi_weight == "row-energy" ? cfotfs::IsiWeight::kRowEnergy : cfotfs::IsiWeight::kRowSum;
    }
    if (o.realizations > 0) {
        c.realizations = o.realizations;
    }
    if (o.threads > 0) {
        c.threads = o.threads;
    }
    c.validate();
    return c;
}

/// Writes the CSV to --out (or stdout) and, with --out, a manifest at <out>.manifest.json.
void emit(const std::string& command, const CommonOptions& o, const cfotfs::ExperimentConfig& config,
          const std::string& csv, json summary, double wall_s) {
    if (o.out_path.empty()) {
        std::cout << csv;
        return;
    }
    {
        std::ofstream out(o.out_path, std::ios::binary);
        if (!out) {
            throw cfotfs::Error("cannot write " + o.out_path);
        }
        out << csv;
    }
    const json config_json = config;
    json manifest{{"command", command},
                  {"preset", o.preset},
                  {"config", config_json},
                  {"config_hash", cfotfs::content_hash(config_json.dump())},
                  {"output", o.out_path},
                  {"content_hash", cfotfs::content_hash(csv)},
                  {"wall_time_s", wall_s},
                  {"summary", std::move(summary)}};
    std::ofstream m(o.out_path + ".manifest.json");
    m << manifest.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int cmd_noise(const CommonOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = resolve(o);
    const double dbm = cfotfs::noise_power_dbm(c.grid, c.noise_figure_db);
    const double w = cfotfs::noise_power_w(c.grid, c.noise_figure_db);
    const std::string csv = "noise_dbm,noise_w,bandwidth_hz,noise_figure_db\n" + fmt(dbm) + "," + fmt(w) + "," +
                            fmt(c.grid.bandwidth_hz()) + "," + fmt(c.noise_figure_db) + "\n";
    emit("noise", o, c, csv, {{"noise_dbm", dbm}}, seconds_since(t0));
    return 0;
}

int cmd_identities(const CommonOptions& o, int count, double tol) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = resolve(o);
    std::string csv = "set,unitarity,diagonal_zero,row_sum,pairs,pairs_distinct_delay,pass\n";
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const auto set = cfotfs::sample_paths(1.0, c.paths, c.grid,
                                              cfotfs::derive_seed(c.seed, {0x6964ull, static_cast<std::uint64_t>(i)}));
        cfotfs::IdentityReport r;
        bool pass = true;
        try {
            r = cfotfs::verify_operator_identities(set, c.grid, tol);
        } catch (const cfotfs::IdentityViolation& e) {
            std::cerr << "set " << i << ": " << e.what() << '\n';
            r = cfotfs::verify_operator_identities(set, c.grid, INFINITY);
            pass = false;
        }
        ok = ok && pass;
        worst = std::max({worst, r.unitarity, r.diagonal_zero, r.row_sum});
        csv += std::to_string(i) + "," + fmt(r.unitarity) + "," + fmt(r.diagonal_zero) + "," + fmt(r.row_sum) + "," +
               std::to_string(r.pairs_checked) + "," + std::to_string(r.pairs_with_distinct_delay) + "," +
               (pass ? "1" : "0") + "\n";
    }
    emit("check-identities", o, c, csv, {{"sets", count}, {"max_deviation", worst}, {"passed", ok}},
         seconds_since(t0));
    std::cerr << "identities: " << (ok ? "PASS" : "FAIL") << " (max deviation " << worst << ")\n";
    return ok ? 0 : 1;
}

int cmd_cdf(const CommonOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = resolve(o);
    const auto tables = cfotfs::run_cdf(c);
    json summary = json::array();
    for (const auto& t : tables) {
        summary.push_back({{"shadowing", cfotfs::to_string(t.mode)},
                           {"median_mbps", t.summary.median},
                           {"p5_mbps", t.summary.p5},
                           {"mean_mbps", t.summary.mean},
                           {"max_power_deviation", t.max_power_deviation}});
        std::cerr << cfotfs::to_string(t.mode) << ": median " << t.summary.median << " Mbit/s, 95%-likely "
                  << t.summary.p5 << " Mbit/s\n";
    }
    emit("run-cdf", o, c, cfotfs::cdf_csv(tables), std::move(summary), seconds_since(t0));
    return 0;
}

int cmd_vs_aps(const CommonOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = resolve(o);
    const auto points = cfotfs::run_vs_aps(c, c.ap_counts, c.user_counts);
    json summary = json::array();
    for (const auto& p : points) {
        summary.push_back({{"shadowing", cfotfs::to_string(p.mode)},
                           {"num_aps", p.num_aps},
                           {"num_users", p.num_users},
                           {"mean_throughput_mbps", p.mean_throughput_mbps}});
    }
    emit("run-vs-aps", o, c, cfotfs::sweep_csv(points), std::move(summary), seconds_since(t0));
    return 0;
}

int cmd_validate(const CommonOptions& o, const cfotfs::MonteCarloOptions& mc, double gate, double sigmas) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = resolve(o);
    const auto run = cfotfs::run_validation(c, mc, gate, sigmas);
    std::string csv =
        "instance,user,bin,checked,desired_cf,desired_mc,desired_z,bu_cf,bu_mc,bu_z,isi_cf,isi_mc,isi_z,iui_cf,iui_mc,"
        "iui_z,sinr_cf,sinr_mc,sinr_rel_err\n";
    json instances = json::array();
    for (const auto& inst : run.instances) {
        for (const auto& b : inst.report.bins) {
            const auto& e = b.empirical;
            const bool checked = b.user == inst.checked_user && b.bin == inst.checked_bin;
            csv += std::to_string(inst.index) + "," + std::to_string(b.user) + "," + std::to_string(b.bin) + "," +
                   (checked ? "1" : "0") + "," + fmt(b.closed_form.desired) + "," + fmt(e.desired.real()) + "," +
                   fmt(b.z_desired) + "," + fmt(b.closed_form.beamforming_uncertainty) + "," +
                   fmt(e.beamforming_uncertainty) + "," + fmt(b.z_beamforming_uncertainty) + "," +
                   fmt(b.closed_form.inter_symbol) + "," + fmt(e.inter_symbol) + "," + fmt(b.z_inter_symbol) + "," +
                   fmt(b.closed_form.inter_user) + "," + fmt(e.inter_user) + "," + fmt(b.z_inter_user) + "," +
                   fmt(b.sinr_closed_form) + "," + fmt(b.sinr_empirical) + "," + fmt(b.sinr_relative_error) + "\n";
        }
        instances.push_back({{"index", inst.index},
                             {"checked_user", inst.checked_user},
                             {"checked_bin", inst.checked_bin},
                             {"terms_pass", inst.terms_pass},
                             {"sinr_pass", inst.sinr_pass},
                             {"max_relative_error", inst.report.max_relative_error}});
    }
    json summary{{"passed", run.passed},
                 {"max_relative_error", run.max_relative_error},
                 {"terms_checked", run.terms_checked},
                 {"terms_within_sigmas", run.terms_within_sigmas},
                 {"trials", mc.trials},
                 {"batches", mc.batches},
                 {"instances", instances}};
    emit("validate", o, c, csv, std::move(summary), seconds_since(t0));
    std::cerr << "validate: " << (run.passed ? "PASS" : "FAIL") << " max SINR relative error "
              << run.max_relative_error << ", " << run.terms_within_sigmas << "/" << run.terms_checked
              << " terms within " << sigmas << " SE\n";
    return run.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cell-free OTFS downlink simulator"};
    app.require_subcommand(1);

    CommonOptions noise_opts, id_opts, cdf_opts, sweep_opts, val_opts;

    auto* noise = app.add_subcommand("noise", "Print the receiver noise power");
    add_common(noise, noise_opts, "paper");

    int id_count = 100;
    double id_tol = 1e-9;
    auto* ids = app.add_subcommand("check-identities", "Check operator identities on random path sets");
    add_common(ids, id_opts, "desk");
    ids->add_option("--count", id_count, "Number of random path sets")->capture_default_str();
    ids->add_option("--tolerance", id_tol, "Absolute tolerance")->capture_default_str();

    auto* cdf = app.add_subcommand("run-cdf", "Per-user throughput samples and CDF summary");
    add_common(cdf, cdf_opts, "desk");

    auto* sweep = app.add_subcommand("run-vs-aps", "Mean per-user throughput against the number of APs");
    add_common(sweep, sweep_opts, "desk");

    cfotfs::MonteCarloOptions mc;
    mc.trials = 100000;
    double gate = 0.05;
    double sigmas = 3.0;
    auto* val = app.add_subcommand("validate", "Compare the closed-form SINR with Monte Carlo");
    add_common(val, val_opts, "validation");
    val->add_option("--trials", mc.trials, "Trials per instance")->capture_default_str();
    val->add_option("--batches", mc.batches, "Batches for standard errors")->capture_default_str();
    val->add_option("--gate", gate, "Relative SINR tolerance")->capture_default_str();
    val->add_option("--sigmas", sigmas, "Term tolerance in standard errors")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*noise) return cmd_noise(noise_opts);
        if (*ids) return cmd_identities(id_opts, id_count, id_tol);
        if (*cdf) return cmd_cdf(cdf_opts);
        if (*sweep) return cmd_vs_aps(sweep_opts);
        if (*val) {
            mc.threads = val_opts.threads;
            return cmd_validate(val_opts, mc, gate, sigmas);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
