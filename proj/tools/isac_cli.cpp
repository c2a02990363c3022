// Command-line driver: single trials with stage dumps, Monte-Carlo sweeps and
// power-allocation traces.

#include "isac/config_io.hpp"
#include "isac/export.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace isac;

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string profile;
};

std::optional<Profile> parse_profile(const std::string& s)
{
    if (s.empty())
        return std::nullopt;
    if (s == "ci")
        return Profile::Ci;
    if (s == "paper")
        return Profile::Paper;
    throw CLI::ValidationError("--profile", "expected ci or paper");
}

void add_common(CLI::App* cmd, CommonFlags& f, bool with_threads)
{
    cmd->add_option("--config", f.config, "scene or experiment JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "master seed");
    if (with_threads)
        cmd->add_option("--threads", f.threads, "worker threads (0 = hardware concurrency)");
    cmd->add_option("--profile", f.profile, "ci or paper")->check(CLI::IsMember({"ci", "paper"}));
}

ScenarioSpec load_scene_with_profile(const CommonFlags& f)
{
    const auto j = read_json_file(f.config);
    auto spec = scenario_from_json(j);
    if (auto p = parse_profile(f.profile))
        apply_profile(spec, *p, j);
    return spec;
}

std::string slot_tag(int q)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "q%03d", q);
    return buf;
}

Eigen::MatrixXd mask_to_double(const MaskMatrix& m)
{
    return m.cast<double>();
}

int cmd_run(const CommonFlags& f)
{
    const auto spec = load_scene_with_profile(f);
    const fs::path out = f.out.empty() ? fs::path("out/run") : fs::path(f.out);
    fs::create_directories(out);
    const std::uint64_t seed = f.seed.value_or(1);

    TrialArtifacts art;
    const auto report = run_trial(spec, seed, &art);

    write_allocation_csv((out / "allocation.csv").string(), art.allocations);
    write_matrix_csv((out / "adse_prefilter.csv").string(), art.pre_filter_power);
    write_matrix_csv((out / "adse_postfilter.csv").string(), art.score);
    write_matrix_csv((out / "votes.csv").string(), art.votes.cast<double>());
    write_matrix_csv((out / "mask.csv").string(), mask_to_double(art.mask));
    for (const auto& [q, est] : art.slot_estimates)
        write_music_csv((out / ("music_" + slot_tag(q))).string(), est);
    write_detection_csv((out / "detections.csv").string(), report);
    {
        std::ofstream t(out / "truth.csv");
        t << "target,theta_deg,range_m,velocity_mps,estimate\n";
        for (std::size_t k = 0; k < report.truth.size(); ++k)
            t << k << ',' << rad2deg(report.truth[k].angle) << ',' << report.truth[k].range << ','
              << report.truth[k].radial_velocity << ',' << report.truth_to_estimate[k] << '\n';
    }
    write_cube_binary((out / "echoes.bin").string(), art.echoes);

    nlohmann::json summary;
    summary["schema_version"] = kMetricsSchemaVersion;
    summary["seed"] = seed;
    summary["clusters"] = report.clusters;
    summary["false_alarms"] = report.false_alarms;
    summary["infeasible_slots"] = report.infeasible_slots;
    summary["noise_var"] = report.noise_var;
    int detected = 0;
    for (int e : report.truth_to_estimate)
        detected += e >= 0;
    summary["truths"] = report.truth.size();
    summary["detected"] = detected;
    std::ofstream(out / "summary.json") << summary.dump(2) << '\n';

    std::cout << "clusters " << report.clusters << ", detected " << detected << "/" << report.truth.size()
              << ", false alarms " << report.false_alarms << "\n";
    for (const auto& e : report.estimates) {
        std::cout << "  theta " << rad2deg(e.angle) << " deg";
        if (e.has_range_velocity)
            std::cout << ", r " << e.range << " m, v " << e.velocity << " m/s";
        std::cout << "\n";
    }
    std::cout << "artifacts in " << out.string() << "\n";
    return 0;
}

int cmd_sweep(const CommonFlags& f)
{
    const auto j = read_json_file(f.config);
    const auto dir = fs::path(f.config).parent_path();
    auto exp = experiment_from_json(j, dir.empty() ? "." : dir.string());
    if (auto p = parse_profile(f.profile)) {
        const auto scene_json = j.contains("scene") ? j.at("scene")
                                                    : read_json_file((dir / j.at("scene_file").get<std::string>()).string());
        apply_profile(exp.scene, *p, scene_json);
        if (!j.contains("trials"))
            exp.trials = profile_trials(*p);
    }
    if (f.seed)
        exp.seed = *f.seed;
    if (!f.out.empty())
        exp.out_dir = f.out;
    exp.validate();
    const auto points = run_sweep_to_files(exp, f.threads);
    std::cout << to_string(exp.variable) << " sweep, " << exp.trials << " trials per point\n";
    for (const auto& p : points) {
        std::cout << "  " << p.value << ": pd " << p.pd << ", rmse_theta " << p.rmse_angle_deg << " deg, rmse_r "
                  << p.rmse_range << " m, rmse_v " << p.rmse_velocity << " m/s";
        if (p.bits > 0)
            std::cout << ", ber " << p.ber;
        std::cout << "\n";
    }
    std::cout << "wrote " << (fs::path(exp.out_dir) / (exp.name + ".csv")).string() << "\n";
    return 0;
}

int cmd_alloc(const CommonFlags& f)
{
    const auto spec = load_scene_with_profile(f);
    const auto config = resolved_config(spec);
    check_sectors_disjoint(spec.users, config);
    const auto schedule = build_scan_schedule(config);
    const auto allocs = allocate_scan(schedule, spec.users, config);
    const fs::path out = f.out.empty() ? fs::path("out/alloc") : fs::path(f.out);
    fs::create_directories(out);
    write_allocation_csv((out / "allocation.csv").string(), allocs);
    int infeasible = 0;
    for (const auto& a : allocs)
        infeasible += a.best_effort;
    std::cout << allocs.size() << " slots, " << infeasible << " infeasible, wrote " << (out / "allocation.csv").string()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ISAC scan simulator"};
    app.require_subcommand(1);

    CommonFlags run_flags, sweep_flags, alloc_flags;
    auto* run = app.add_subcommand("run", "single trial, dumps stage artifacts");
    add_common(run, run_flags, false);
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep from an experiment file");
    add_common(sweep, sweep_flags, true);
    auto* alloc = app.add_subcommand("alloc", "per-slot power allocation trace");
    add_common(alloc, alloc_flags, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(run_flags);
        if (*sweep)
            return cmd_sweep(sweep_flags);
        if (*alloc)
            return cmd_alloc(alloc_flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
