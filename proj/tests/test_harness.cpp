#include "isac/config_io.hpp"
#include "isac/export.hpp"
#include "isac/harness.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace isac;
namespace fs = std::filesystem;

namespace {

ScenarioSpec small_scene()
{
    ScenarioSpec s;
    s.config.n_tx = s.config.n_rx = 16;
    s.config.f0 = 220e9;
    s.config.delta_f = 500e3;
    s.config.n_subcarriers = 16;
    s.config.n_symbols = 32;
    s.targets.push_back({110.0, deg2rad(-20.0), 10.0, 1.0});
    s.snr_db = 10.0;
    return s;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& name)
{
    const auto d = fs::temp_directory_path() / ("isac_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("rmse definitions")
{
    CHECK(rmse({1.0, 2.0}, {1.0, 2.0}) == 0.0);
    CHECK(rmse({1.5, 2.5, 3.5}, {1.0, 2.0, 3.0}) == doctest::Approx(0.5));
    CHECK(rmse({0.3, -0.3}, {0.0, 0.0}) == doctest::Approx(0.3));
    CHECK_THROWS_AS(rmse({1.0}, {}), std::invalid_argument);
}

TEST_CASE("identical seeds give identical reports; distinct trial seeds")
{
    const auto s = small_scene();
    const auto a = run_trial(s, 77), b = run_trial(s, 77);
    CHECK(a.clusters == b.clusters);
    CHECK(a.estimates.size() == b.estimates.size());
    for (std::size_t i = 0; i < a.estimates.size(); ++i) {
        CHECK(a.estimates[i].angle == b.estimates[i].angle);
        CHECK(a.estimates[i].range == b.estimates[i].range);
        CHECK(a.estimates[i].velocity == b.estimates[i].velocity);
    }
    CHECK(a.noise_var == b.noise_var);
    std::set<std::uint64_t> seeds;
    for (int p = 0; p < 10; ++p)
        for (int t = 0; t < 100; ++t)
            seeds.insert(trial_seed(1, p, t));
    CHECK(seeds.size() == 1000);
    CHECK(trial_seed(1, 2, 3) == trial_seed(1, 2, 3));
    CHECK(trial_seed(1, 2, 3) != trial_seed(2, 2, 3));
}

TEST_CASE("single target at high SNR is detected with accurate parameters")
{
    auto s = small_scene();
    s.snr_db = 20.0;
    const auto r = run_trial(s, 5);
    REQUIRE(r.truth_to_estimate.size() == 1);
    REQUIRE(r.truth_to_estimate[0] >= 0);
    const auto& e = r.estimates[r.truth_to_estimate[0]];
    const auto c = resolved_config(s);
    CHECK(std::abs(rad2deg(e.angle) + 20.0) < 0.2);
    CHECK(e.has_range_velocity);
    CHECK(std::abs(e.range - 110.0) < c.range_resolution() / 2);
    CHECK(std::abs(e.velocity - 10.0) < c.velocity_resolution() / 2);
}

TEST_CASE("target-free scenes stay within the binomial false-alarm bound")
{
    auto s = small_scene();
    s.targets.clear();
    s.snr_db.reset();
    const auto c = resolved_config(s);
    const int Q = build_scan_schedule(c).size();
    const int t = s.processing.vote_threshold(c.n_subcarriers);
    const double per_cell = oracle::binomial_tail(c.n_subcarriers, s.processing.cfar.pfa, t);
    const int trials = 8;
    const double expected = trials * Q * (c.n_symbols - 1) * per_cell;
    int alarms = 0;
    for (int i = 0; i < trials; ++i)
        alarms += run_trial(s, 300 + i).false_alarms;
    CHECK(alarms <= expected + 3.0 * std::sqrt(expected) + 1e-12);
}

TEST_CASE("association gates: one row and one Doppler column")
{
    SystemConfig c;
    c.n_symbols = 16;
    c = with_default_spacing(c);
    const auto schedule = build_scan_schedule(c);
    DetectionReport r;
    r.truth.push_back({100.0, schedule[10], bin_velocity(12, c), 1.0});
    TargetEstimate near, far;
    near.row = 11;
    near.doppler_col = 11;
    far.row = 13;
    far.doppler_col = 12;
    r.estimates = {far, near};
    associate(r, schedule, c);
    CHECK(r.truth_to_estimate[0] == 1);
    CHECK(r.false_alarms == 1);
}

TEST_CASE("error accumulator excludes missed targets")
{
    DetectionReport r;
    r.truth = {{100.0, 0.0, 5.0, 1.0}, {50.0, 0.1, -5.0, 1.0}};
    TargetEstimate e;
    e.angle = deg2rad(0.5);
    e.range = 101.0;
    e.velocity = 5.0;
    e.has_range_velocity = true;
    r.estimates = {e};
    r.truth_to_estimate = {0, -1};
    ErrorAccumulator acc;
    acc.add(r);
    CHECK(acc.rmse_angle_deg() == doctest::Approx(0.5));
    CHECK(acc.rmse_range() == doctest::Approx(1.0));
    CHECK(acc.rmse_velocity() == doctest::Approx(0.0));
}

TEST_CASE("parallel_for covers every index once and propagates errors")
{
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, 4, [&](int i) { hits[i]++; });
    for (auto& h : hits)
        CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(50, 3, [](int i) { if (i == 17) throw std::runtime_error("x"); }), std::runtime_error);
}

TEST_CASE("sweep reruns are byte-identical and independent of the thread count")
{
    ExperimentSpec e;
    e.scene = small_scene();
    e.variable = SweepVariable::SnrDb;
    e.values = {0.0, 10.0};
    e.trials = 3;
    e.seed = 9;
    e.name = "repro";
    const auto d1 = temp_dir("sweep1"), d2 = temp_dir("sweep2");
    e.out_dir = d1.string();
    run_sweep_to_files(e, 1);
    e.out_dir = d2.string();
    run_sweep_to_files(e, 3);
    CHECK(slurp(d1 / "repro.csv") == slurp(d2 / "repro.csv"));
    CHECK(slurp(d1 / "repro.csv").rfind("snr_db,trials", 0) == 0);
    const auto j = read_json_file((d1 / "repro.json").string());
    CHECK(j.at("status") == "complete");
    CHECK(j.at("schema_version") == kMetricsSchemaVersion);
}

TEST_CASE("sweep failures flush completed points")
{
    ExperimentSpec e;
    e.scene = small_scene();
    e.variable = SweepVariable::Symbols;
    e.values = {32.0, 1.0};  // second point violates N >= 2
    e.trials = 1;
    e.name = "partial";
    const auto d = temp_dir("partial");
    e.out_dir = d.string();
    CHECK_THROWS(run_sweep_to_files(e, 1));
    const auto j = read_json_file((d / "partial.json").string());
    CHECK(j.at("status") == "partial");
    CHECK(j.at("points").size() == 1);
}

TEST_CASE("experiment validation and sweep application")
{
    ExperimentSpec e;
    e.scene = small_scene();
    e.values = {1.0, 1.0};
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
    e.values = {3.0, 2.0, 1.0};
    CHECK_NOTHROW(e.validate());
    e.trials = 0;
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
    const auto s = apply_sweep(small_scene(), SweepVariable::Antennas, 64.0);
    CHECK(s.config.n_tx == 64);
    CHECK(s.config.n_rx == 64);
    CHECK(apply_sweep(small_scene(), SweepVariable::Subcarriers, 64.0).config.n_subcarriers == 64);
    CHECK(parse_sweep_variable(to_string(SweepVariable::SinrDb)) == SweepVariable::SinrDb);
    CHECK_THROWS(parse_sweep_variable("bogus"));
}

TEST_CASE("scene JSON: units, unknown keys, spacing, shipped files")
{
    nlohmann::json j = {
        {"system", {{"n_tx", 8}, {"n_rx", 8}, {"f0_hz", 1e11}, {"spacing_wavelengths", 0.5}}},
        {"users", {{{"range_m", 60}, {"angle_deg", 30}, {"sinr_min_db", 20}}}},
        {"targets", {{{"range_m", 90}, {"angle_deg", -10}, {"velocity_mps", 5}}}},
        {"processing", {{"doppler_window", "rect"}, {"angle_refinement", "none"}}},
    };
    const auto s = scenario_from_json(j);
    CHECK(s.config.spacing == doctest::Approx(1.5e-3));
    CHECK(s.users[0].angle == doctest::Approx(kPi / 6));
    CHECK(s.users[0].sinr_min == doctest::Approx(100.0));
    CHECK(s.processing.window == DopplerWindow::Rectangular);
    CHECK(s.processing.refinement == AngleRefinement::None);

    auto bad = j;
    bad["system"]["bogus"] = 1;
    CHECK_THROWS_AS(scenario_from_json(bad), std::invalid_argument);
    bad = j;
    bad["system"]["spacing_m"] = 1e-3;
    CHECK_THROWS_AS(scenario_from_json(bad), std::invalid_argument);
    bad = j;
    bad["processing"]["doppler_window"] = "kaiser";
    CHECK_THROWS_AS(scenario_from_json(bad), std::invalid_argument);

    for (const auto& entry : fs::directory_iterator(ISAC_SOURCE_DIR "/scenes"))
        CHECK_NOTHROW(resolved_config(load_scenario(entry.path().string())));
    for (const auto& entry : fs::directory_iterator(ISAC_SOURCE_DIR "/experiments")) {
        const auto raw = read_json_file(entry.path().string());
        if (raw.contains("sweep"))
            CHECK_NOTHROW(load_experiment(entry.path().string()));
    }
}

TEST_CASE("profiles fill only unset antenna counts")
{
    nlohmann::json j = {{"system", {{"n_tx", 16}}}};
    auto s = scenario_from_json(j);
    apply_profile(s, Profile::Paper, j);
    CHECK(s.config.n_tx == 16);
    CHECK(s.config.n_rx == 128);
    apply_profile(s, Profile::Ci, j);
    CHECK(s.config.n_rx == 32);
    CHECK(profile_trials(Profile::Paper) == 1000);
    CHECK(profile_trials(Profile::Ci) == 100);
}

TEST_CASE("binary cube round trip and CSV writers")
{
    ComplexCube c(3, 4, 5);
    for (std::size_t i = 0; i < c.size(); ++i)
        c.data()[i] = Complex(0.5 * i, -1.0 / (i + 1.0));
    const auto d = temp_dir("export");
    write_cube_binary((d / "c.bin").string(), c);
    const auto r = read_cube_binary((d / "c.bin").string());
    CHECK(r.same_shape(c));
    CHECK(r.data() == c.data());
    CHECK(fs::file_size(d / "c.bin") == 12 + 16 * c.size());

    SystemConfig cfg;
    cfg.n_tx = 32;
    cfg = with_default_spacing(cfg);
    std::vector<UserSpec> users(1);
    users[0].range = 60.0;
    users[0].sinr_min = 10.0;
    const auto allocs = allocate_scan(build_scan_schedule(cfg), users, cfg);
    write_allocation_csv((d / "a.csv").string(), allocs);
    std::ifstream f(d / "a.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header.rfind("slot,theta_deg,sector,rho_s,rho_c_1,esp,sinr_db_1", 0) == 0);
    int lines = 0;
    for (std::string l; std::getline(f, l);)
        ++lines;
    CHECK(lines == static_cast<int>(allocs.size()));
}

}
