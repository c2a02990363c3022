#ifndef ISAC_HARNESS_HPP
#define ISAC_HARNESS_HPP

#include "isac/channel.hpp"
#include "isac/commlink.hpp"
#include "isac/detect.hpp"
#include "isac/echoes.hpp"
#include "isac/powalloc.hpp"
#include "isac/rdest.hpp"
#include "isac/scenario.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace isac {

struct ProcessingOptions {
    CfarParams cfar{.skip_zero_doppler = true};  // the clutter filter nulls that column
    int min_votes = 0;          // > 0 overrides the vote threshold
    double ct_fraction = 0.0;   // > 0 sets the threshold to ceil(fraction * M)
    AngleRefinement refinement = AngleRefinement::PatternFit;
    DopplerWindow window = DopplerWindow::Hann;

    int vote_threshold(int subcarriers) const;
};

struct ClutterOptions {
    bool enabled = true;
    double mean_rcs = 0.0;   // > 0 fixes the per-unit mean RCS
    double margin_db = 20.0; // otherwise: clutter-over-target power margin
};

/// Draws fresh targets for every trial (used by the Monte-Carlo sweeps).
struct RandomTargets {
    int count = 1;
    double range_min = 0.0, range_max = 0.0;   // 0 means the config bounds shrunk by 10 %
    double angle_margin = 0.0;                 // radians kept clear of the sector edges
    double speed_min = 0.0, speed_max = 0.0;   // |v|; 0 means 2 dv and 0.9 v_max
    double mean_rcs = 1.0;
};

struct ScenarioSpec {
    SystemConfig config;
    std::vector<UserSpec> users;
    std::vector<TargetSpec> targets;
    ClutterOptions clutter;
    RcsAmplitudeLaw amplitude_law = RcsAmplitudeLaw::Linear;
    RcsFluctuation fluctuation = RcsFluctuation::Swerling1;
    std::optional<double> snr_db;  // sensing SNR knob; unset uses config.noise_var_sense
    bool noiseless = false;
    ProcessingOptions processing;
    SymbolOptions symbols;
    std::optional<RandomTargets> random_targets;
};

/// Config with default spacing filled in and validated, plus the clutter map.
Scene build_scene(const ScenarioSpec& spec, const SystemConfig& config);
SystemConfig resolved_config(const ScenarioSpec& spec);

struct TargetEstimate {
    int cluster = -1;
    int row = 0;          // peak scan row
    int doppler_col = 0;  // peak Doppler column
    double angle = 0.0;
    double range = 0.0;
    double velocity = 0.0;
    bool has_range_velocity = false;
};

struct DetectionReport {
    std::vector<TargetEstimate> estimates;
    std::vector<int> truth_to_estimate;  // -1 for missed targets
    int false_alarms = 0;
    int clusters = 0;
    int infeasible_slots = 0;
    double noise_var = 0.0;
    std::vector<TargetSpec> truth;
};

/// Intermediate products of a trial, filled when requested.
struct TrialArtifacts {
    ScanSchedule schedule;
    std::vector<SlotAllocation> allocations;
    ComplexCube echoes;
    ComplexCube eec;
    ComplexCube dynamic;
    Eigen::MatrixXd pre_filter_power;   // sum over m of |ADSE|^2 before clutter removal
    Eigen::MatrixXd score;              // after clutter removal
    Eigen::MatrixXi votes;
    MaskMatrix mask;
    std::vector<std::pair<int, SlotEstimate>> slot_estimates;
};

/// powalloc -> channel -> echoes -> clutter filter -> detection -> range/velocity estimation.
DetectionReport run_trial(const ScenarioSpec& spec, std::uint64_t seed, TrialArtifacts* artifacts = nullptr);

/// Gate association of estimates to truth: within +-1 scan row and +-1 Doppler column.
void associate(DetectionReport& report, const ScanSchedule& schedule, const SystemConfig& config);

struct ErrorAccumulator {
    double sum_sq_angle_deg = 0.0;
    double sum_sq_range = 0.0;
    double sum_sq_velocity = 0.0;
    std::int64_t angle_count = 0;
    std::int64_t rv_count = 0;

    void add(const DetectionReport& report);
    double rmse_angle_deg() const;
    double rmse_range() const;
    double rmse_velocity() const;
};

/// sqrt(mean of squared differences)
double rmse(const std::vector<double>& estimates, const std::vector<double>& truth);

struct MetricsPoint {
    double value = 0.0;
    int trials = 0;
    std::int64_t truths = 0;
    std::int64_t detected = 0;
    std::int64_t false_alarms = 0;
    double pd = 0.0;
    double rmse_angle_deg = 0.0;
    double rmse_range = 0.0;
    double rmse_velocity = 0.0;
    double ber = 0.0;
    std::int64_t bits = 0;
    std::int64_t bit_errors = 0;
    int infeasible_slots = 0;
    double runtime_s = 0.0;
};

enum class SweepVariable { SnrDb, Subcarriers, Symbols, Antennas, TxAntennas, RxAntennas, SinrDb };

SweepVariable parse_sweep_variable(const std::string& name);
std::string to_string(SweepVariable v);

struct ExperimentSpec {
    ScenarioSpec scene;
    SweepVariable variable = SweepVariable::SnrDb;
    std::vector<double> values;
    int trials = 100;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string name = "sweep";

    void validate() const;
};

/// Scene with the sweep variable set to value.
ScenarioSpec apply_sweep(const ScenarioSpec& base, SweepVariable variable, double value);

/// Deterministic per-trial seed from (master, point, trial).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial);

/// Runs every point and trial on `threads` workers. Results are aggregated by
/// index, so they do not depend on scheduling.
std::vector<MetricsPoint> run_sweep(const ExperimentSpec& spec, int threads);

/// Runs the sweep and writes <out>/<name>.csv and <out>/<name>.json. On failure the
/// points completed so far are written before the error propagates.
std::vector<MetricsPoint> run_sweep_to_files(const ExperimentSpec& spec, int threads);

/// Executes fn(i) for i in [0, count) on a pool of worker threads.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

} // namespace isac

#endif // ISAC_HARNESS_HPP
