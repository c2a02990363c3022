#include "isac/harness.hpp"

#include "isac/clutterfilter.hpp"
#include "isac/export.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace isac {

int ProcessingOptions::vote_threshold(int subcarriers) const
{
    if (min_votes > 0)
        return min_votes;
    if (ct_fraction > 0.0)
        return votes_for_fraction(ct_fraction, subcarriers);
    return default_min_votes(subcarriers, cfar.pfa);
}

SystemConfig resolved_config(const ScenarioSpec& spec)
{
    SystemConfig c = with_default_spacing(spec.config);
    c.validate();
    return c;
}

Scene build_scene(const ScenarioSpec& spec, const SystemConfig& config)
{
    Scene scene;
    scene.users = spec.users;
    scene.targets = spec.targets;
    scene.amplitude_law = spec.amplitude_law;
    scene.fluctuation = spec.fluctuation;
    if (spec.clutter.enabled) {
        ClutterMap grid = build_clutter_map(config, 1.0);
        const double rcs = spec.clutter.mean_rcs > 0.0
                               ? spec.clutter.mean_rcs
                               : clutter_rcs_for_margin(grid, spec.targets, spec.clutter.margin_db, spec.amplitude_law);
        for (auto& u : grid.units)
            u.mean_rcs = rcs;
        scene.clutter = std::move(grid);
    }
    return scene;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial)
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(master) ^ point) ^ trial);
}

namespace {

std::vector<TargetSpec> draw_targets(const RandomTargets& gen, const SystemConfig& config, Rng& rng)
{
    const double span = config.r_max - config.r_min;
    const double r0 = gen.range_min > 0.0 ? gen.range_min : config.r_min + 0.1 * span;
    const double r1 = gen.range_max > 0.0 ? gen.range_max : config.r_max - 0.1 * span;
    const double margin = gen.angle_margin > 0.0 ? gen.angle_margin : 0.0;
    const double s0 = std::sin(config.theta_min + margin);
    const double s1 = std::sin(config.theta_max - margin);
    const double v0 = gen.speed_min > 0.0 ? gen.speed_min : 2.0 * config.velocity_resolution();
    const double v1 = gen.speed_max > 0.0 ? gen.speed_max : 0.9 * config.max_unambiguous_velocity();
    if (!(r0 < r1) || !(s0 < s1) || !(v0 < v1))
        throw std::invalid_argument("random targets: empty draw region");
    std::uniform_real_distribution<double> ur(r0, r1), us(s0, s1), uv(v0, v1), coin(0.0, 1.0);
    std::vector<TargetSpec> out(static_cast<std::size_t>(gen.count));
    for (auto& t : out) {
        t.range = ur(rng);
        t.angle = std::asin(us(rng));
        const double speed = uv(rng);
        t.radial_velocity = coin(rng) < 0.5 ? -speed : speed;
        t.mean_rcs = gen.mean_rcs;
    }
    return out;
}

int circular_distance(int a, int b, int n)
{
    const int d = std::abs(a - b) % n;
    return std::min(d, n - d);
}

double wrap_velocity_distance(double a, double b, double span)
{
    const double d = std::fmod(std::abs(a - b), span);
    return std::min(d, span - d);
}

} // namespace

void associate(DetectionReport& report, const ScanSchedule& schedule, const SystemConfig& config)
{
    const int K = static_cast<int>(report.truth.size());
    const int E = static_cast<int>(report.estimates.size());
    const int N = config.n_symbols;
    struct Candidate {
        int cost;
        int truth;
        int est;
    };
    std::vector<Candidate> cands;
    for (int k = 0; k < K; ++k) {
        const int row = schedule.nearest_slot(report.truth[k].angle);
        const int col = velocity_bin(report.truth[k].radial_velocity, config);
        for (int e = 0; e < E; ++e) {
            const int dr = std::abs(report.estimates[e].row - row);
            const int dc = circular_distance(report.estimates[e].doppler_col, col, N);
            if (dr <= 1 && dc <= 1)
                cands.push_back({dr + dc, k, e});
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
    report.truth_to_estimate.assign(K, -1);
    std::vector<bool> used(E, false);
    int matched = 0;
    for (const auto& c : cands) {
        if (report.truth_to_estimate[c.truth] >= 0 || used[c.est])
            continue;
        report.truth_to_estimate[c.truth] = c.est;
        used[c.est] = true;
        ++matched;
    }
    report.false_alarms = E - matched;
}

DetectionReport run_trial(const ScenarioSpec& input, std::uint64_t seed, TrialArtifacts* artifacts)
{
    ScenarioSpec spec = input;
    const SystemConfig config = resolved_config(spec);
    if (spec.random_targets) {
        Rng target_rng(trial_seed(seed, 0x7461726765747321ULL, 0));
        spec.targets = draw_targets(*spec.random_targets, config, target_rng);
    }
    const Scene scene = build_scene(spec, config);
    const int P = static_cast<int>(scene.users.size());
    const int N = config.n_symbols;
    const int M = config.n_subcarriers;

    const ScanSchedule schedule = build_scan_schedule(config);
    const int Q = schedule.size();
    const auto sectors = classify_schedule(schedule, scene.users, config);
    const auto allocations = allocate_scan(schedule, scene.users, config);
    std::vector<PowerAllocation> allocs;
    allocs.reserve(allocations.size());
    DetectionReport report;
    for (const auto& a : allocations) {
        allocs.push_back(a.alloc);
        report.infeasible_slots += a.best_effort ? 1 : 0;
    }

    Rng rng(seed);
    const ChannelRealization channel = realize_channel(scene, config, rng);
    const SymbolStreams symbols = gen_symbols(config, P, sectors, spec.symbols, rng);

    double noise_var = config.noise_var_sense;
    if (spec.noiseless)
        noise_var = 0.0;
    else if (spec.snr_db && channel.target_count() > 0)
        noise_var = sensing_noise_variance(channel.strongest_target_amplitude(), db2lin(*spec.snr_db), config);
    report.noise_var = noise_var;

    ComplexCube y = synth_echoes(channel, schedule, allocs, symbols, scene.users, config, noise_var, rng);
    ComplexCube h = eec(y, symbols, sectors);
    ComplexCube d = subtract_static(h);

    const auto& proc = spec.processing;
    std::vector<MaskMatrix> masks;
    masks.reserve(M);
    Eigen::MatrixXd score = Eigen::MatrixXd::Zero(Q, N);
    Eigen::MatrixXd pre = artifacts ? Eigen::MatrixXd::Zero(Q, N) : Eigen::MatrixXd();
    for (int m = 0; m < M; ++m) {
        const AngleDopplerSpectrum s = adse(d.subcarrier(m), proc.window);
        const Eigen::MatrixXd power = s.magnitude.array().square();
        masks.push_back(cfar_2d(power, proc.cfar));
        score += power;
        if (artifacts)
            pre += adse(h.subcarrier(m), proc.window).magnitude.array().square().matrix();
    }
    const DetectionMask det = msjd(masks, proc.vote_threshold(M), score);
    report.clusters = static_cast<int>(det.clusters.size());

    std::vector<SlotIllumination> illum(Q);
    for (int q = 0; q < Q; ++q) {
        illum[q].angle = schedule[q];
        if (sectors[q].kind == SectorKind::C4S) {
            const int p = sectors[q].user;
            illum[q].beam_angle = scene.users[p].angle;
            illum[q].weight = std::sqrt(allocs[q].rho_c[p]);
        } else {
            illum[q].beam_angle = schedule[q];
            illum[q].weight = std::sqrt(allocs[q].rho_s);
        }
    }
    const std::vector<double> angles = det.clusters.empty()
                                           ? std::vector<double>{}
                                           : extract_angles(det.clusters, schedule, score, proc.refinement, illum, config);

    std::map<int, std::vector<int>> by_row;
    for (int c = 0; c < static_cast<int>(det.clusters.size()); ++c) {
        TargetEstimate e;
        e.cluster = c;
        e.row = det.clusters[c].peak_row;
        e.doppler_col = det.clusters[c].peak_col;
        e.angle = angles[c];
        e.velocity = bin_velocity(e.doppler_col, config);
        report.estimates.push_back(e);
        by_row[e.row].push_back(c);
    }

    const double vspan = 2.0 * config.max_unambiguous_velocity();
    for (const auto& [row, members] : by_row) {
        const Eigen::MatrixXcd rd = build_rd_matrix(d, row);
        SlotEstimate est = estimate_slot(rd, static_cast<int>(members.size()), config);
        // one-to-one: cluster Doppler column velocity against estimated pair velocities
        struct Link {
            double dist;
            int member;
            int pair;
        };
        std::vector<Link> links;
        for (int i = 0; i < static_cast<int>(members.size()); ++i) {
            const double vc = bin_velocity(report.estimates[members[i]].doppler_col, config);
            for (int j = 0; j < static_cast<int>(est.pairs.size()); ++j)
                links.push_back({wrap_velocity_distance(vc, est.pairs[j].velocity, vspan), i, j});
        }
        std::stable_sort(links.begin(), links.end(), [](const Link& a, const Link& b) { return a.dist < b.dist; });
        std::vector<bool> mu(members.size(), false), pu(est.pairs.size(), false);
        for (const auto& l : links) {
            if (mu[l.member] || pu[l.pair])
                continue;
            mu[l.member] = pu[l.pair] = true;
            TargetEstimate& e = report.estimates[members[l.member]];
            e.range = est.pairs[l.pair].range;
            e.velocity = est.pairs[l.pair].velocity;
            e.has_range_velocity = true;
        }
        if (artifacts)
            artifacts->slot_estimates.emplace_back(row, std::move(est));
    }

    report.truth = spec.targets;
    associate(report, schedule, config);

    if (artifacts) {
        artifacts->schedule = schedule;
        artifacts->allocations = allocations;
        artifacts->echoes = std::move(y);
        artifacts->eec = std::move(h);
        artifacts->dynamic = std::move(d);
        artifacts->pre_filter_power = std::move(pre);
        artifacts->score = std::move(score);
        artifacts->votes = det.votes;
        artifacts->mask = det.mask;
    }
    return report;
}

void ErrorAccumulator::add(const DetectionReport& report)
{
    for (std::size_t k = 0; k < report.truth.size(); ++k) {
        const int e = report.truth_to_estimate[k];
        if (e < 0)
            continue;
        const TargetEstimate& est = report.estimates[e];
        const TargetSpec& t = report.truth[k];
        const double da = rad2deg(est.angle - t.angle);
        sum_sq_angle_deg += da * da;
        ++angle_count;
        if (est.has_range_velocity) {
            sum_sq_range += (est.range - t.range) * (est.range - t.range);
            sum_sq_velocity += (est.velocity - t.radial_velocity) * (est.velocity - t.radial_velocity);
            ++rv_count;
        }
    }
}

double ErrorAccumulator::rmse_angle_deg() const
{
    return angle_count > 0 ? std::sqrt(sum_sq_angle_deg / angle_count) : 0.0;
}

double ErrorAccumulator::rmse_range() const
{
    return rv_count > 0 ? std::sqrt(sum_sq_range / rv_count) : 0.0;
}

double ErrorAccumulator::rmse_velocity() const
{
    return rv_count > 0 ? std::sqrt(sum_sq_velocity / rv_count) : 0.0;
}

double rmse(const std::vector<double>& estimates, const std::vector<double>& truth)
{
    if (estimates.size() != truth.size())
        throw std::invalid_argument("rmse: length mismatch");
    if (estimates.empty())
        return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i)
        acc += (estimates[i] - truth[i]) * (estimates[i] - truth[i]);
    return std::sqrt(acc / static_cast<double>(estimates.size()));
}

SweepVariable parse_sweep_variable(const std::string& name)
{
    static const std::map<std::string, SweepVariable> table{
        {"snr_db", SweepVariable::SnrDb},         {"n_subcarriers", SweepVariable::Subcarriers},
        {"n_symbols", SweepVariable::Symbols},    {"n_antennas", SweepVariable::Antennas},
        {"n_tx", SweepVariable::TxAntennas},      {"n_rx", SweepVariable::RxAntennas},
        {"sinr_db", SweepVariable::SinrDb},
    };
    const auto it = table.find(name);
    if (it == table.end())
        throw std::invalid_argument("unknown sweep variable '" + name + "'");
    return it->second;
}

std::string to_string(SweepVariable v)
{
    switch (v) {
    case SweepVariable::SnrDb: return "snr_db";
    case SweepVariable::Subcarriers: return "n_subcarriers";
    case SweepVariable::Symbols: return "n_symbols";
    case SweepVariable::Antennas: return "n_antennas";
    case SweepVariable::TxAntennas: return "n_tx";
    case SweepVariable::RxAntennas: return "n_rx";
    case SweepVariable::SinrDb: return "sinr_db";
    }
    return "unknown";
}

void ExperimentSpec::validate() const
{
    if (trials < 1)
        throw std::invalid_argument("ExperimentSpec: trials must be at least 1");
    if (values.empty())
        throw std::invalid_argument("ExperimentSpec: no sweep values");
    const bool up = values.size() < 2 || values[1] > values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (up ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1]))
            throw std::invalid_argument("ExperimentSpec: sweep values must be strictly monotone");
    }
    if (variable == SweepVariable::SinrDb && scene.users.empty())
        throw std::invalid_argument("ExperimentSpec: SINR sweeps need at least one user");
}

ScenarioSpec apply_sweep(const ScenarioSpec& base, SweepVariable variable, double value)
{
    ScenarioSpec s = base;
    const int iv = static_cast<int>(std::lround(value));
    switch (variable) {
    case SweepVariable::SnrDb: s.snr_db = value; break;
    case SweepVariable::Subcarriers: s.config.n_subcarriers = iv; break;
    case SweepVariable::Symbols: s.config.n_symbols = iv; break;
    case SweepVariable::Antennas: s.config.n_tx = iv; s.config.n_rx = iv; break;
    case SweepVariable::TxAntennas: s.config.n_tx = iv; break;
    case SweepVariable::RxAntennas: s.config.n_rx = iv; break;
    case SweepVariable::SinrDb:
        for (auto& u : s.users)
            u.sinr_min = db2lin(value);
        break;
    }
    if (variable == SweepVariable::Antennas || variable == SweepVariable::TxAntennas)
        s.config.n_slots = base.config.n_slots;  // keep explicit Q; 0 re-derives it from N_T
    return s;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn)
{
    const int workers = std::max(1, std::min(threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency()), count));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(body);
        for (auto& t : pool)
            t.join();
    }
    if (error)
        std::rethrow_exception(error);
}

namespace {

struct TrialResult {
    DetectionReport report;
    BerPoint ber;
    double seconds = 0.0;
};

MetricsPoint aggregate(double value, const std::vector<TrialResult>& trials, bool ber_mode)
{
    MetricsPoint p;
    p.value = value;
    p.trials = static_cast<int>(trials.size());
    ErrorAccumulator acc;
    for (const auto& t : trials) {
        p.runtime_s += t.seconds;
        if (ber_mode) {
            p.bits += t.ber.count.bits;
            p.bit_errors += t.ber.count.errors;
            p.infeasible_slots += t.ber.infeasible_slots;
            continue;
        }
        p.truths += static_cast<std::int64_t>(t.report.truth.size());
        for (int e : t.report.truth_to_estimate)
            p.detected += e >= 0 ? 1 : 0;
        p.false_alarms += t.report.false_alarms;
        p.infeasible_slots += t.report.infeasible_slots;
        acc.add(t.report);
    }
    p.pd = p.truths > 0 ? static_cast<double>(p.detected) / static_cast<double>(p.truths) : 0.0;
    p.rmse_angle_deg = acc.rmse_angle_deg();
    p.rmse_range = acc.rmse_range();
    p.rmse_velocity = acc.rmse_velocity();
    p.ber = p.bits > 0 ? static_cast<double>(p.bit_errors) / static_cast<double>(p.bits) : 0.0;
    return p;
}

std::vector<MetricsPoint> run_points(const ExperimentSpec& spec, int threads, std::vector<MetricsPoint>* partial)
{
    spec.validate();
    const int points = static_cast<int>(spec.values.size());
    const bool ber_mode = spec.variable == SweepVariable::SinrDb;
    std::vector<MetricsPoint> out;
    for (int pi = 0; pi < points; ++pi) {
        const ScenarioSpec scene = apply_sweep(spec.scene, spec.variable, spec.values[pi]);
        std::vector<TrialResult> results(static_cast<std::size_t>(spec.trials));
        parallel_for(spec.trials, threads, [&](int t) {
            const auto start = std::chrono::steady_clock::now();
            const std::uint64_t seed = trial_seed(spec.seed, static_cast<std::uint64_t>(pi), static_cast<std::uint64_t>(t));
            try {
                if (ber_mode)
                    results[t].ber = run_ber_point(scene.users, resolved_config(scene), spec.values[pi], seed, scene.noiseless);
                else
                    results[t].report = run_trial(scene, seed);
            } catch (const std::exception& e) {
                throw std::runtime_error("point " + std::to_string(pi) + " trial " + std::to_string(t) + ": " + e.what());
            }
            results[t].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        });
        out.push_back(aggregate(spec.values[pi], results, ber_mode));
        if (partial)
            *partial = out;
    }
    return out;
}

} // namespace

std::vector<MetricsPoint> run_sweep(const ExperimentSpec& spec, int threads)
{
    return run_points(spec, threads, nullptr);
}

std::vector<MetricsPoint> run_sweep_to_files(const ExperimentSpec& spec, int threads)
{
    std::filesystem::create_directories(spec.out_dir);
    const std::string base = (std::filesystem::path(spec.out_dir) / spec.name).string();
    std::vector<MetricsPoint> partial;
    try {
        auto points = run_points(spec, threads, &partial);
        write_metrics_csv(base + ".csv", spec, points);
        write_metrics_json(base + ".json", spec, points, "complete");
        return points;
    } catch (...) {
        write_metrics_csv(base + ".csv", spec, partial);
        write_metrics_json(base + ".json", spec, partial, "partial");
        throw;
    }
}

} // namespace isac
