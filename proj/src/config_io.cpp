#include "isac/config_io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

namespace isac {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object())
        throw std::invalid_argument(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key))
            throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

void read_deg(const json& j, const char* key, double& out)
{
    if (j.contains(key))
        out = deg2rad(j.at(key).get<double>());
}

SystemConfig system_from_json(const json& j)
{
    check_keys(j,
               {"n_tx", "n_rx", "spacing_wavelengths", "spacing_m", "f0_hz", "delta_f_hz", "n_subcarriers",
                "n_symbols", "n_slots", "tx_power_w", "noise_var_sense_w", "noise_var_user_w", "theta_min_deg",
                "theta_max_deg", "r_min_m", "r_max_m"},
               "system");
    SystemConfig c;
    read_opt(j, "n_tx", c.n_tx);
    read_opt(j, "n_rx", c.n_rx);
    read_opt(j, "f0_hz", c.f0);
    read_opt(j, "delta_f_hz", c.delta_f);
    read_opt(j, "n_subcarriers", c.n_subcarriers);
    read_opt(j, "n_symbols", c.n_symbols);
    read_opt(j, "n_slots", c.n_slots);
    read_opt(j, "tx_power_w", c.tx_power);
    read_opt(j, "noise_var_sense_w", c.noise_var_sense);
    read_opt(j, "noise_var_user_w", c.noise_var_user);
    read_deg(j, "theta_min_deg", c.theta_min);
    read_deg(j, "theta_max_deg", c.theta_max);
    read_opt(j, "r_min_m", c.r_min);
    read_opt(j, "r_max_m", c.r_max);
    if (j.contains("spacing_m") && j.contains("spacing_wavelengths"))
        throw std::invalid_argument("system: give spacing_m or spacing_wavelengths, not both");
    if (j.contains("spacing_m"))
        c.spacing = j.at("spacing_m").get<double>();
    else if (j.contains("spacing_wavelengths"))
        c.spacing = j.at("spacing_wavelengths").get<double>() * c.wavelength();
    return c;
}

AngleRefinement parse_refinement(const std::string& s)
{
    if (s == "none")
        return AngleRefinement::None;
    if (s == "parabolic")
        return AngleRefinement::Parabolic;
    if (s == "pattern_fit")
        return AngleRefinement::PatternFit;
    throw std::invalid_argument("processing.angle_refinement: unknown value '" + s + "'");
}

DopplerWindow parse_window(const std::string& s)
{
    if (s == "rect")
        return DopplerWindow::Rectangular;
    if (s == "hann")
        return DopplerWindow::Hann;
    throw std::invalid_argument("processing.doppler_window: unknown value '" + s + "'");
}

} // namespace

ScenarioSpec scenario_from_json(const json& j)
{
    check_keys(j,
               {"system", "users", "targets", "random_targets", "clutter", "rcs_amplitude_law", "rcs_fluctuation",
                "snr_db", "noiseless", "processing", "symbols", "comment"},
               "scene");
    ScenarioSpec s;
    if (j.contains("system"))
        s.config = system_from_json(j.at("system"));

    if (j.contains("users")) {
        for (const auto& u : j.at("users")) {
            check_keys(u, {"range_m", "angle_deg", "sinr_min_db", "noise_var_w"}, "users[]");
            UserSpec user;
            user.range = u.at("range_m").get<double>();
            user.angle = deg2rad(u.at("angle_deg").get<double>());
            user.sinr_min = db2lin(u.value("sinr_min_db", 0.0));
            read_opt(u, "noise_var_w", user.noise_var);
            s.users.push_back(user);
        }
    }
    if (j.contains("targets")) {
        for (const auto& t : j.at("targets")) {
            check_keys(t, {"range_m", "angle_deg", "velocity_mps", "mean_rcs_m2"}, "targets[]");
            TargetSpec target;
            target.range = t.at("range_m").get<double>();
            target.angle = deg2rad(t.at("angle_deg").get<double>());
            target.radial_velocity = t.at("velocity_mps").get<double>();
            read_opt(t, "mean_rcs_m2", target.mean_rcs);
            s.targets.push_back(target);
        }
    }
    if (j.contains("random_targets")) {
        const auto& r = j.at("random_targets");
        check_keys(r,
                   {"count", "range_min_m", "range_max_m", "angle_margin_deg", "speed_min_mps", "speed_max_mps",
                    "mean_rcs_m2"},
                   "random_targets");
        RandomTargets g;
        read_opt(r, "count", g.count);
        read_opt(r, "range_min_m", g.range_min);
        read_opt(r, "range_max_m", g.range_max);
        read_deg(r, "angle_margin_deg", g.angle_margin);
        read_opt(r, "speed_min_mps", g.speed_min);
        read_opt(r, "speed_max_mps", g.speed_max);
        read_opt(r, "mean_rcs_m2", g.mean_rcs);
        s.random_targets = g;
    }
    if (j.contains("clutter")) {
        const auto& c = j.at("clutter");
        check_keys(c, {"enabled", "mean_rcs_m2", "margin_db"}, "clutter");
        read_opt(c, "enabled", s.clutter.enabled);
        read_opt(c, "mean_rcs_m2", s.clutter.mean_rcs);
        read_opt(c, "margin_db", s.clutter.margin_db);
    }
    if (j.contains("rcs_amplitude_law")) {
        const auto v = j.at("rcs_amplitude_law").get<std::string>();
        if (v == "linear")
            s.amplitude_law = RcsAmplitudeLaw::Linear;
        else if (v == "sqrt")
            s.amplitude_law = RcsAmplitudeLaw::Sqrt;
        else
            throw std::invalid_argument("rcs_amplitude_law: unknown value '" + v + "'");
    }
    if (j.contains("rcs_fluctuation")) {
        const auto v = j.at("rcs_fluctuation").get<std::string>();
        if (v == "swerling1")
            s.fluctuation = RcsFluctuation::Swerling1;
        else if (v == "none")
            s.fluctuation = RcsFluctuation::None;
        else
            throw std::invalid_argument("rcs_fluctuation: unknown value '" + v + "'");
    }
    if (j.contains("snr_db"))
        s.snr_db = j.at("snr_db").get<double>();
    read_opt(j, "noiseless", s.noiseless);
    if (j.contains("processing")) {
        const auto& p = j.at("processing");
        check_keys(p,
                   {"cfar_guard", "cfar_reference", "cfar_floor_db", "cfar_skip_zero_doppler", "pfa", "min_votes", "ct_fraction", "angle_refinement",
                    "doppler_window"},
                   "processing");
        read_opt(p, "cfar_guard", s.processing.cfar.guard);
        read_opt(p, "cfar_reference", s.processing.cfar.reference);
        read_opt(p, "pfa", s.processing.cfar.pfa);
        read_opt(p, "cfar_floor_db", s.processing.cfar.floor_db);
        read_opt(p, "cfar_skip_zero_doppler", s.processing.cfar.skip_zero_doppler);
        read_opt(p, "min_votes", s.processing.min_votes);
        read_opt(p, "ct_fraction", s.processing.ct_fraction);
        if (p.contains("angle_refinement"))
            s.processing.refinement = parse_refinement(p.at("angle_refinement").get<std::string>());
        if (p.contains("doppler_window"))
            s.processing.window = parse_window(p.at("doppler_window").get<std::string>());
    }
    if (j.contains("symbols")) {
        const auto& sy = j.at("symbols");
        check_keys(sy, {"comm_modulation", "qpsk_in_c4s_slots"}, "symbols");
        if (sy.contains("comm_modulation")) {
            const auto v = sy.at("comm_modulation").get<std::string>();
            if (v == "16qam")
                s.symbols.comm = Modulation::Qam16;
            else if (v == "qpsk")
                s.symbols.comm = Modulation::Qpsk;
            else
                throw std::invalid_argument("symbols.comm_modulation: unknown value '" + v + "'");
        }
        read_opt(sy, "qpsk_in_c4s_slots", s.symbols.qpsk_in_c4s_slots);
    }
    return s;
}

json read_json_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "'");
    try {
        return json::parse(f, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

ScenarioSpec load_scenario(const std::string& path)
{
    return scenario_from_json(read_json_file(path));
}

ExperimentSpec experiment_from_json(const json& j, const std::string& base_dir)
{
    check_keys(j, {"scene", "scene_file", "sweep", "trials", "seed", "out_dir", "name", "comment"}, "experiment");
    ExperimentSpec e;
    if (j.contains("scene") == j.contains("scene_file"))
        throw std::invalid_argument("experiment: give exactly one of scene or scene_file");
    if (j.contains("scene"))
        e.scene = scenario_from_json(j.at("scene"));
    else
        e.scene = load_scenario((std::filesystem::path(base_dir) / j.at("scene_file").get<std::string>()).string());
    const auto& sw = j.at("sweep");
    check_keys(sw, {"variable", "values"}, "sweep");
    e.variable = parse_sweep_variable(sw.at("variable").get<std::string>());
    e.values = sw.at("values").get<std::vector<double>>();
    read_opt(j, "trials", e.trials);
    read_opt(j, "seed", e.seed);
    read_opt(j, "out_dir", e.out_dir);
    read_opt(j, "name", e.name);
    e.validate();
    return e;
}

ExperimentSpec load_experiment(const std::string& path)
{
    const auto dir = std::filesystem::path(path).parent_path().string();
    return experiment_from_json(read_json_file(path), dir.empty() ? "." : dir);
}

void apply_profile(ScenarioSpec& spec, Profile profile, const json& source)
{
    const json sys = source.contains("system") ? source.at("system") : json::object();
    const int n = profile == Profile::Paper ? 128 : 32;
    if (!sys.contains("n_tx"))
        spec.config.n_tx = n;
    if (!sys.contains("n_rx"))
        spec.config.n_rx = n;
}

int profile_trials(Profile profile)
{
    return profile == Profile::Paper ? 1000 : 100;
}

} // namespace isac
