#include "isac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace isac {

namespace {

int cells_covering(double extent, double step)
{
    return static_cast<int>(std::ceil(extent / step - 1e-9));
}

} // namespace

int SystemConfig::slot_count() const
{
    if (n_slots > 0)
        return n_slots;
    const double span = std::sin(theta_max) - std::sin(theta_min);
    return std::max(2, cells_covering(span, sin_resolution()) + 1);
}

void SystemConfig::validate() const
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("SystemConfig: " + what); };
    if (n_tx < 1 || n_rx < 1)
        fail("antenna counts must be positive");
    if (!(f0 > 0.0) || !(delta_f > 0.0))
        fail("f0 and delta_f must be positive");
    if (!(spacing > 0.0))
        fail("element spacing must be positive");
    if (spacing > wavelength() / 2.0 * (1.0 + 1e-12))
        fail("element spacing exceeds lambda/2");
    if (n_subcarriers < 2)
        fail("M must be at least 2");
    if (n_symbols < 2)
        fail("N must be at least 2");
    if (n_slots != 0 && n_slots < 2)
        fail("Q must be at least 2");
    if (!(theta_min < theta_max))
        fail("theta_min must be below theta_max");
    if (std::abs(theta_min) >= kPi / 2 || std::abs(theta_max) >= kPi / 2)
        fail("sector bounds must lie inside (-90, 90) degrees");
    if (!(tx_power > 0.0) || !(noise_var_sense > 0.0) || !(noise_var_user > 0.0))
        fail("powers must be positive");
    if (!(r_min >= 0.0) || !(r_min < r_max))
        fail("range bounds are degenerate");
}

SystemConfig with_default_spacing(SystemConfig config)
{
    if (config.spacing <= 0.0)
        config.spacing = config.wavelength() / 2.0;
    return config;
}

int ScanSchedule::nearest_slot(double theta) const
{
    if (angles.size() == 0)
        throw std::invalid_argument("ScanSchedule: empty");
    const double s = std::sin(theta);
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int q = 0; q < size(); ++q) {
        const double dist = std::abs(std::sin(angles[q]) - s);
        if (dist < best_dist) {
            best_dist = dist;
            best = q;
        }
    }
    return best;
}

ScanSchedule build_scan_schedule(const SystemConfig& config)
{
    const int Q = config.slot_count();
    if (Q < 2)
        throw std::invalid_argument("build_scan_schedule: Q must be at least 2");
    const double s0 = std::sin(config.theta_min);
    const double s1 = std::sin(config.theta_max);
    ScanSchedule schedule;
    schedule.angles.resize(Q);
    for (int q = 0; q < Q; ++q)
        schedule.angles[q] = std::asin(s0 + q * (s1 - s0) / (Q - 1));
    schedule.angles[0] = config.theta_min;
    schedule.angles[Q - 1] = config.theta_max;
    return schedule;
}

ClutterMap build_clutter_map(const SystemConfig& config, double mean_rcs)
{
    if (!(mean_rcs > 0.0))
        throw std::invalid_argument("build_clutter_map: mean RCS must be positive");
    const double dr = config.range_resolution();
    const double ds = config.sin_resolution();
    const double r_extent = config.r_max - config.r_min;
    const double s_min = std::sin(config.theta_min);
    const double s_extent = std::sin(config.theta_max) - s_min;
    if (!(r_extent > 0.0) || !(s_extent > 0.0))
        throw std::invalid_argument("build_clutter_map: empty area");

    ClutterMap map;
    map.range_cells = cells_covering(r_extent, dr);
    map.angle_cells = cells_covering(s_extent, ds);
    map.range_step = dr;
    map.sin_step = ds;
    map.units.reserve(static_cast<std::size_t>(map.range_cells) * map.angle_cells);
    for (int a = 0; a < map.angle_cells; ++a) {
        const double s = std::min(s_min + (a + 0.5) * ds, std::sin(config.theta_max));
        const double theta = std::asin(s);
        for (int i = 0; i < map.range_cells; ++i) {
            const double r = std::min(config.r_min + (i + 0.5) * dr, config.r_max);
            map.units.push_back({r, theta, mean_rcs});
        }
    }
    return map;
}

double clutter_rcs_for_margin(const ClutterMap& grid, const std::vector<TargetSpec>& targets,
                              double margin_db, RcsAmplitudeLaw law)
{
    if (grid.units.empty())
        throw std::invalid_argument("clutter_rcs_for_margin: empty clutter grid");
    if (targets.empty())
        return 1.0;
    // Echo power per unit scales as rcs^2 / r^4 (linear law) or rcs / r^4 (sqrt law).
    double target_peak = 0.0;
    for (const auto& t : targets) {
        const double rcs_term = law == RcsAmplitudeLaw::Linear ? t.mean_rcs * t.mean_rcs : t.mean_rcs;
        target_peak = std::max(target_peak, rcs_term / std::pow(t.range, 4));
    }
    double inv_r4 = 0.0;
    for (const auto& u : grid.units)
        inv_r4 += 1.0 / std::pow(u.range, 4);
    const double rcs_term = db2lin(margin_db) * target_peak / inv_r4;
    return law == RcsAmplitudeLaw::Linear ? std::sqrt(rcs_term) : rcs_term;
}

double half_power_beamwidth(double angle, const SystemConfig& config)
{
    return 0.88 * config.wavelength() / (config.n_tx * config.spacing * std::cos(angle));
}

std::pair<double, double> c4s_sector(const UserSpec& user, const SystemConfig& config)
{
    const double half = half_power_beamwidth(user.angle, config) / 2.0;
    return {user.angle - half, user.angle + half};
}

void check_sectors_disjoint(const std::vector<UserSpec>& users, const SystemConfig& config)
{
    for (std::size_t a = 0; a < users.size(); ++a) {
        const auto sa = c4s_sector(users[a], config);
        for (std::size_t b = a + 1; b < users.size(); ++b) {
            const auto sb = c4s_sector(users[b], config);
            if (sa.first <= sb.second && sb.first <= sa.second)
                throw std::invalid_argument("classify_sector: protective sectors of users " +
                                            std::to_string(a) + " and " + std::to_string(b) +
                                            " overlap");
        }
    }
}

SectorClass classify_sector(double theta, const std::vector<UserSpec>& users,
                            const SystemConfig& config)
{
    check_sectors_disjoint(users, config);
    for (std::size_t p = 0; p < users.size(); ++p) {
        const auto [lo, hi] = c4s_sector(users[p], config);
        if (theta >= lo && theta <= hi)
            return {SectorKind::C4S, static_cast<int>(p)};
    }
    return {};
}

std::vector<SectorClass> classify_schedule(const ScanSchedule& schedule,
                                           const std::vector<UserSpec>& users,
                                           const SystemConfig& config)
{
    check_sectors_disjoint(users, config);
    std::vector<SectorClass> out(static_cast<std::size_t>(schedule.size()));
    for (int q = 0; q < schedule.size(); ++q) {
        for (std::size_t p = 0; p < users.size(); ++p) {
            const auto [lo, hi] = c4s_sector(users[p], config);
            if (schedule[q] >= lo && schedule[q] <= hi) {
                out[q] = {SectorKind::C4S, static_cast<int>(p)};
                break;
            }
        }
    }
    return out;
}

} // namespace isac
