#ifndef ISAC_SCENARIO_HPP
#define ISAC_SCENARIO_HPP

#include "isac/types.hpp"

#include <optional>
#include <vector>

namespace isac {

/// Physical constants and array / waveform dimensions of the base station.
/// Angles are radians, distances meters, powers watts, everything linear.
struct SystemConfig {
    int n_tx = 32;
    int n_rx = 32;
    double spacing = 0.0;        // element spacing d [m]; must satisfy d <= lambda/2
    double f0 = 220e9;           // lowest carrier [Hz]
    double delta_f = 500e3;      // subcarrier spacing [Hz]
    int n_subcarriers = 128;     // M
    int n_symbols = 64;          // N
    int n_slots = 0;             // Q; 0 selects one slot per angular resolution cell
    double tx_power = 1.0;       // P_t
    double noise_var_sense = 1.0;
    double noise_var_user = 1e-11;
    double theta_min = deg2rad(-60.0);
    double theta_max = deg2rad(60.0);
    double r_min = 20.0;
    double r_max = 250.0;

    double wavelength() const { return kSpeedOfLight / f0; }
    double symbol_period() const { return 1.0 / delta_f; }
    double subcarrier_frequency(int m) const { return f0 + m * delta_f; }
    double bandwidth() const { return (n_subcarriers - 1) * delta_f; }

    /// c / (2 (M-1) delta_f)
    double range_resolution() const { return kSpeedOfLight / (2.0 * bandwidth()); }
    /// c / (2 f0 N T_s)
    double velocity_resolution() const
    {
        return kSpeedOfLight / (2.0 * f0 * n_symbols * symbol_period());
    }
    /// Resolution cell in sin(theta); approximately 2 / N_T radians at broadside.
    double sin_resolution() const { return 2.0 / n_tx; }
    double max_unambiguous_range() const { return kSpeedOfLight / (2.0 * delta_f); }
    double max_unambiguous_velocity() const
    {
        return kSpeedOfLight / (4.0 * f0 * symbol_period());
    }
    /// Per-symbol Doppler phase increment 4 pi f0 v T_s / c.
    double doppler_phase_step(double velocity) const
    {
        return 4.0 * kPi * f0 * velocity * symbol_period() / kSpeedOfLight;
    }

    int slot_count() const;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/// Returns a config with spacing = lambda/2 when spacing was left at zero.
SystemConfig with_default_spacing(SystemConfig config);

struct UserSpec {
    double range = 0.0;       // R_p [m]
    double angle = 0.0;       // vartheta_p [rad]
    double sinr_min = 1.0;    // epsilon_p, linear
    double noise_var = 0.0;   // sigma_{c,p}^2; zero means SystemConfig::noise_var_user

    /// sqrt(lambda^2 / (4 pi R_p)^2)
    double path_gain(const SystemConfig& config) const
    {
        return config.wavelength() / (4.0 * kPi * range);
    }
    double noise(const SystemConfig& config) const
    {
        return noise_var > 0.0 ? noise_var : config.noise_var_user;
    }
};

struct TargetSpec {
    double range = 0.0;
    double angle = 0.0;
    double radial_velocity = 0.0;
    double mean_rcs = 1.0;
};

struct ClutterUnit {
    double range = 0.0;
    double angle = 0.0;
    double mean_rcs = 1.0;
};

struct ClutterMap {
    std::vector<ClutterUnit> units;
    int range_cells = 0;
    int angle_cells = 0;
    double range_step = 0.0;
    double sin_step = 0.0;
};

enum class RcsAmplitudeLaw {
    Linear,  // amplitude proportional to sigma (as written for the echo channel)
    Sqrt,    // classical radar equation, amplitude proportional to sqrt(sigma)
};

enum class RcsFluctuation {
    Swerling1,
    None,
};

struct Scene {
    std::vector<UserSpec> users;
    std::vector<TargetSpec> targets;
    ClutterMap clutter;
    RcsAmplitudeLaw amplitude_law = RcsAmplitudeLaw::Linear;
    RcsFluctuation fluctuation = RcsFluctuation::Swerling1;
};

struct ScanSchedule {
    Eigen::VectorXd angles;

    int size() const { return static_cast<int>(angles.size()); }
    double operator[](int q) const { return angles[q]; }
    /// Index of the slot whose sin(Theta_q) is closest to sin(theta).
    int nearest_slot(double theta) const;
};

/// Theta_q = asin(sin theta_min + q (sin theta_max - sin theta_min) / (Q - 1)), q = 0..Q-1.
ScanSchedule build_scan_schedule(const SystemConfig& config);

/// Clutter units on a range x sin(theta) grid with cell sizes delta_r and 2/N_T.
ClutterMap build_clutter_map(const SystemConfig& config, double mean_rcs);

/// Per-unit mean RCS such that the total clutter echo power exceeds the
/// strongest target echo power by margin_db (both at mean RCS).
double clutter_rcs_for_margin(const ClutterMap& grid, const std::vector<TargetSpec>& targets,
                              double margin_db, RcsAmplitudeLaw law);

enum class SectorKind { S4S, C4S };

struct SectorClass {
    SectorKind kind = SectorKind::S4S;
    int user = -1;  // serving user for C4S

    bool operator==(const SectorClass&) const = default;
};

/// 0.88 lambda / (N_T d cos vartheta)
double half_power_beamwidth(double angle, const SystemConfig& config);

/// Closed interval [vartheta - bw/2, vartheta + bw/2].
std::pair<double, double> c4s_sector(const UserSpec& user, const SystemConfig& config);

/// Throws std::invalid_argument when two users' protective sectors overlap.
void check_sectors_disjoint(const std::vector<UserSpec>& users, const SystemConfig& config);

SectorClass classify_sector(double theta, const std::vector<UserSpec>& users,
                            const SystemConfig& config);

std::vector<SectorClass> classify_schedule(const ScanSchedule& schedule,
                                           const std::vector<UserSpec>& users,
                                           const SystemConfig& config);

} // namespace isac

#endif // ISAC_SCENARIO_HPP
