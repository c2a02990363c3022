#ifndef ISAC_CHANNEL_HPP
#define ISAC_CHANNEL_HPP

#include "isac/scenario.hpp"

#include <random>
#include <vector>

namespace isac {

using Rng = std::mt19937_64;

enum class ScattererKind { Clutter, Target };

struct Scatterer {
    ScattererKind kind = ScattererKind::Clutter;
    double amplitude = 0.0;  // |alpha_k| or |beta_i|
    double angle = 0.0;
    double range = 0.0;
    double velocity = 0.0;   // exactly zero for clutter
    double rcs = 0.0;        // drawn RCS of this trial
    int source = -1;         // index into Scene::targets or clutter units
};

struct ChannelRealization {
    std::vector<Scatterer> scatterers;

    int target_count() const;
    /// Amplitude of the strongest target, or 0 when there are none.
    double strongest_target_amplitude() const;
};

/// One exponential draw with mean sigma0 (Swerling I).
double draw_rcs(double sigma0, Rng& rng);

/// sqrt(lambda^2 / ((4 pi)^3 r^4)) times rcs (linear law) or sqrt(rcs).
double radar_amplitude(double range, double rcs, RcsAmplitudeLaw law, const SystemConfig& config);

/// amplitude * e^{j 4 pi f0 v n T_s / c} * e^{-j 4 pi f_m r / c}; the spatial part
/// a_RX(theta) a_TX^H(theta) is contracted separately with the beamformers.
Complex channel_coeff(const Scatterer& s, int n, int m, const SystemConfig& config);

ChannelRealization realize_channel(const Scene& scene, const SystemConfig& config, Rng& rng);

} // namespace isac

#endif // ISAC_CHANNEL_HPP
