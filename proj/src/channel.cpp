#include "isac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isac {

int ChannelRealization::target_count() const
{
    return static_cast<int>(std::count_if(scatterers.begin(), scatterers.end(),
                                          [](const Scatterer& s) { return s.kind == ScattererKind::Target; }));
}

double ChannelRealization::strongest_target_amplitude() const
{
    double best = 0.0;
    for (const auto& s : scatterers) {
        if (s.kind == ScattererKind::Target)
            best = std::max(best, s.amplitude);
    }
    return best;
}

double draw_rcs(double sigma0, Rng& rng)
{
    if (!(sigma0 > 0.0))
        throw std::invalid_argument("draw_rcs: mean RCS must be positive");
    std::exponential_distribution<double> dist(1.0 / sigma0);
    return dist(rng);
}

double radar_amplitude(double range, double rcs, RcsAmplitudeLaw law, const SystemConfig& config)
{
    const double lambda = config.wavelength();
    const double path = std::sqrt(lambda * lambda / (std::pow(4.0 * kPi, 3) * std::pow(range, 4)));
    return path * (law == RcsAmplitudeLaw::Linear ? rcs : std::sqrt(rcs));
}

Complex channel_coeff(const Scatterer& s, int n, int m, const SystemConfig& config)
{
    const double doppler = config.doppler_phase_step(s.velocity) * n;
    const double delay = -4.0 * kPi * config.subcarrier_frequency(m) * s.range / kSpeedOfLight;
    return std::polar(s.amplitude, doppler + delay);
}

ChannelRealization realize_channel(const Scene& scene, const SystemConfig& config, Rng& rng)
{
    const double vmax = config.max_unambiguous_velocity();
    ChannelRealization out;
    out.scatterers.reserve(scene.clutter.units.size() + scene.targets.size());
    auto rcs_of = [&](double mean) {
        return scene.fluctuation == RcsFluctuation::Swerling1 ? draw_rcs(mean, rng) : mean;
    };
    for (std::size_t i = 0; i < scene.clutter.units.size(); ++i) {
        const ClutterUnit& u = scene.clutter.units[i];
        Scatterer s;
        s.kind = ScattererKind::Clutter;
        s.angle = u.angle;
        s.range = u.range;
        s.rcs = rcs_of(u.mean_rcs);
        s.amplitude = radar_amplitude(u.range, s.rcs, scene.amplitude_law, config);
        s.source = static_cast<int>(i);
        out.scatterers.push_back(s);
    }
    for (std::size_t k = 0; k < scene.targets.size(); ++k) {
        const TargetSpec& t = scene.targets[k];
        if (std::abs(t.radial_velocity) >= vmax)
            throw std::invalid_argument("realize_channel: target velocity is Doppler-ambiguous");
        Scatterer s;
        s.kind = ScattererKind::Target;
        s.angle = t.angle;
        s.range = t.range;
        s.velocity = t.radial_velocity;
        s.rcs = rcs_of(t.mean_rcs);
        s.amplitude = radar_amplitude(t.range, s.rcs, scene.amplitude_law, config);
        s.source = static_cast<int>(k);
        out.scatterers.push_back(s);
    }
    return out;
}

} // namespace isac
