#ifndef ISAC_ECHOES_HPP
#define ISAC_ECHOES_HPP

#include "isac/arrayfield.hpp"
#include "isac/channel.hpp"
#include "isac/modulation.hpp"
#include "isac/scenario.hpp"

#include <cstdint>
#include <vector>

namespace isac {

struct SymbolOptions {
    Modulation comm = Modulation::Qam16;
    bool qpsk_in_c4s_slots = false;  // constant-modulus divisor in C4S slots
};

/// Transmitted symbols for the whole scan, each cube Q x N x M.
struct SymbolStreams {
    std::vector<ComplexCube> comm;                       // per user
    std::vector<std::vector<std::uint8_t>> comm_labels;  // per user, indexed like the cube storage
    std::vector<Modulation> slot_modulation;             // per slot
    ComplexCube sense;                                   // unit modulus, uniform random phase
};

SymbolStreams gen_symbols(const SystemConfig& config, int users, const std::vector<SectorClass>& sectors,
                          const SymbolOptions& options, Rng& rng);

/// Echo cube y[q,n,m] = w_RX^H H x + noise. noise_var is the per-sample variance of the
/// circular Gaussian noise; zero disables noise. Works in factorised form: only
/// per-scatterer beam couplings and per-(n,m) scalar phases are formed.
ComplexCube synth_echoes(const ChannelRealization& channel, const ScanSchedule& schedule,
                         const std::vector<PowerAllocation>& allocs, const SymbolStreams& symbols,
                         const std::vector<UserSpec>& users, const SystemConfig& config, double noise_var,
                         Rng& rng);

/// Divides every echo by the known symbol illuminating it: the sensing symbol in S4S
/// slots, the serving user's communication symbol in C4S slots.
ComplexCube eec(const ComplexCube& echoes, const SymbolStreams& symbols, const std::vector<SectorClass>& sectors);

/// Per-sample noise variance giving the requested sensing SNR, where
/// SNR = |alpha_ref|^2 P_t N_T N_R / noise_var.
double sensing_noise_variance(double alpha_ref, double snr_linear, const SystemConfig& config);

/// Received samples of every user in slot q, one N x M matrix per user. When
/// noiseless is set the additive user noise is omitted.
std::vector<Eigen::MatrixXcd> user_rx(const std::vector<UserSpec>& users, const PowerAllocation& alloc,
                                      const SymbolStreams& symbols, int q, double slot_angle,
                                      const SystemConfig& config, Rng& rng, bool noiseless = false);

/// Known effective-reception coefficient gamma' sqrt(rho P_t N_T) of user p on subcarrier m.
Complex effective_gain(const UserSpec& user, double rho_c, int m, const SystemConfig& config);

} // namespace isac

#endif // ISAC_ECHOES_HPP
