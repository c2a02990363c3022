#include "isac/echoes.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

namespace {

struct Beam {
    double weight = 0.0;  // sqrt(rho P_t / N_T)
    double angle = 0.0;
    const ComplexCube* symbols = nullptr;
};

std::vector<Beam> slot_beams(const PowerAllocation& alloc, const std::vector<UserSpec>& users,
                             double slot_angle, const SymbolStreams& symbols, const SystemConfig& config)
{
    std::vector<Beam> beams;
    const double scale = config.tx_power / config.n_tx;
    for (int p = 0; p < alloc.users(); ++p) {
        if (alloc.rho_c[p] > 0.0)
            beams.push_back({std::sqrt(alloc.rho_c[p] * scale), users[p].angle, &symbols.comm[p]});
    }
    if (alloc.rho_s > 0.0)
        beams.push_back({std::sqrt(alloc.rho_s * scale), slot_angle, &symbols.sense});
    return beams;
}

Complex gaussian(Rng& rng, double sigma)
{
    std::normal_distribution<double> g(0.0, sigma);
    const double re = g(rng);
    const double im = g(rng);
    return {re, im};
}

} // namespace

SymbolStreams gen_symbols(const SystemConfig& config, int users, const std::vector<SectorClass>& sectors,
                          const SymbolOptions& options, Rng& rng)
{
    const int Q = static_cast<int>(sectors.size());
    const int N = config.n_symbols;
    const int M = config.n_subcarriers;
    if (Q < 1 || users < 0)
        throw std::invalid_argument("gen_symbols: empty schedule");

    SymbolStreams s;
    s.slot_modulation.resize(Q, options.comm);
    if (options.qpsk_in_c4s_slots) {
        for (int q = 0; q < Q; ++q) {
            if (sectors[q].kind == SectorKind::C4S)
                s.slot_modulation[q] = Modulation::Qpsk;
        }
    }

    s.sense = ComplexCube(Q, N, M);
    std::uniform_real_distribution<double> phase(-kPi, kPi);
    for (auto& v : s.sense.data())
        v = std::polar(1.0, phase(rng));

    s.comm.reserve(users);
    s.comm_labels.reserve(users);
    for (int p = 0; p < users; ++p) {
        ComplexCube cube(Q, N, M);
        std::vector<std::uint8_t> labels(cube.size());
        for (int m = 0; m < M; ++m) {
            for (int n = 0; n < N; ++n) {
                for (int q = 0; q < Q; ++q) {
                    const Modulation mod = s.slot_modulation[q];
                    std::uniform_int_distribution<int> pick(0, (1 << bits_per_symbol(mod)) - 1);
                    const int label = pick(rng);
                    const std::size_t idx = static_cast<std::size_t>(q) + static_cast<std::size_t>(Q) * (n + static_cast<std::size_t>(N) * m);
                    labels[idx] = static_cast<std::uint8_t>(label);
                    cube(q, n, m) = map_label(label, mod);
                }
            }
        }
        s.comm.push_back(std::move(cube));
        s.comm_labels.push_back(std::move(labels));
    }
    return s;
}

ComplexCube synth_echoes(const ChannelRealization& channel, const ScanSchedule& schedule,
                         const std::vector<PowerAllocation>& allocs, const SymbolStreams& symbols,
                         const std::vector<UserSpec>& users, const SystemConfig& config, double noise_var,
                         Rng& rng)
{
    const int Q = schedule.size();
    const int N = config.n_symbols;
    const int M = config.n_subcarriers;
    if (static_cast<int>(allocs.size()) != Q || symbols.sense.slots() != Q || symbols.sense.symbols() != N ||
        symbols.sense.subcarriers() != M || symbols.comm.size() != users.size())
        throw std::invalid_argument("synth_echoes: inconsistent dimensions");

    std::vector<const Scatterer*> clutter;
    std::vector<const Scatterer*> targets;
    for (const auto& s : channel.scatterers)
        (s.kind == ScattererKind::Clutter ? clutter : targets).push_back(&s);
    const int I = static_cast<int>(clutter.size());
    const int K = static_cast<int>(targets.size());

    // Range phase e^{-j 4 pi f_m r / c} = e^{-j 4 pi f0 r / c} z^m with z = e^{-j 4 pi delta_f r / c}.
    Eigen::ArrayXcd clutter_base(I), clutter_step(I);
    for (int i = 0; i < I; ++i) {
        clutter_base[i] = std::polar(1.0, -4.0 * kPi * config.f0 * clutter[i]->range / kSpeedOfLight);
        clutter_step[i] = std::polar(1.0, -4.0 * kPi * config.delta_f * clutter[i]->range / kSpeedOfLight);
    }
    Eigen::MatrixXcd target_doppler(N, K);
    Eigen::MatrixXcd target_range(K, M);
    for (int k = 0; k < K; ++k) {
        for (int n = 0; n < N; ++n)
            target_doppler(n, k) = std::polar(1.0, config.doppler_phase_step(targets[k]->velocity) * n);
        Scatterer still = *targets[k];
        still.velocity = 0.0;
        still.amplitude = 1.0;
        for (int m = 0; m < M; ++m)
            target_range(k, m) = channel_coeff(still, 0, m, config);
    }

    ComplexCube y(Q, N, M);
    constexpr int kResync = 32;
    for (int q = 0; q < Q; ++q) {
        const double theta_q = schedule[q];
        const auto beams = slot_beams(allocs[q], users, theta_q, symbols, config);
        const int B = static_cast<int>(beams.size());
        if (B == 0)
            continue;
        const double rx_norm = 1.0 / std::sqrt(static_cast<double>(config.n_rx));

        // Clutter: C(m, b) = sum_i amp_i g_rx,i g_tx,i,b e^{-j 4 pi f_m r_i / c}.
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(M, B);
        if (I > 0) {
            Eigen::ArrayXXcd coupling(I, B);
            for (int i = 0; i < I; ++i) {
                const Scatterer& s = *clutter[i];
                const Complex grx = array_factor(theta_q, s.angle, config.n_rx, config) * rx_norm;
                for (int b = 0; b < B; ++b)
                    coupling(i, b) = s.amplitude * grx * beams[b].weight *
                                     array_factor(s.angle, beams[b].angle, config.n_tx, config);
            }
            Eigen::ArrayXcd z_pow = clutter_base;
            for (int m = 0; m < M; ++m) {
                if (m % kResync == 0 && m > 0) {
                    for (int i = 0; i < I; ++i)
                        z_pow[i] = clutter_base[i] * std::pow(clutter_step[i], m);
                }
                C.row(m) = (coupling.colwise() * z_pow).colwise().sum().matrix();
                z_pow *= clutter_step;
            }
        }

        // Targets: T_b(n, m) = sum_k amp_k g_rx,k g_tx,k,b D_k(n) R_k(m).
        std::vector<Eigen::MatrixXcd> T(B);
        if (K > 0) {
            Eigen::MatrixXcd coupling(K, B);
            for (int k = 0; k < K; ++k) {
                const Scatterer& s = *targets[k];
                const Complex grx = array_factor(theta_q, s.angle, config.n_rx, config) * rx_norm;
                for (int b = 0; b < B; ++b)
                    coupling(k, b) = s.amplitude * grx * beams[b].weight *
                                     array_factor(s.angle, beams[b].angle, config.n_tx, config);
            }
            for (int b = 0; b < B; ++b)
                T[b] = target_doppler * coupling.col(b).asDiagonal() * target_range;
        }

        for (int m = 0; m < M; ++m) {
            for (int n = 0; n < N; ++n) {
                Complex acc{};
                for (int b = 0; b < B; ++b) {
                    Complex h = C(m, b);
                    if (K > 0)
                        h += T[b](n, m);
                    acc += (*beams[b].symbols)(q, n, m) * h;
                }
                y(q, n, m) = acc;
            }
        }
    }

    if (noise_var > 0.0) {
        const double sigma = std::sqrt(noise_var / 2.0);
        for (auto& v : y.data())
            v += gaussian(rng, sigma);
    }
    return y;
}

ComplexCube eec(const ComplexCube& echoes, const SymbolStreams& symbols, const std::vector<SectorClass>& sectors)
{
    const int Q = echoes.slots();
    if (static_cast<int>(sectors.size()) != Q || !echoes.same_shape(symbols.sense))
        throw std::invalid_argument("eec: inconsistent dimensions");
    ComplexCube out(Q, echoes.symbols(), echoes.subcarriers());
    for (int q = 0; q < Q; ++q) {
        const ComplexCube* divisor = &symbols.sense;
        if (sectors[q].kind == SectorKind::C4S) {
            const int p = sectors[q].user;
            if (p < 0 || p >= static_cast<int>(symbols.comm.size()))
                throw std::invalid_argument("eec: C4S slot without a serving user stream");
            divisor = &symbols.comm[p];
        }
        for (int m = 0; m < echoes.subcarriers(); ++m) {
            for (int n = 0; n < echoes.symbols(); ++n) {
                const Complex s = (*divisor)(q, n, m);
                if (std::abs(s) < 1e-6)
                    throw std::runtime_error("eec: degenerate divisor symbol");
                out(q, n, m) = echoes(q, n, m) / s;
            }
        }
    }
    return out;
}

double sensing_noise_variance(double alpha_ref, double snr_linear, const SystemConfig& config)
{
    if (!(snr_linear > 0.0))
        throw std::invalid_argument("sensing_noise_variance: SNR must be positive");
    return alpha_ref * alpha_ref * config.tx_power * config.n_tx * config.n_rx / snr_linear;
}

Complex effective_gain(const UserSpec& user, double rho_c, int m, const SystemConfig& config)
{
    const double phase = 2.0 * kPi * config.subcarrier_frequency(m) * user.range / kSpeedOfLight;
    return std::polar(user.path_gain(config) * std::sqrt(rho_c * config.tx_power * config.n_tx), phase);
}

std::vector<Eigen::MatrixXcd> user_rx(const std::vector<UserSpec>& users, const PowerAllocation& alloc,
                                      const SymbolStreams& symbols, int q, double slot_angle,
                                      const SystemConfig& config, Rng& rng, bool noiseless)
{
    const int N = config.n_symbols;
    const int M = config.n_subcarriers;
    const int P = static_cast<int>(users.size());
    if (alloc.users() != P || static_cast<int>(symbols.comm.size()) != P)
        throw std::invalid_argument("user_rx: allocation or stream count mismatch");
    const double scale = config.tx_power / config.n_tx;

    std::vector<Eigen::MatrixXcd> out;
    out.reserve(P);
    for (int ps = 0; ps < P; ++ps) {
        const UserSpec& u = users[ps];
        std::vector<Complex> coupling(P);
        for (int p = 0; p < P; ++p)
            coupling[p] = std::sqrt(alloc.rho_c[p] * scale) * array_factor(u.angle, users[p].angle, config.n_tx, config);
        const Complex sense_coupling =
            std::sqrt(alloc.rho_s * scale) * array_factor(u.angle, slot_angle, config.n_tx, config);
        const double sigma = std::sqrt(u.noise(config) / 2.0);

        Eigen::MatrixXcd y(N, M);
        for (int m = 0; m < M; ++m) {
            const Complex gp = std::polar(u.path_gain(config),
                                          2.0 * kPi * config.subcarrier_frequency(m) * u.range / kSpeedOfLight);
            for (int n = 0; n < N; ++n) {
                Complex acc = sense_coupling * symbols.sense(q, n, m);
                for (int p = 0; p < P; ++p)
                    acc += coupling[p] * symbols.comm[p](q, n, m);
                y(n, m) = gp * acc;
            }
        }
        if (!noiseless) {
            for (int m = 0; m < M; ++m)
                for (int n = 0; n < N; ++n)
                    y(n, m) += gaussian(rng, sigma);
        }
        out.push_back(std::move(y));
    }
    return out;
}

} // namespace isac
