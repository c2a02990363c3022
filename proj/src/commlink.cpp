#include "isac/commlink.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace isac {

BerCount equalize_and_score(const std::vector<Eigen::MatrixXcd>& rx, const std::vector<UserSpec>& users,
                            const PowerAllocation& alloc, const SymbolStreams& symbols, int q,
                            const SystemConfig& config)
{
    const int P = static_cast<int>(users.size());
    if (static_cast<int>(rx.size()) != P || static_cast<int>(symbols.comm_labels.size()) != P)
        throw std::invalid_argument("equalize_and_score: user count mismatch");
    const Modulation mod = symbols.slot_modulation.at(q);
    const int k = bits_per_symbol(mod);
    const int Q = symbols.sense.slots();
    const int N = symbols.sense.symbols();

    BerCount count;
    for (int p = 0; p < P; ++p) {
        const auto& y = rx[p];
        for (int m = 0; m < y.cols(); ++m) {
            const Complex g = effective_gain(users[p], alloc.rho_c[p], m, config);
            for (int n = 0; n < y.rows(); ++n) {
                const Complex z = std::abs(g) > 0.0 ? y(n, m) / g : Complex{};
                const int decided = decide_label(z, mod);
                const std::size_t idx = static_cast<std::size_t>(q) + static_cast<std::size_t>(Q) * (n + static_cast<std::size_t>(N) * m);
                const int sent = symbols.comm_labels[p][idx];
                count.errors += std::popcount(static_cast<unsigned>(decided ^ sent));
                count.bits += k;
            }
        }
    }
    return count;
}

double q_function(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double qam16_ber_approx(double es_n0)
{
    return 0.75 * q_function(std::sqrt(es_n0 / 5.0));
}

BerPoint run_ber_point(std::vector<UserSpec> users, const SystemConfig& config, double sinr_db, std::uint64_t seed,
                       bool noiseless)
{
    if (users.empty())
        throw std::invalid_argument("run_ber_point: no users");
    for (auto& u : users)
        u.sinr_min = db2lin(sinr_db);
    const ScanSchedule schedule = build_scan_schedule(config);
    const auto allocs = allocate_scan(schedule, users, config);

    BerPoint point;
    point.sinr_db = sinr_db;
    point.min_sinr_db = std::numeric_limits<double>::infinity();
    Rng rng(seed);
    for (int q = 0; q < schedule.size(); ++q) {
        const SlotAllocation& a = allocs[q];
        if (a.best_effort)
            ++point.infeasible_slots;
        point.min_sinr_db = std::min(point.min_sinr_db, lin2db(a.sinr.minCoeff()));
        const std::vector<SectorClass> one_slot{a.sector};
        const SymbolStreams symbols = gen_symbols(config, static_cast<int>(users.size()), one_slot, {}, rng);
        const auto rx = user_rx(users, a.alloc, symbols, 0, a.angle, config, rng, noiseless);
        point.count += equalize_and_score(rx, users, a.alloc, symbols, 0, config);
    }
    return point;
}

} // namespace isac
