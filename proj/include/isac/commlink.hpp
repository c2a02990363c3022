#ifndef ISAC_COMMLINK_HPP
#define ISAC_COMMLINK_HPP

#include "isac/echoes.hpp"
#include "isac/modulation.hpp"
#include "isac/powalloc.hpp"

#include <cstdint>
#include <vector>

namespace isac {

struct BerCount {
    std::int64_t bits = 0;
    std::int64_t errors = 0;

    double ber() const { return bits > 0 ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
    BerCount& operator+=(const BerCount& o)
    {
        bits += o.bits;
        errors += o.errors;
        return *this;
    }
};

/// Single-tap equalisation by the known effective-reception coefficient, minimum-distance
/// decisions and bit-error counting against the transmitted labels of slot q.
BerCount equalize_and_score(const std::vector<Eigen::MatrixXcd>& rx, const std::vector<UserSpec>& users,
                            const PowerAllocation& alloc, const SymbolStreams& symbols, int q,
                            const SystemConfig& config);

/// (3/4) Q(sqrt(Es / (5 N0))), the nearest-neighbour Gray 16-QAM approximation.
double qam16_ber_approx(double es_n0);

/// Gaussian tail probability.
double q_function(double x);

struct BerPoint {
    double sinr_db = 0.0;
    BerCount count;
    int infeasible_slots = 0;
    double min_sinr_db = 0.0;  // smallest per-user SINR over the scan under the allocation
};

/// Runs one point of a BER-versus-SINR curve: every user's requirement is set to sinr_db,
/// each slot of the scan is allocated, and each slot carries one fresh N x M block of
/// symbols through the user links. With noiseless set the user noise is omitted.
BerPoint run_ber_point(std::vector<UserSpec> users, const SystemConfig& config, double sinr_db,
                       std::uint64_t seed, bool noiseless = false);

} // namespace isac

#endif // ISAC_COMMLINK_HPP
