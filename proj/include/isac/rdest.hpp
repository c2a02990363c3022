#ifndef ISAC_RDEST_HPP
#define ISAC_RDEST_HPP

#include "isac/scenario.hpp"

#include <Eigen/Dense>

#include <vector>

namespace isac {

/// N x M slice [n, m] = c[q, n, m] of the filtered cube.
Eigen::MatrixXcd build_rd_matrix(const ComplexCube& dynamic_eec, int q);

enum class SubspaceSide { Doppler, Range };

struct SubspaceDecomposition {
    Eigen::VectorXd eigenvalues;   // descending
    Eigen::MatrixXcd eigenvectors; // column k pairs with eigenvalues[k]
    int order = 0;                 // MDL estimate on this side
    int snapshots = 0;
    int effective_dim = 0;         // eigenvalues entering MDL
};

/// Wax-Kailath MDL over the leading effective_dim eigenvalues (descending input).
int mdl_order(const Eigen::Ref<const Eigen::VectorXd>& eigenvalues, int snapshots, int effective_dim);

/// Doppler side: (1/M) H H^H with M snapshots. Range side: (1/N) H^T conj(H) with N snapshots.
/// The symbol-mean removal leaves at most N - 1 independent directions, which bounds the
/// eigenvalues used by MDL on both sides.
SubspaceDecomposition subspace(const Eigen::Ref<const Eigen::MatrixXcd>& rd, SubspaceSide side);

/// k_D(v)[n] = e^{j 4 pi f0 v T_s n / c}
Eigen::VectorXcd doppler_steering(double v, const SystemConfig& config);
/// k_R(r)[m] = e^{-j 4 pi r delta_f m / c}
Eigen::VectorXcd range_steering(double r, const SystemConfig& config);

struct MusicGrid {
    double start = 0.0;
    double step = 0.0;
    int points = 0;

    double at(double k) const { return start + step * k; }
};

/// Range grid over [0, c / (2 delta_f)) and velocity grid over [-v_max, v_max), both at
/// one tenth of the resolution cell.
MusicGrid range_grid(const SystemConfig& config);
MusicGrid velocity_grid(const SystemConfig& config);

struct MusicSpectrum {
    MusicGrid grid;
    Eigen::VectorXd values;        // F on the grid
    std::vector<double> peaks;     // refined locations, highest first
    std::vector<double> heights;
};

/// F(x) = 1 / ||U_N^H k(x)||^2 with the noise subspace taken as every eigenvector beyond
/// the first `order`. On the Doppler side the steering vector is projected onto the
/// zero-mean subspace, matching the clutter filter applied to the data.
MusicSpectrum music_spectrum(const SubspaceDecomposition& decomp, SubspaceSide side, int order,
                             const MusicGrid& grid, const SystemConfig& config);

/// Evaluates F at an arbitrary point (used for refinement and tests).
double music_value(const SubspaceDecomposition& decomp, SubspaceSide side, int order, double x,
                   const SystemConfig& config);

struct RangeVelocity {
    double range = 0.0;
    double velocity = 0.0;
    double score = 0.0;
};

/// |k_D^H(v) H k_R^*(r)|
double matching_score(const Eigen::Ref<const Eigen::MatrixXcd>& rd, double range, double velocity,
                      const SystemConfig& config);

/// Greedy one-to-one assignment by descending matching score.
std::vector<RangeVelocity> match_pairs(const Eigen::Ref<const Eigen::MatrixXcd>& rd, const std::vector<double>& ranges,
                                       const std::vector<double>& velocities, const SystemConfig& config);

struct SlotEstimate {
    int order_doppler = 0;
    int order_range = 0;
    int order_used = 0;
    std::vector<RangeVelocity> pairs;
    MusicSpectrum doppler;
    MusicSpectrum range;
};

/// Full per-slot chain. min_order raises the model order when detection found
/// more targets in the slot than MDL reports.
SlotEstimate estimate_slot(const Eigen::Ref<const Eigen::MatrixXcd>& rd, int min_order, const SystemConfig& config);

} // namespace isac

#endif // ISAC_RDEST_HPP
