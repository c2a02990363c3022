#ifndef ISAC_DETECT_HPP
#define ISAC_DETECT_HPP

#include "isac/scenario.hpp"

#include <Eigen/Dense>

#include <vector>

namespace isac {

struct AngleDopplerSpectrum {
    Eigen::MatrixXcd spectrum;  // Q x N, Doppler axis centred
    Eigen::MatrixXd magnitude;  // |spectrum|
};

enum class DopplerWindow { Rectangular, Hann };

/// Row-wise N-point FFT over symbols followed by a shift putting zero Doppler in column N/2.
/// A Hann taper (periodic form, normalised to unit mean) may be applied before the FFT;
/// each row is first shifted so that the tapered DC bin equals the plain row sum.
AngleDopplerSpectrum adse(const Eigen::Ref<const Eigen::MatrixXcd>& slice,
                          DopplerWindow window = DopplerWindow::Rectangular);

/// Radial velocity of centred Doppler column b: (b - floor(N/2)) c / (2 f0 N T_s).
double bin_velocity(double b, const SystemConfig& config);

/// Nearest centred Doppler column of velocity v (wrapped into [0, N)).
int velocity_bin(double v, const SystemConfig& config);

struct CfarParams {
    int guard = 1;       // guard half-width around the cell under test (3 x 3 guard block)
    int reference = 4;   // outer half-width of the reference window (9 x 9)
    double pfa = 1e-4;
    // Cells more than floor_db below the strongest cell of the map are never
    // flagged; <= 0 disables. Keeps noiseless runs from detecting leakage tails.
    double floor_db = 60.0;
    // Leave the zero-Doppler column (nulled by the clutter filter) out of every
    // reference window and never flag it.
    bool skip_zero_doppler = false;
};

/// T = n_ref (pfa^{-1/n_ref} - 1)
double cfar_scale(int n_ref, double pfa);

/// Cell-averaging CFAR on a nonnegative square-law map. Rows (scan angle) are
/// clipped at the edges with the threshold recomputed for the reduced
/// reference count; columns (Doppler) wrap around. A cell must also clear the
/// dynamic-range floor params.floor_db below the map maximum.
MaskMatrix cfar_2d(const Eigen::Ref<const Eigen::MatrixXd>& power, const CfarParams& params);

/// Smallest vote count t with P(Binomial(M, pfa) >= t) <= pfa.
int default_min_votes(int subcarriers, double pfa);

/// ceil(fraction * M), at least 1.
int votes_for_fraction(double fraction, int subcarriers);

struct Cluster {
    std::vector<std::pair<int, int>> cells;  // (row, column)
    int peak_row = 0;
    int peak_col = 0;
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    int max_votes = 0;
};

struct DetectionMask {
    Eigen::MatrixXi votes;  // sum of per-subcarrier masks
    MaskMatrix mask;        // votes >= min_votes
    std::vector<Cluster> clusters;
};

/// Accumulates masks, thresholds the vote count and groups 8-connected cells
/// (Doppler axis circular). The peak of each cluster is taken from score.
DetectionMask msjd(const std::vector<MaskMatrix>& masks, int min_votes, const Eigen::Ref<const Eigen::MatrixXd>& score);
DetectionMask msjd(const std::vector<MaskMatrix>& masks, int min_votes);

enum class AngleRefinement { None, Parabolic, PatternFit };

/// Expected relative row amplitude of a target at theta seen in slot q, used by
/// PatternFit: |F_RX(Theta_q, theta)| * sqrt(rho_t) * |F_TX(theta, illuminating beam)|.
struct SlotIllumination {
    double angle = 0.0;      // Theta_q
    double beam_angle = 0.0; // direction of the beam whose symbol divides the echo
    double weight = 1.0;     // sqrt of that beam's power factor
};

/// score is the Q x N map accumulated over subcarriers (sum of |H^AD|^2).
/// Returns one angle estimate per cluster.
std::vector<double> extract_angles(const std::vector<Cluster>& clusters, const ScanSchedule& schedule,
                                   const Eigen::Ref<const Eigen::MatrixXd>& score, AngleRefinement mode,
                                   const std::vector<SlotIllumination>& illumination, const SystemConfig& config);

} // namespace isac

#endif // ISAC_DETECT_HPP
