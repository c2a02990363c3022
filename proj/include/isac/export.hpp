#ifndef ISAC_EXPORT_HPP
#define ISAC_EXPORT_HPP

#include "isac/harness.hpp"

#include <string>
#include <vector>

namespace isac {

inline constexpr int kMetricsSchemaVersion = 1;

/// One row per sweep point. Runtime is left out so reruns are byte-identical.
void write_metrics_csv(const std::string& path, const ExperimentSpec& spec, const std::vector<MetricsPoint>& points);
void write_metrics_json(const std::string& path, const ExperimentSpec& spec, const std::vector<MetricsPoint>& points,
                        const std::string& status);

/// slot, theta_deg, sector, rho_s, rho_c_1..P, esp, sinr_db_1..P, best_effort
void write_allocation_csv(const std::string& path, const std::vector<SlotAllocation>& allocations);

/// Matrix as a CSV grid, one line per row.
void write_matrix_csv(const std::string& path, const Eigen::Ref<const Eigen::MatrixXd>& m);

/// x, F(x) for both MUSIC spectra of a slot (two files: <base>_doppler.csv, <base>_range.csv).
void write_music_csv(const std::string& base, const SlotEstimate& estimate);

void write_ber_csv(const std::string& path, const std::vector<std::pair<int, BerPoint>>& points);

/// Little-endian header of three int32 (Q, N, M) followed by interleaved re/im float64 in
/// q-fastest, then n, then m order.
void write_cube_binary(const std::string& path, const ComplexCube& cube);
ComplexCube read_cube_binary(const std::string& path);

void write_detection_csv(const std::string& path, const DetectionReport& report);

} // namespace isac

#endif // ISAC_EXPORT_HPP
