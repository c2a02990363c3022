#include "isac/export.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace isac {

namespace {

std::ofstream open_out(const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    return f;
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

template <typename T>
void put_le(std::ostream& os, T v)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is)
{
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T)))
        throw std::runtime_error("read_cube_binary: truncated file");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

} // namespace

void write_metrics_csv(const std::string& path, const ExperimentSpec& spec, const std::vector<MetricsPoint>& points)
{
    auto f = open_out(path);
    f << to_string(spec.variable)
      << ",trials,truths,detected,pd,false_alarms,rmse_theta_deg,rmse_r_m,rmse_v_mps,bits,bit_errors,ber,infeasible_slots\n";
    for (const auto& p : points) {
        f << num(p.value) << ',' << p.trials << ',' << p.truths << ',' << p.detected << ',' << num(p.pd) << ','
          << p.false_alarms << ',' << num(p.rmse_angle_deg) << ',' << num(p.rmse_range) << ','
          << num(p.rmse_velocity) << ',' << p.bits << ',' << p.bit_errors << ',' << num(p.ber) << ','
          << p.infeasible_slots << '\n';
    }
}

void write_metrics_json(const std::string& path, const ExperimentSpec& spec, const std::vector<MetricsPoint>& points,
                        const std::string& status)
{
    nlohmann::json j;
    j["schema_version"] = kMetricsSchemaVersion;
    j["name"] = spec.name;
    j["status"] = status;
    j["sweep_variable"] = to_string(spec.variable);
    j["trials_per_point"] = spec.trials;
    j["seed"] = spec.seed;
    j["points"] = nlohmann::json::array();
    for (const auto& p : points) {
        j["points"].push_back({{"value", p.value},
                               {"trials", p.trials},
                               {"truths", p.truths},
                               {"detected", p.detected},
                               {"pd", p.pd},
                               {"false_alarms", p.false_alarms},
                               {"rmse_theta_deg", p.rmse_angle_deg},
                               {"rmse_r_m", p.rmse_range},
                               {"rmse_v_mps", p.rmse_velocity},
                               {"bits", p.bits},
                               {"bit_errors", p.bit_errors},
                               {"ber", p.ber},
                               {"infeasible_slots", p.infeasible_slots},
                               {"runtime_s", p.runtime_s}});
    }
    auto f = open_out(path);
    f << j.dump(2) << '\n';
}

void write_allocation_csv(const std::string& path, const std::vector<SlotAllocation>& allocations)
{
    auto f = open_out(path);
    const int P = allocations.empty() ? 0 : allocations.front().alloc.users();
    f << "slot,theta_deg,sector,rho_s";
    for (int p = 0; p < P; ++p)
        f << ",rho_c_" << p + 1;
    f << ",esp";
    for (int p = 0; p < P; ++p)
        f << ",sinr_db_" << p + 1;
    f << ",best_effort\n";
    for (const auto& a : allocations) {
        f << a.slot << ',' << num(rad2deg(a.angle)) << ','
          << (a.sector.kind == SectorKind::C4S ? "C4S" + std::to_string(a.sector.user + 1) : std::string("S4S")) << ','
          << num(a.alloc.rho_s);
        for (int p = 0; p < P; ++p)
            f << ',' << num(a.alloc.rho_c[p]);
        f << ',' << num(a.esp);
        for (int p = 0; p < P; ++p)
            f << ',' << num(lin2db(a.sinr[p]));
        f << ',' << (a.best_effort ? 1 : 0) << '\n';
    }
}

void write_matrix_csv(const std::string& path, const Eigen::Ref<const Eigen::MatrixXd>& m)
{
    auto f = open_out(path);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            f << (c ? "," : "") << num(m(r, c));
        f << '\n';
    }
}

void write_music_csv(const std::string& base, const SlotEstimate& estimate)
{
    auto dump = [](const std::string& path, const MusicSpectrum& s, const char* axis) {
        auto f = open_out(path);
        f << axis << ",F\n";
        for (int i = 0; i < s.values.size(); ++i)
            f << num(s.grid.at(i)) << ',' << num(s.values[i]) << '\n';
    };
    dump(base + "_doppler.csv", estimate.doppler, "velocity_mps");
    dump(base + "_range.csv", estimate.range, "range_m");
}

void write_ber_csv(const std::string& path, const std::vector<std::pair<int, BerPoint>>& points)
{
    auto f = open_out(path);
    f << "sinr_db,n_tx,ber,bits,bit_errors,infeasible_slots\n";
    for (const auto& [nt, p] : points)
        f << num(p.sinr_db) << ',' << nt << ',' << num(p.count.ber()) << ',' << p.count.bits << ','
          << p.count.errors << ',' << p.infeasible_slots << '\n';
}

void write_cube_binary(const std::string& path, const ComplexCube& cube)
{
    auto f = open_out(path);
    put_le<std::int32_t>(f, cube.slots());
    put_le<std::int32_t>(f, cube.symbols());
    put_le<std::int32_t>(f, cube.subcarriers());
    for (const auto& v : cube.data()) {
        put_le<double>(f, v.real());
        put_le<double>(f, v.imag());
    }
}

ComplexCube read_cube_binary(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "'");
    const int Q = get_le<std::int32_t>(f);
    const int N = get_le<std::int32_t>(f);
    const int M = get_le<std::int32_t>(f);
    ComplexCube cube(Q, N, M);
    for (auto& v : cube.data()) {
        const double re = get_le<double>(f);
        const double im = get_le<double>(f);
        v = {re, im};
    }
    return cube;
}

void write_detection_csv(const std::string& path, const DetectionReport& report)
{
    auto f = open_out(path);
    f << "cluster,row,doppler_col,theta_deg,range_m,velocity_mps,truth\n";
    std::vector<int> truth_of(report.estimates.size(), -1);
    for (std::size_t k = 0; k < report.truth_to_estimate.size(); ++k) {
        if (report.truth_to_estimate[k] >= 0)
            truth_of[report.truth_to_estimate[k]] = static_cast<int>(k);
    }
    for (std::size_t e = 0; e < report.estimates.size(); ++e) {
        const auto& t = report.estimates[e];
        f << t.cluster << ',' << t.row << ',' << t.doppler_col << ',' << num(rad2deg(t.angle)) << ','
          << (t.has_range_velocity ? num(t.range) : "") << ',' << num(t.velocity) << ',' << truth_of[e] << '\n';
    }
}

} // namespace isac
