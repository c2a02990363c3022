#include "isac/rdest.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace isac {

Eigen::MatrixXcd build_rd_matrix(const ComplexCube& dynamic_eec, int q)
{
    if (q < 0 || q >= dynamic_eec.slots())
        throw std::invalid_argument("build_rd_matrix: slot out of range");
    Eigen::MatrixXcd rd(dynamic_eec.symbols(), dynamic_eec.subcarriers());
    for (int m = 0; m < dynamic_eec.subcarriers(); ++m)
        for (int n = 0; n < dynamic_eec.symbols(); ++n)
            rd(n, m) = dynamic_eec(q, n, m);
    return rd;
}

int mdl_order(const Eigen::Ref<const Eigen::VectorXd>& eigenvalues, int snapshots, int effective_dim)
{
    const int p = std::min<int>(effective_dim, static_cast<int>(eigenvalues.size()));
    if (p < 2 || snapshots < 1)
        return 0;
    const double top = eigenvalues[0];
    if (!(top > 0.0))
        return 0;
    const double floor = 1e-12 * top;
    std::vector<double> lam(p);
    for (int i = 0; i < p; ++i)
        lam[i] = std::max(eigenvalues[i], floor);

    const double L = snapshots;
    int best_k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < p; ++k) {
        const int tail = p - k;
        double log_sum = 0.0, sum = 0.0;
        for (int i = k; i < p; ++i) {
            log_sum += std::log(lam[i]);
            sum += lam[i];
        }
        const double log_ratio = log_sum / tail - std::log(sum / tail);
        const double mdl = -L * tail * log_ratio + 0.5 * k * (2.0 * p - k) * std::log(L);
        if (mdl < best) {
            best = mdl;
            best_k = k;
        }
    }
    return best_k;
}

SubspaceDecomposition subspace(const Eigen::Ref<const Eigen::MatrixXcd>& rd, SubspaceSide side)
{
    const int N = static_cast<int>(rd.rows());
    const int M = static_cast<int>(rd.cols());
    if (N < 2 || M < 2)
        throw std::invalid_argument("subspace: matrix must be at least 2 x 2");

    Eigen::MatrixXcd R;
    SubspaceDecomposition d;
    if (side == SubspaceSide::Doppler) {
        R = rd * rd.adjoint() / static_cast<double>(M);
        d.snapshots = M;
        d.effective_dim = std::min(N - 1, M);
    } else {
        R = rd.transpose() * rd.conjugate() / static_cast<double>(N);
        d.snapshots = N;
        d.effective_dim = std::min(M, N - 1);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(R);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("subspace: eigendecomposition failed");
    d.eigenvalues = eig.eigenvalues().reverse();
    d.eigenvectors = eig.eigenvectors().rowwise().reverse();
    d.order = mdl_order(d.eigenvalues, d.snapshots, d.effective_dim);
    return d;
}

Eigen::VectorXcd doppler_steering(double v, const SystemConfig& config)
{
    const double step = config.doppler_phase_step(v);
    Eigen::VectorXcd k(config.n_symbols);
    for (int n = 0; n < config.n_symbols; ++n)
        k[n] = std::polar(1.0, step * n);
    return k;
}

Eigen::VectorXcd range_steering(double r, const SystemConfig& config)
{
    const double step = -4.0 * kPi * r * config.delta_f / kSpeedOfLight;
    Eigen::VectorXcd k(config.n_subcarriers);
    for (int m = 0; m < config.n_subcarriers; ++m)
        k[m] = std::polar(1.0, step * m);
    return k;
}

MusicGrid range_grid(const SystemConfig& config)
{
    MusicGrid g;
    g.start = 0.0;
    g.step = config.range_resolution() / 10.0;
    g.points = static_cast<int>(std::ceil(config.max_unambiguous_range() / g.step - 1e-9));
    return g;
}

MusicGrid velocity_grid(const SystemConfig& config)
{
    MusicGrid g;
    const double vmax = config.max_unambiguous_velocity();
    g.start = -vmax;
    g.step = config.velocity_resolution() / 10.0;
    g.points = static_cast<int>(std::ceil(2.0 * vmax / g.step - 1e-9));
    return g;
}

namespace {

Eigen::VectorXcd side_steering(SubspaceSide side, double x, const SystemConfig& config)
{
    if (side == SubspaceSide::Range)
        return range_steering(x, config);
    // Zero-mean projection of k_D, formed from e^{j phi n} - 1 so that it stays
    // accurate near v = 0. At phi = 0 the normalised direction tends to j (n - mean n).
    const double step = config.doppler_phase_step(x);
    const int N = config.n_symbols;
    Eigen::VectorXcd k(N);
    for (int n = 0; n < N; ++n) {
        const double a = step * n;
        const double s = std::sin(0.5 * a);
        k[n] = step == 0.0 ? Complex(0.0, n - 0.5 * (N - 1)) : Complex(-2.0 * s * s, std::sin(a));
    }
    k.array() -= k.mean();
    const double norm = k.norm();
    if (norm > 0.0)
        k *= std::sqrt(static_cast<double>(N)) / norm;
    return k;
}

double inverse_noise_projection(const Eigen::MatrixXcd& signal, const Eigen::VectorXcd& k)
{
    const double total = k.squaredNorm();
    const double sig = signal.cols() > 0 ? (signal.adjoint() * k).squaredNorm() : 0.0;
    const double den = std::max(total - sig, 1e-16 * total);
    return 1.0 / den;
}

double refine_peak(const Eigen::VectorXd& f, int i)
{
    const int G = static_cast<int>(f.size());
    const double a = std::log(f[(i - 1 + G) % G]);
    const double b = std::log(f[i]);
    const double c = std::log(f[(i + 1) % G]);
    const double den = a - 2.0 * b + c;
    if (!(den < 0.0))
        return i;
    return i + std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
}

} // namespace

double music_value(const SubspaceDecomposition& decomp, SubspaceSide side, int order, double x,
                   const SystemConfig& config)
{
    if (order < 0 || order >= decomp.eigenvectors.cols())
        throw std::invalid_argument("music_value: empty noise subspace");
    const Eigen::MatrixXcd signal = decomp.eigenvectors.leftCols(order);
    return inverse_noise_projection(signal, side_steering(side, x, config));
}

MusicSpectrum music_spectrum(const SubspaceDecomposition& decomp, SubspaceSide side, int order,
                             const MusicGrid& grid, const SystemConfig& config)
{
    const int dim = static_cast<int>(decomp.eigenvectors.rows());
    if (order < 0 || order >= dim)
        throw std::invalid_argument("music_spectrum: empty noise subspace");
    const Eigen::MatrixXcd signal = decomp.eigenvectors.leftCols(order);

    MusicSpectrum s;
    s.grid = grid;
    s.values.resize(grid.points);
    for (int i = 0; i < grid.points; ++i)
        s.values[i] = inverse_noise_projection(signal, side_steering(side, grid.at(i), config));

    // circular local maxima, highest first
    std::vector<int> idx;
    const int G = grid.points;
    for (int i = 0; i < G; ++i) {
        const double v = s.values[i];
        if (v > s.values[(i - 1 + G) % G] && v >= s.values[(i + 1) % G])
            idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return s.values[a] > s.values[b]; });
    const double span = grid.step * G;
    const int polished = std::max(order, 1) + 2;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const int i = idx[r];
        double x = grid.at(refine_peak(s.values, i));
        if (static_cast<int>(r) < polished) {
            // Golden-section polish of F inside the neighbouring grid cells.
            auto f = [&](double t) { return inverse_noise_projection(signal, side_steering(side, t, config)); };
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double lo = grid.at(i - 1.0), hi = grid.at(i + 1.0);
            double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
            double f1 = f(x1), f2 = f(x2);
            for (int it = 0; it < 48 && hi - lo > 1e-9 * grid.step; ++it) {
                if (f1 < f2) {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + g * (hi - lo);
                    f2 = f(x2);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - g * (hi - lo);
                    f1 = f(x1);
                }
            }
            const double xg = 0.5 * (lo + hi);
            if (f(xg) >= f(x))
                x = xg;
        }
        x = grid.start + std::fmod(std::fmod(x - grid.start, span) + span, span);
        s.peaks.push_back(x);
        s.heights.push_back(s.values[i]);
    }
    return s;
}

double matching_score(const Eigen::Ref<const Eigen::MatrixXcd>& rd, double range, double velocity,
                      const SystemConfig& config)
{
    const Eigen::VectorXcd kd = doppler_steering(velocity, config);
    const Eigen::VectorXcd kr = range_steering(range, config);
    return std::abs(kd.dot(rd * kr.conjugate()));
}

std::vector<RangeVelocity> match_pairs(const Eigen::Ref<const Eigen::MatrixXcd>& rd, const std::vector<double>& ranges,
                                       const std::vector<double>& velocities, const SystemConfig& config)
{
    const int R = static_cast<int>(ranges.size());
    const int V = static_cast<int>(velocities.size());
    Eigen::MatrixXd S(R, V);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < V; ++j)
            S(i, j) = matching_score(rd, ranges[i], velocities[j], config);

    std::vector<RangeVelocity> out;
    std::vector<bool> used_r(R, false), used_v(V, false);
    for (int k = 0; k < std::min(R, V); ++k) {
        int bi = -1, bj = -1;
        double best = -1.0;
        for (int i = 0; i < R; ++i) {
            if (used_r[i])
                continue;
            for (int j = 0; j < V; ++j) {
                if (!used_v[j] && S(i, j) > best) {
                    best = S(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        used_r[bi] = used_v[bj] = true;
        out.push_back({ranges[bi], velocities[bj], best});
    }
    return out;
}

SlotEstimate estimate_slot(const Eigen::Ref<const Eigen::MatrixXcd>& rd, int min_order, const SystemConfig& config)
{
    SlotEstimate est;
    const SubspaceDecomposition dd = subspace(rd, SubspaceSide::Doppler);
    const SubspaceDecomposition dr = subspace(rd, SubspaceSide::Range);
    est.order_doppler = dd.order;
    est.order_range = dr.order;
    const int cap = std::min(dd.effective_dim, dr.effective_dim) - 1;
    est.order_used = std::clamp(std::max(std::min(dd.order, dr.order), min_order), 0, cap);
    if (est.order_used == 0)
        return est;

    est.doppler = music_spectrum(dd, SubspaceSide::Doppler, est.order_used, velocity_grid(config), config);
    est.range = music_spectrum(dr, SubspaceSide::Range, est.order_used, range_grid(config), config);
    const auto take = [&](const std::vector<double>& peaks) {
        return std::vector<double>(peaks.begin(), peaks.begin() + std::min<std::size_t>(peaks.size(), est.order_used));
    };
    est.pairs = match_pairs(rd, take(est.range.peaks), take(est.doppler.peaks), config);
    return est;
}

} // namespace isac
