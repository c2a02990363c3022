#include "isac/detect.hpp"

#include "isac/arrayfield.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace isac {

AngleDopplerSpectrum adse(const Eigen::Ref<const Eigen::MatrixXcd>& slice, DopplerWindow window)
{
    const int Q = static_cast<int>(slice.rows());
    const int N = static_cast<int>(slice.cols());
    if (N < 1)
        throw std::invalid_argument("adse: no symbols");
    std::vector<double> taper(N, 1.0);
    if (window == DopplerWindow::Hann) {
        for (int n = 0; n < N; ++n)
            taper[n] = 1.0 - std::cos(2.0 * kPi * n / N);  // mean 1
    }

    Eigen::FFT<double> fft;
    std::vector<Complex> in(N), out(N);
    AngleDopplerSpectrum s;
    s.spectrum.resize(Q, N);
    const int shift = N / 2;
    for (int q = 0; q < Q; ++q) {
        // Shift the row by (weighted mean - plain mean) so the tapered DC bin equals the
        // untapered one; a constant offset is then not smeared into the neighbouring bins.
        Complex offset(0.0, 0.0);
        if (window != DopplerWindow::Rectangular) {
            for (int n = 0; n < N; ++n)
                offset += slice(q, n) * (taper[n] - 1.0);
            offset /= static_cast<double>(N);
        }
        for (int n = 0; n < N; ++n)
            in[n] = (slice(q, n) - offset) * taper[n];
        fft.fwd(out, in);
        for (int k = 0; k < N; ++k)
            s.spectrum(q, (k + shift) % N) = out[k];
    }
    s.magnitude = s.spectrum.cwiseAbs();
    return s;
}

double bin_velocity(double b, const SystemConfig& config)
{
    const int N = config.n_symbols;
    return (b - N / 2) * kSpeedOfLight / (2.0 * config.f0 * N * config.symbol_period());
}

int velocity_bin(double v, const SystemConfig& config)
{
    const int N = config.n_symbols;
    const long b = std::lround(v / config.velocity_resolution()) + N / 2;
    return static_cast<int>(((b % N) + N) % N);
}

double cfar_scale(int n_ref, double pfa)
{
    if (n_ref < 1 || !(pfa > 0.0) || !(pfa < 1.0))
        throw std::invalid_argument("cfar_scale: invalid reference count or false-alarm rate");
    return n_ref * (std::pow(pfa, -1.0 / n_ref) - 1.0);
}

namespace {

// Signed circular offset of a from b on an axis of length n, in (-n/2, n/2].
int circular_offset(int a, int b, int n)
{
    int d = ((a - b) % n + n) % n;
    if (d > n / 2)
        d -= n;
    return d;
}

} // namespace

MaskMatrix cfar_2d(const Eigen::Ref<const Eigen::MatrixXd>& power, const CfarParams& params)
{
    const int Q = static_cast<int>(power.rows());
    const int N = static_cast<int>(power.cols());
    const int R = params.reference;
    const int G = params.guard;
    if (G < 0 || R <= G)
        throw std::invalid_argument("cfar_2d: reference half-width must exceed guard half-width");
    if (2 * R + 1 > N || 2 * R + 1 > Q)
        throw std::invalid_argument("cfar_2d: window larger than the spectrum");

    const bool skip = params.skip_zero_doppler;
    const int dc = N / 2;

    // Integral image over columns extended by R on each side (circular Doppler axis).
    const int W = N + 2 * R;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(Q + 1, W + 1);
    for (int q = 0; q < Q; ++q) {
        for (int j = 0; j < W; ++j) {
            const int col = ((j - R) % N + N) % N;
            const double v = skip && col == dc ? 0.0 : power(q, col);
            S(q + 1, j + 1) = v + S(q, j + 1) + S(q + 1, j) - S(q, j);
        }
    }
    auto rect = [&](int r0, int r1, int c0, int c1) {
        return S(r1 + 1, c1 + 1) - S(r0, c1 + 1) - S(r1 + 1, c0) + S(r0, c0);
    };

    const double floor = params.floor_db > 0.0 ? power.maxCoeff() * std::pow(10.0, -params.floor_db / 10.0) : 0.0;

    std::map<int, double> scale_cache;
    MaskMatrix mask = MaskMatrix::Zero(Q, N);
    for (int q = 0; q < Q; ++q) {
        const int ro0 = std::max(0, q - R), ro1 = std::min(Q - 1, q + R);
        const int rg0 = std::max(0, q - G), rg1 = std::min(Q - 1, q + G);
        for (int n = 0; n < N; ++n) {
            const int c = n + R;
            if (skip && n == dc)
                continue;
            const double outer = rect(ro0, ro1, c - R, c + R);
            const double inner = rect(rg0, rg1, c - G, c + G);
            int count = (ro1 - ro0 + 1) * (2 * R + 1) - (rg1 - rg0 + 1) * (2 * G + 1);
            if (skip) {
                const int d = circular_offset(dc, n, N);
                if (std::abs(d) <= R && std::abs(d) > G)
                    count -= ro1 - ro0 + 1;
                else if (std::abs(d) <= G)
                    count -= (ro1 - ro0 + 1) - (rg1 - rg0 + 1);
            }
            auto it = scale_cache.find(count);
            if (it == scale_cache.end())
                it = scale_cache.emplace(count, cfar_scale(count, params.pfa)).first;
            const double mean = std::max(0.0, outer - inner) / count;
            mask(q, n) = power(q, n) > it->second * mean && power(q, n) > floor ? 1 : 0;
        }
    }
    return mask;
}

int default_min_votes(int subcarriers, double pfa)
{
    if (subcarriers < 1)
        throw std::invalid_argument("default_min_votes: no subcarriers");
    // Tail probabilities from the binomial pmf computed in log space.
    std::vector<double> pmf(subcarriers + 1);
    const double lp = std::log(pfa), lq = std::log1p(-pfa);
    for (int k = 0; k <= subcarriers; ++k) {
        const double lc = std::lgamma(subcarriers + 1.0) - std::lgamma(k + 1.0) - std::lgamma(subcarriers - k + 1.0);
        pmf[k] = std::exp(lc + k * lp + (subcarriers - k) * lq);
    }
    double tail = 0.0;
    for (int t = subcarriers; t >= 1; --t) {
        tail += pmf[t];
        if (tail > pfa * (1.0 + 1e-9))
            return std::min(subcarriers, t + 1);
    }
    return 1;
}

int votes_for_fraction(double fraction, int subcarriers)
{
    return std::max(1, static_cast<int>(std::ceil(fraction * subcarriers - 1e-9)));
}

DetectionMask msjd(const std::vector<MaskMatrix>& masks, int min_votes, const Eigen::Ref<const Eigen::MatrixXd>& score)
{
    if (masks.empty())
        throw std::invalid_argument("msjd: no subcarrier masks");
    const int Q = static_cast<int>(masks.front().rows());
    const int N = static_cast<int>(masks.front().cols());
    if (score.rows() != Q || score.cols() != N)
        throw std::invalid_argument("msjd: score shape mismatch");

    DetectionMask out;
    out.votes = Eigen::MatrixXi::Zero(Q, N);
    for (const auto& m : masks) {
        if (m.rows() != Q || m.cols() != N)
            throw std::invalid_argument("msjd: mask shape mismatch");
        out.votes += m;
    }
    out.mask = (out.votes.array() >= min_votes).cast<int>().matrix();

    Eigen::MatrixXi label = Eigen::MatrixXi::Constant(Q, N, -1);
    for (int q0 = 0; q0 < Q; ++q0) {
        for (int n0 = 0; n0 < N; ++n0) {
            if (!out.mask(q0, n0) || label(q0, n0) >= 0)
                continue;
            Cluster c;
            const int id = static_cast<int>(out.clusters.size());
            std::vector<std::pair<int, int>> stack{{q0, n0}};
            label(q0, n0) = id;
            while (!stack.empty()) {
                const auto [q, n] = stack.back();
                stack.pop_back();
                c.cells.emplace_back(q, n);
                for (int dq = -1; dq <= 1; ++dq) {
                    for (int dn = -1; dn <= 1; ++dn) {
                        const int qq = q + dq;
                        const int nn = ((n + dn) % N + N) % N;
                        if (qq < 0 || qq >= Q || !out.mask(qq, nn) || label(qq, nn) >= 0)
                            continue;
                        label(qq, nn) = id;
                        stack.emplace_back(qq, nn);
                    }
                }
            }
            std::sort(c.cells.begin(), c.cells.end());
            double best = -1.0, wsum = 0.0, rsum = 0.0, csum = 0.0;
            const int ref_col = c.cells.front().second;
            for (const auto& [q, n] : c.cells) {
                const double v = score(q, n);
                if (v > best) {
                    best = v;
                    c.peak_row = q;
                    c.peak_col = n;
                }
                // unwrap columns relative to the first cell before averaging
                int un = n;
                if (un - ref_col > N / 2)
                    un -= N;
                else if (ref_col - un > N / 2)
                    un += N;
                const double w = std::max(v, 0.0);
                wsum += w;
                rsum += w * q;
                csum += w * un;
                c.max_votes = std::max(c.max_votes, out.votes(q, n));
            }
            if (wsum > 0.0) {
                c.centroid_row = rsum / wsum;
                c.centroid_col = std::fmod(csum / wsum + N, static_cast<double>(N));
            } else {
                c.centroid_row = c.peak_row;
                c.centroid_col = c.peak_col;
            }
            out.clusters.push_back(std::move(c));
        }
    }
    return out;
}

DetectionMask msjd(const std::vector<MaskMatrix>& masks, int min_votes)
{
    if (masks.empty())
        throw std::invalid_argument("msjd: no subcarrier masks");
    Eigen::MatrixXd votes = Eigen::MatrixXd::Zero(masks.front().rows(), masks.front().cols());
    for (const auto& m : masks)
        votes += m.cast<double>();
    return msjd(masks, min_votes, votes);
}

namespace {

double parabolic_offset(double a, double b, double c)
{
    const double den = a - 2.0 * b + c;
    if (!(den < 0.0))
        return 0.0;
    return std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
}

double pattern_power(double theta, const SlotIllumination& ill, const SystemConfig& config)
{
    const double frx = std::norm(array_factor(ill.angle, theta, config.n_rx, config));
    const double ftx = std::norm(array_factor(theta, ill.beam_angle, config.n_tx, config));
    return ill.weight * ill.weight * frx * ftx;
}

} // namespace

std::vector<double> extract_angles(const std::vector<Cluster>& clusters, const ScanSchedule& schedule,
                                   const Eigen::Ref<const Eigen::MatrixXd>& score, AngleRefinement mode,
                                   const std::vector<SlotIllumination>& illumination, const SystemConfig& config)
{
    const int Q = schedule.size();
    const int N = static_cast<int>(score.cols());
    if (score.rows() != Q)
        throw std::invalid_argument("extract_angles: score rows differ from the schedule");
    if (mode == AngleRefinement::PatternFit && static_cast<int>(illumination.size()) != Q)
        throw std::invalid_argument("extract_angles: illumination table required for pattern fitting");

    // Noise floor of the accumulated map, removed before fitting row profiles.
    double floor = 0.0;
    if (mode == AngleRefinement::PatternFit && score.size() > 0) {
        std::vector<double> all(score.data(), score.data() + score.size());
        std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
        floor = all[all.size() / 2];
    }

    std::vector<double> out;
    out.reserve(clusters.size());
    for (const auto& c : clusters) {
        const int q = c.peak_row;
        auto row_value = [&](int row) {
            double acc = 0.0;
            for (int dn = -1; dn <= 1; ++dn)
                acc += score(row, ((c.peak_col + dn) % N + N) % N);
            return acc;
        };
        if (mode == AngleRefinement::None || Q < 3) {
            out.push_back(schedule[q]);
            continue;
        }
        const double sq = std::sin(schedule[q]);
        const double step = (std::sin(schedule[Q - 1]) - std::sin(schedule[0])) / (Q - 1);

        if (mode == AngleRefinement::Parabolic) {
            if (q == 0 || q == Q - 1) {
                out.push_back(schedule[q]);
                continue;
            }
            const double tiny = 1e-300;
            const double a = std::log(std::max(row_value(q - 1), tiny));
            const double b = std::log(std::max(row_value(q), tiny));
            const double d = std::log(std::max(row_value(q + 1), tiny));
            const double s = std::clamp(sq + parabolic_offset(a, b, d) * step, -1.0, 1.0);
            out.push_back(std::asin(s));
            continue;
        }

        // PatternFit: least-squares fit of the modelled row profile over rows q-2..q+2.
        std::vector<int> rows;
        std::vector<double> y;
        for (int r = std::max(0, q - 2); r <= std::min(Q - 1, q + 2); ++r) {
            rows.push_back(r);
            y.push_back(std::max(0.0, row_value(r) - 3.0 * floor));
        }
        auto fit = [&](double s) {
            const double theta = std::asin(std::clamp(s, -1.0, 1.0));
            double gy = 0.0, gg = 0.0;
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const double g = pattern_power(theta, illumination[rows[k]], config);
                gy += g * y[k];
                gg += g * g;
            }
            return gg > 0.0 ? gy * gy / gg : 0.0;
        };
        const double lo = sq - step, hi = sq + step;
        const int grid = 64;
        double best_s = sq, best_v = fit(sq);
        for (int k = 0; k <= grid; ++k) {
            const double s = lo + (hi - lo) * k / grid;
            const double v = fit(s);
            if (v > best_v) {
                best_v = v;
                best_s = s;
            }
        }
        // golden-section polish around the best grid point
        double a = best_s - (hi - lo) / grid, b = best_s + (hi - lo) / grid;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = fit(x1), f2 = fit(x2);
        for (int it = 0; it < 60; ++it) {
            if (f1 > f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = fit(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = fit(x2);
            }
        }
        const double s = 0.5 * (a + b);
        out.push_back(std::asin(std::clamp(fit(s) >= best_v ? s : best_s, -1.0, 1.0)));
    }
    return out;
}

} // namespace isac
