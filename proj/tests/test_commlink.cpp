#include "isac/commlink.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <bit>
#include <map>
#include <random>

using namespace isac;

namespace {

SystemConfig ber_config(int nt)
{
    SystemConfig c;
    c.n_tx = c.n_rx = nt;
    c.f0 = 100e9;
    c.delta_f = 480e3;
    c.n_subcarriers = 8;
    c.n_symbols = 16;
    c.tx_power = 100.0;
    c.noise_var_user = 1e-9;
    return with_default_spacing(c);
}

std::vector<UserSpec> ber_users()
{
    std::vector<UserSpec> u(3);
    const double deg[3] = {-40.0, 0.0, 30.0};
    for (int p = 0; p < 3; ++p) {
        u[p].range = 60.0;
        u[p].angle = deg2rad(deg[p]);
    }
    return u;
}

} // namespace

TEST_SUITE("commlink") {

TEST_CASE("constellations: unit power, Gray labelling, round trip")
{
    for (auto mod : {Modulation::Qam16, Modulation::Qpsk}) {
        const auto& pts = constellation(mod);
        double p = 0.0;
        for (const auto& s : pts)
            p += std::norm(s);
        CHECK(p / pts.size() == doctest::Approx(1.0).epsilon(1e-12));
        // nearest neighbours differ in exactly one bit
        double dmin = 1e9;
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b)
                dmin = std::min(dmin, std::abs(pts[a] - pts[b]));
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b)
                if (std::abs(std::abs(pts[a] - pts[b]) - dmin) < 1e-12)
                    CHECK(std::popcount(static_cast<unsigned>(a ^ b)) == 1);
    }
    std::vector<std::uint8_t> bits;
    for (int l = 0; l < 16; ++l)
        for (int b = 3; b >= 0; --b)
            bits.push_back((l >> b) & 1);
    CHECK(demodulate(modulate(bits)) == bits);
    CHECK(demodulate(modulate({1, 0, 0, 1}, Modulation::Qpsk), Modulation::Qpsk) == std::vector<std::uint8_t>{1, 0, 0, 1});
    CHECK_THROWS_AS(modulate({1, 0, 1}), std::invalid_argument);
}

TEST_CASE("decisions inside half the minimum distance are correct")
{
    const auto& pts = constellation(Modulation::Qam16);
    const double half = 1.0 / std::sqrt(10.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.99, 0.99);
    for (int l = 0; l < 16; ++l)
        for (int i = 0; i < 50; ++i)
            CHECK(decide_label(pts[l] + Complex(u(rng), u(rng)) * half / std::sqrt(2.0), Modulation::Qam16) == l);
}

TEST_CASE("inverse power mean of 16-QAM")
{
    // points have power 0.2 (x4), 1.0 (x8), 1.8 (x4)
    CHECK(inverse_power_mean(Modulation::Qam16) == doctest::Approx((4 / 0.2 + 8 / 1.0 + 4 / 1.8) / 16.0));
    CHECK(inverse_power_mean(Modulation::Qpsk) == doctest::Approx(1.0));
}

TEST_CASE("AWGN bit error rate at Es/N0 = 15 dB matches the nearest-neighbour approximation")
{
    const double es_n0 = db2lin(15.0);
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> bit(0, 1);
    std::normal_distribution<double> g(0.0, std::sqrt(1.0 / es_n0 / 2.0));
    const int symbols = 400000;
    std::vector<std::uint8_t> bits(4 * symbols);
    for (auto& b : bits)
        b = static_cast<std::uint8_t>(bit(rng));
    auto s = modulate(bits);
    for (auto& v : s)
        v += Complex(g(rng), g(rng));
    const auto out = demodulate(s);
    std::int64_t err = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        err += out[i] != bits[i];
    const double ber = double(err) / bits.size();
    const double ref = 0.75 * 0.5 * std::erfc(std::sqrt(es_n0 / 5.0) / std::sqrt(2.0));
    CHECK(qam16_ber_approx(es_n0) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(ber == doctest::Approx(ref).epsilon(0.2));
}

TEST_CASE("noiseless single-user link has no errors")
{
    SystemConfig c = ber_config(32);
    std::vector<UserSpec> one(1);
    one[0].range = 60.0;
    one[0].angle = 0.1;
    const auto pt = run_ber_point(one, c, 10.0, 1, true);
    CHECK(pt.count.bits > 0);
    CHECK(pt.count.errors == 0);
}

TEST_CASE("BER is nonincreasing in SINR and in array size")
{
    auto users = ber_users();
    std::map<int, std::vector<double>> curve;
    for (int nt : {64, 128, 256}) {
        const auto c = ber_config(nt);
        double prev = 1.0;
        for (double s : {0.0, 5.0, 10.0, 15.0, 20.0}) {
            BerCount total;
            for (int rep = 0; rep < 3; ++rep)
                total += run_ber_point(users, c, s, 100 + rep).count;
            const double b = total.ber();
            // one standard deviation of the difference of two binomial estimates
            const double sigma = std::sqrt((prev * (1 - prev) + b * (1 - b)) / total.bits);
            CHECK(b <= prev + sigma);
            prev = b;
            curve[nt].push_back(b);
        }
    }
    for (std::size_t i = 0; i < curve[64].size(); ++i) {
        CHECK(curve[128][i] <= curve[64][i] * 1.2 + 1e-4);
        CHECK(curve[256][i] <= curve[128][i] * 1.2 + 1e-4);
    }
}

TEST_CASE("equaliser undoes the effective reception coefficient")
{
    SystemConfig c = ber_config(16);
    std::vector<UserSpec> one(1);
    one[0].range = 60.0;
    std::vector<SectorClass> sectors(1);
    Rng rng(4);
    const auto syms = gen_symbols(c, 1, sectors, {}, rng);
    PowerAllocation a;
    a.rho_c = Eigen::VectorXd::Ones(1);
    auto rx = user_rx(one, a, syms, 0, 0.7, c, rng, true);
    CHECK(equalize_and_score(rx, one, a, syms, 0, c).errors == 0);
    rx[0] *= Complex(0.0, 1.0);  // wrong phase reference: quarter-turn rotation
    CHECK(equalize_and_score(rx, one, a, syms, 0, c).errors > 0);
}

}
