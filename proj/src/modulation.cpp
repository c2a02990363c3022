#include "isac/modulation.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

namespace {

// Gray order on one axis: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
double gray_level(int two_bits)
{
    switch (two_bits) {
    case 0b00: return -3.0;
    case 0b01: return -1.0;
    case 0b11: return 1.0;
    default: return 3.0;
    }
}

int gray_bits(double level)
{
    if (level < -2.0)
        return 0b00;
    if (level < 0.0)
        return 0b01;
    if (level < 2.0)
        return 0b11;
    return 0b10;
}

std::vector<Complex> make_qam16()
{
    std::vector<Complex> pts(16);
    const double scale = 1.0 / std::sqrt(10.0);
    for (int l = 0; l < 16; ++l)
        pts[l] = Complex(gray_level(l >> 2), gray_level(l & 3)) * scale;
    return pts;
}

std::vector<Complex> make_qpsk()
{
    std::vector<Complex> pts(4);
    const double s = 1.0 / std::sqrt(2.0);
    for (int l = 0; l < 4; ++l)
        pts[l] = Complex((l & 2) ? s : -s, (l & 1) ? s : -s);
    return pts;
}

} // namespace

int bits_per_symbol(Modulation mod)
{
    return mod == Modulation::Qam16 ? 4 : 2;
}

const std::vector<Complex>& constellation(Modulation mod)
{
    static const std::vector<Complex> qam16 = make_qam16();
    static const std::vector<Complex> qpsk = make_qpsk();
    return mod == Modulation::Qam16 ? qam16 : qpsk;
}

Complex map_label(int label, Modulation mod)
{
    return constellation(mod).at(static_cast<std::size_t>(label));
}

int decide_label(Complex z, Modulation mod)
{
    if (mod == Modulation::Qam16) {
        const double scale = std::sqrt(10.0);
        return (gray_bits(z.real() * scale) << 2) | gray_bits(z.imag() * scale);
    }
    return (z.real() >= 0.0 ? 2 : 0) | (z.imag() >= 0.0 ? 1 : 0);
}

std::vector<Complex> modulate(const std::vector<std::uint8_t>& bits, Modulation mod)
{
    const int k = bits_per_symbol(mod);
    if (bits.size() % static_cast<std::size_t>(k) != 0)
        throw std::invalid_argument("modulate: bit count is not a multiple of the symbol size");
    std::vector<Complex> out(bits.size() / k);
    for (std::size_t s = 0; s < out.size(); ++s) {
        int label = 0;
        for (int b = 0; b < k; ++b)
            label = (label << 1) | (bits[s * k + b] & 1);
        out[s] = map_label(label, mod);
    }
    return out;
}

std::vector<std::uint8_t> demodulate(const std::vector<Complex>& symbols, Modulation mod)
{
    const int k = bits_per_symbol(mod);
    std::vector<std::uint8_t> bits(symbols.size() * k);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const int label = decide_label(symbols[s], mod);
        for (int b = 0; b < k; ++b)
            bits[s * k + b] = static_cast<std::uint8_t>((label >> (k - 1 - b)) & 1);
    }
    return bits;
}

double inverse_power_mean(Modulation mod)
{
    const auto& pts = constellation(mod);
    double acc = 0.0;
    for (const auto& p : pts)
        acc += 1.0 / std::norm(p);
    return acc / static_cast<double>(pts.size());
}

} // namespace isac
