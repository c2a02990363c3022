#ifndef ISAC_MODULATION_HPP
#define ISAC_MODULATION_HPP

#include "isac/types.hpp"

#include <cstdint>
#include <vector>

namespace isac {

enum class Modulation { Qam16, Qpsk };

int bits_per_symbol(Modulation mod);

/// Unit-average-power Gray constellation; entry l is the point for label l, whose
/// bits (MSB first) are the label's binary digits.
const std::vector<Complex>& constellation(Modulation mod);

Complex map_label(int label, Modulation mod);

/// Minimum-distance decision; returns the label.
int decide_label(Complex z, Modulation mod);

/// bits.size() must be a multiple of bits_per_symbol(mod); entries are 0 or 1.
std::vector<Complex> modulate(const std::vector<std::uint8_t>& bits, Modulation mod = Modulation::Qam16);
std::vector<std::uint8_t> demodulate(const std::vector<Complex>& symbols, Modulation mod = Modulation::Qam16);

/// Mean of 1/|s|^2 over the equiprobable constellation (noise inflation of symbol division).
double inverse_power_mean(Modulation mod);

} // namespace isac

#endif // ISAC_MODULATION_HPP
