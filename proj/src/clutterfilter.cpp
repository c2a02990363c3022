#include "isac/clutterfilter.hpp"

#include <cmath>

namespace isac {

ComplexCube subtract_static(const ComplexCube& eec)
{
    ComplexCube out = eec;
    for (int m = 0; m < out.subcarriers(); ++m) {
        auto slice = out.subcarrier(m);
        const Eigen::VectorXcd mean = static_estimate(slice);
        slice.colwise() -= mean;
    }
    return out;
}

Complex mean_phasor(double omega, int n_symbols)
{
    Complex acc{};
    for (int n = 0; n < n_symbols; ++n)
        acc += std::polar(1.0, omega * n);
    return acc / static_cast<double>(n_symbols);
}

double dirichlet_leakage(double omega, int n_symbols)
{
    const double den = n_symbols * std::sin(omega / 2.0);
    if (std::abs(den) < 1e-300)
        return 1.0;
    return std::abs(std::sin(n_symbols * omega / 2.0) / den);
}

} // namespace isac
