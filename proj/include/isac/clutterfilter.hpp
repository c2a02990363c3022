#ifndef ISAC_CLUTTERFILTER_HPP
#define ISAC_CLUTTERFILTER_HPP

#include "isac/types.hpp"

#include <Eigen/Dense>

namespace isac {

/// Row means over the symbol axis of one subcarrier's Q x N slice.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> static_estimate(const Eigen::MatrixBase<Derived>& slice)
{
    if (slice.cols() < 1)
        throw std::invalid_argument("static_estimate: no symbols");
    return slice.rowwise().mean();
}

/// Subtracts the per-(q, m) symbol mean from every entry.
ComplexCube subtract_static(const ComplexCube& eec);

/// (1/N) sum_{n<N} e^{j omega n}, summed directly.
Complex mean_phasor(double omega, int n_symbols);

/// |sin(N omega / 2) / (N sin(omega / 2))|; 1 at omega = 0 mod 2 pi.
double dirichlet_leakage(double omega, int n_symbols);

} // namespace isac

#endif // ISAC_CLUTTERFILTER_HPP
