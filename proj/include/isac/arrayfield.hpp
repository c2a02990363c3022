#ifndef ISAC_ARRAYFIELD_HPP
#define ISAC_ARRAYFIELD_HPP

#include "isac/scenario.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

namespace isac {

template <typename Scalar>
using SteeringVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Phase advance per element, 2 pi f0 d / c, multiplied by sin(theta) to get the element step.
inline double element_phase_scale(const SystemConfig& config)
{
    return 2.0 * kPi * config.f0 * config.spacing / kSpeedOfLight;
}

/// [1, e^{j k sin(theta)}, ..., e^{j k (n-1) sin(theta)}]^T with k = 2 pi f0 d / c.
template <typename Scalar = double>
SteeringVector<Scalar> steering(Scalar theta, int n_ant, const SystemConfig& config)
{
    const Scalar step = static_cast<Scalar>(element_phase_scale(config)) * std::sin(theta);
    SteeringVector<Scalar> a(n_ant);
    for (int n = 0; n < n_ant; ++n)
        a[n] = std::polar(Scalar(1), step * static_cast<Scalar>(n));
    return a;
}

template <typename Scalar = double>
SteeringVector<Scalar> steering_tx(Scalar theta, const SystemConfig& config)
{
    return steering<Scalar>(theta, config.n_tx, config);
}

template <typename Scalar = double>
SteeringVector<Scalar> steering_rx(Scalar theta, const SystemConfig& config)
{
    return steering<Scalar>(theta, config.n_rx, config);
}

/// a^H(theta1) a(theta2) in closed form, e^{j psi (n-1)/2} sin(n psi/2)/sin(psi/2) with
/// psi = k (sin theta2 - sin theta1).
template <typename Scalar = double>
std::complex<Scalar> array_factor(Scalar theta1, Scalar theta2, int n_ant, const SystemConfig& config)
{
    const Scalar ds = std::sin(theta2) - std::sin(theta1);
    if (std::abs(ds) < Scalar(1e-12))
        return {static_cast<Scalar>(n_ant), Scalar(0)};
    const Scalar psi = static_cast<Scalar>(element_phase_scale(config)) * ds;
    const Scalar den = std::sin(psi / 2);
    const Scalar mag = std::abs(den) < Scalar(1e-12)
                           ? static_cast<Scalar>(n_ant) * std::cos(n_ant * psi / 2) / std::cos(psi / 2)
                           : std::sin(n_ant * psi / 2) / den;
    return std::polar(Scalar(1), psi * (n_ant - 1) / 2) * mag;
}

/// |sin(k ds n / 2) / sin(k ds / 2)|^2 with ds = sin theta1 - sin theta2; n^2 at ds = 0.
template <typename Scalar = double>
Scalar array_gain(Scalar theta1, Scalar theta2, int n_ant, const SystemConfig& config)
{
    const Scalar ds = std::sin(theta1) - std::sin(theta2);
    if (std::abs(ds) < Scalar(1e-12))
        return static_cast<Scalar>(n_ant) * n_ant;
    const Scalar x = static_cast<Scalar>(kPi * config.f0 * config.spacing / kSpeedOfLight) * ds;
    const Scalar den = std::sin(x);
    if (den == Scalar(0))
        return static_cast<Scalar>(n_ant) * n_ant;
    const Scalar r = std::sin(x * n_ant) / den;
    return r * r;
}

struct PowerAllocation {
    double rho_s = 0.0;
    Eigen::VectorXd rho_c;

    double total() const { return rho_s + rho_c.sum(); }
    int users() const { return static_cast<int>(rho_c.size()); }
    /// Throws std::invalid_argument unless every factor is nonnegative and the sum is 1.
    void validate(double tol = 1e-9) const;
};

/// Per-user SINR of the slot, linear.
double user_sinr(int p_star, const PowerAllocation& alloc, const std::vector<UserSpec>& users,
                 double slot_angle, const SystemConfig& config);

Eigen::VectorXd user_sinrs(const PowerAllocation& alloc, const std::vector<UserSpec>& users,
                           double slot_angle, const SystemConfig& config);

/// Equivalent sensing power toward the slot angle: communications-beam part plus sensing-beam part.
double esp(const PowerAllocation& alloc, double slot_angle, const std::vector<UserSpec>& users,
           const SystemConfig& config);

} // namespace isac

#endif // ISAC_ARRAYFIELD_HPP
