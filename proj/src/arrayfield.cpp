#include "isac/arrayfield.hpp"

#include <stdexcept>
#include <string>

namespace isac {

void PowerAllocation::validate(double tol) const
{
    if (rho_s < 0.0 || (rho_c.size() > 0 && rho_c.minCoeff() < 0.0))
        throw std::invalid_argument("PowerAllocation: negative factor");
    if (std::abs(total() - 1.0) > tol)
        throw std::invalid_argument("PowerAllocation: factors sum to " + std::to_string(total()));
}

double user_sinr(int p_star, const PowerAllocation& alloc, const std::vector<UserSpec>& users,
                 double slot_angle, const SystemConfig& config)
{
    if (p_star < 0 || p_star >= static_cast<int>(users.size()) || alloc.users() != static_cast<int>(users.size()))
        throw std::invalid_argument("user_sinr: user index or allocation size mismatch");
    const UserSpec& u = users[p_star];
    const double nt = config.n_tx;
    double denom = 0.0;
    for (int p = 0; p < alloc.users(); ++p) {
        if (p != p_star)
            denom += alloc.rho_c[p] * array_gain(u.angle, users[p].angle, config.n_tx, config);
    }
    denom += alloc.rho_s * array_gain(u.angle, slot_angle, config.n_tx, config);
    const double gamma = u.path_gain(config);
    denom += nt * u.noise(config) / (config.tx_power * gamma * gamma);
    return alloc.rho_c[p_star] * nt * nt / denom;
}

Eigen::VectorXd user_sinrs(const PowerAllocation& alloc, const std::vector<UserSpec>& users,
                           double slot_angle, const SystemConfig& config)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(users.size()));
    for (int p = 0; p < out.size(); ++p)
        out[p] = user_sinr(p, alloc, users, slot_angle, config);
    return out;
}

double esp(const PowerAllocation& alloc, double slot_angle, const std::vector<UserSpec>& users,
           const SystemConfig& config)
{
    if (alloc.users() != static_cast<int>(users.size()))
        throw std::invalid_argument("esp: allocation size mismatch");
    const double pt = config.tx_power;
    double comm = 0.0;
    for (int p = 0; p < alloc.users(); ++p)
        comm += alloc.rho_c[p] * array_gain(slot_angle, users[p].angle, config.n_tx, config);
    return comm * pt * config.n_rx / config.n_tx + alloc.rho_s * pt * config.n_tx * config.n_rx;
}

} // namespace isac
