#include "isac/powalloc.hpp"

#include <stdexcept>

namespace isac {

namespace {

void fill_user_rows(LinearProgram& lp, double slot_angle, const std::vector<UserSpec>& users,
                    const SystemConfig& config)
{
    const int P = static_cast<int>(users.size());
    const double nt2 = static_cast<double>(config.n_tx) * config.n_tx;
    lp.ineq_matrix = Eigen::MatrixXd::Zero(P, lp.variables());
    lp.ineq_offset.resize(P);
    for (int ps = 0; ps < P; ++ps) {
        const UserSpec& u = users[ps];
        const double eps = u.sinr_min;
        for (int p = 0; p < P; ++p)
            lp.ineq_matrix(ps, p) = p == ps ? -nt2 : array_gain(u.angle, users[p].angle, config.n_tx, config) * eps;
        if (lp.has_sensing)
            lp.ineq_matrix(ps, P) = array_gain(u.angle, slot_angle, config.n_tx, config) * eps;
        const double gamma = u.path_gain(config);
        lp.ineq_offset[ps] = eps * config.n_tx * u.noise(config) / (config.tx_power * gamma * gamma);
    }
}

void fill_comm_objective(LinearProgram& lp, double slot_angle, const std::vector<UserSpec>& users,
                         const SystemConfig& config)
{
    for (std::size_t p = 0; p < users.size(); ++p)
        lp.objective[static_cast<Eigen::Index>(p)] =
            config.tx_power * config.n_rx * array_gain(slot_angle, users[p].angle, config.n_tx, config) / config.n_tx;
}

PowerAllocation to_allocation(const Eigen::VectorXd& rho, int users, bool has_sensing)
{
    PowerAllocation a;
    a.rho_c = rho.head(users);
    a.rho_s = has_sensing ? rho[users] : 0.0;
    return a;
}

} // namespace

LinearProgram build_c4s_lp(double slot_angle, int p_sharp, const std::vector<UserSpec>& users,
                           const SystemConfig& config)
{
    if (p_sharp < 0 || p_sharp >= static_cast<int>(users.size()))
        throw std::invalid_argument("build_c4s_lp: serving user out of range");
    LinearProgram lp;
    lp.has_sensing = false;
    lp.objective.resize(static_cast<Eigen::Index>(users.size()));
    fill_comm_objective(lp, slot_angle, users, config);
    fill_user_rows(lp, slot_angle, users, config);
    return lp;
}

LinearProgram build_s4s_lp(double slot_angle, const std::vector<UserSpec>& users, const SystemConfig& config)
{
    const int P = static_cast<int>(users.size());
    LinearProgram lp;
    lp.has_sensing = true;
    lp.objective.resize(P + 1);
    fill_comm_objective(lp, slot_angle, users, config);
    lp.objective[P] = config.tx_power * config.n_tx * config.n_rx;
    fill_user_rows(lp, slot_angle, users, config);
    return lp;
}

AllocationSolution solve_lp(const LinearProgram& lp)
{
    const int n = lp.variables();
    const int P = lp.has_sensing ? n - 1 : n;
    DenseLp dense;
    dense.c = lp.objective;
    dense.a_ub = lp.ineq_matrix;
    dense.b_ub = -lp.ineq_offset;
    dense.a_eq = Eigen::MatrixXd::Ones(1, n);
    dense.b_eq = Eigen::VectorXd::Ones(1);
    const LpResult r = simplex_maximize(dense);

    AllocationSolution sol;
    if (r.status != LpStatus::Optimal) {
        sol.status = AllocationStatus::Infeasible;
        sol.alloc.rho_c = Eigen::VectorXd::Zero(P);
        return sol;
    }
    Eigen::VectorXd rho = r.x;
    rho /= rho.sum();
    sol.status = AllocationStatus::Optimal;
    sol.alloc = to_allocation(rho, P, lp.has_sensing);
    sol.objective_value = lp.objective.dot(rho);
    return sol;
}

AllocationSolution best_effort_allocation(const std::vector<UserSpec>& users, const SystemConfig& config)
{
    const int P = static_cast<int>(users.size());
    if (P == 0)
        throw std::invalid_argument("best_effort_allocation: no users");

    // Bisection on alpha: is SINR_p >= alpha * eps_p for every p reachable with sensing off?
    auto feasible = [&](double alpha, Eigen::VectorXd* rho) {
        std::vector<UserSpec> scaled = users;
        for (auto& u : scaled)
            u.sinr_min *= alpha;
        LinearProgram lp;
        lp.objective = Eigen::VectorXd::Zero(P);
        lp.has_sensing = false;
        fill_user_rows(lp, 0.0, scaled, config);
        const AllocationSolution s = solve_lp(lp);
        if (s.status == AllocationStatus::Optimal && rho)
            *rho = s.alloc.rho_c;
        return s.status == AllocationStatus::Optimal;
    };

    Eigen::VectorXd best = Eigen::VectorXd::Constant(P, 1.0 / P);
    double lo = 0.0, hi = 1.0;
    for (int grow = 0; grow < 64 && feasible(hi, &best); ++grow)
        hi *= 2.0;  // only entered when the caller's thresholds were already feasible
    for (int it = 0; it < 60 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        Eigen::VectorXd rho;
        if (feasible(mid, &rho)) {
            lo = mid;
            best = rho;
        } else {
            hi = mid;
        }
    }

    AllocationSolution sol;
    sol.alloc = to_allocation(best / best.sum(), P, false);
    sol.status = AllocationStatus::Infeasible;
    return sol;
}

std::vector<SlotAllocation> allocate_scan(const ScanSchedule& schedule, const std::vector<UserSpec>& users,
                                          const SystemConfig& config)
{
    const auto sectors = classify_schedule(schedule, users, config);
    std::vector<SlotAllocation> out(static_cast<std::size_t>(schedule.size()));
    for (int q = 0; q < schedule.size(); ++q) {
        SlotAllocation& s = out[q];
        s.slot = q;
        s.angle = schedule[q];
        s.sector = sectors[q];
        const LinearProgram lp = s.sector.kind == SectorKind::C4S
                                     ? build_c4s_lp(s.angle, s.sector.user, users, config)
                                     : build_s4s_lp(s.angle, users, config);
        AllocationSolution sol = solve_lp(lp);
        if (sol.status != AllocationStatus::Optimal) {
            sol = best_effort_allocation(users, config);
            s.best_effort = true;
        }
        s.alloc = sol.alloc;
        s.esp = esp(s.alloc, s.angle, users, config);
        s.sinr = users.empty() ? Eigen::VectorXd() : user_sinrs(s.alloc, users, s.angle, config);
    }
    return out;
}

} // namespace isac
