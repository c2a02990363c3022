#ifndef ISAC_POWALLOC_HPP
#define ISAC_POWALLOC_HPP

#include "isac/arrayfield.hpp"
#include "isac/scenario.hpp"
#include "isac/simplex.hpp"

#include <vector>

namespace isac {

/// maximize objective^T rho  s.t.  ineq_matrix rho + ineq_offset <= 0, sum(rho) = 1, rho >= 0.
/// Variables are the P communication factors, followed by the sensing factor when has_sensing.
struct LinearProgram {
    Eigen::VectorXd objective;
    Eigen::MatrixXd ineq_matrix;
    Eigen::VectorXd ineq_offset;
    bool has_sensing = false;

    int variables() const { return static_cast<int>(objective.size()); }
};

enum class AllocationStatus { Optimal, Infeasible };

struct AllocationSolution {
    PowerAllocation alloc;
    double objective_value = 0.0;
    AllocationStatus status = AllocationStatus::Infeasible;
};

/// Communication-beam-only program for a slot inside user p_sharp's protective sector.
LinearProgram build_c4s_lp(double slot_angle, int p_sharp, const std::vector<UserSpec>& users,
                           const SystemConfig& config);

/// Program with P communication beams and one sensing beam toward slot_angle.
LinearProgram build_s4s_lp(double slot_angle, const std::vector<UserSpec>& users,
                           const SystemConfig& config);

AllocationSolution solve_lp(const LinearProgram& lp);

/// Fallback for infeasible slots: sensing off, the largest alpha such that every user
/// reaches alpha * eps_p (max-min of SINR_p / eps_p), found by bisection over feasibility programs.
AllocationSolution best_effort_allocation(const std::vector<UserSpec>& users, const SystemConfig& config);

struct SlotAllocation {
    int slot = 0;
    double angle = 0.0;
    SectorClass sector;
    PowerAllocation alloc;
    double esp = 0.0;
    Eigen::VectorXd sinr;     // linear, per user
    bool best_effort = false;  // LP infeasible; fallback allocation used
};

std::vector<SlotAllocation> allocate_scan(const ScanSchedule& schedule, const std::vector<UserSpec>& users,
                                          const SystemConfig& config);

} // namespace isac

#endif // ISAC_POWALLOC_HPP
