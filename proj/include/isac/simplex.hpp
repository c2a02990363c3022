#ifndef ISAC_SIMPLEX_HPP
#define ISAC_SIMPLEX_HPP

#include <Eigen/Dense>

namespace isac {

/// maximize c^T x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.
/// Either constraint block may have zero rows.
struct DenseLp {
    Eigen::VectorXd c;
    Eigen::MatrixXd a_ub;
    Eigen::VectorXd b_ub;
    Eigen::MatrixXd a_eq;
    Eigen::VectorXd b_eq;

    int variables() const { return static_cast<int>(c.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    int iterations = 0;
};

/// Dense two-phase tableau simplex with Bland's anti-cycling rule. Rows are
/// equilibrated before pivoting and the final vertex is re-solved from the
/// optimal basis against the unscaled constraints.
LpResult simplex_maximize(const DenseLp& lp);

} // namespace isac

#endif // ISAC_SIMPLEX_HPP
