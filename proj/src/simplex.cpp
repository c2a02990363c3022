#include "isac/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace isac {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

class Tableau {
public:
    Tableau(int rows, int cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

    Eigen::MatrixXd& raw() { return t_; }
    int rows() const { return static_cast<int>(t_.rows()) - 1; }
    int cols() const { return static_cast<int>(t_.cols()) - 1; }
    double& rhs(int i) { return t_(i + 1, cols()); }
    double& a(int i, int j) { return t_(i + 1, j); }
    double& obj(int j) { return t_(0, j); }
    double value() const { return t_(0, t_.cols() - 1); }
    std::vector<int>& basis() { return basis_; }

    void set_objective(const Eigen::VectorXd& c)
    {
        t_.row(0).setZero();
        for (int j = 0; j < c.size(); ++j)
            t_(0, j) = -c[j];
        for (int i = 0; i < rows(); ++i) {
            const double f = t_(0, basis_[i]);
            if (f != 0.0)
                t_.row(0) -= f * t_.row(i + 1);
        }
    }

    void pivot(int r, int col)
    {
        t_.row(r + 1) /= t_(r + 1, col);
        for (int i = 0; i <= rows(); ++i) {
            if (i == r + 1)
                continue;
            const double f = t_(i, col);
            if (f != 0.0)
                t_.row(i) -= f * t_.row(r + 1);
        }
        basis_[r] = col;
    }

    // Returns false when unbounded.
    bool optimize(const std::vector<bool>& allowed, int& iterations)
    {
        const int limit = 50 * (rows() + cols() + 10);
        while (true) {
            int enter = -1;
            for (int j = 0; j < cols(); ++j) {
                if (allowed[j] && t_(0, j) < -kPivotTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0)
                return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < rows(); ++i) {
                const double aij = a(i, enter);
                if (aij > kPivotTol) {
                    const double ratio = rhs(i) / aij;
                    if (ratio < best - 1e-14 ||
                        (leave >= 0 && std::abs(ratio - best) <= 1e-14 && basis_[i] < basis_[leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0)
                return false;
            pivot(leave, enter);
            if (++iterations > limit)
                throw std::runtime_error("simplex_maximize: iteration limit exceeded");
        }
    }

    void drop_row(int r)
    {
        const int n = static_cast<int>(t_.rows());
        Eigen::MatrixXd next(n - 1, t_.cols());
        next.topRows(r + 1) = t_.topRows(r + 1);
        next.bottomRows(n - r - 2) = t_.bottomRows(n - r - 2);
        t_.swap(next);
        basis_.erase(basis_.begin() + r);
    }

private:
    Eigen::MatrixXd t_;
    std::vector<int> basis_;
};

} // namespace

LpResult simplex_maximize(const DenseLp& lp)
{
    const int n = lp.variables();
    const int m_ub = static_cast<int>(lp.b_ub.size());
    const int m_eq = static_cast<int>(lp.b_eq.size());
    if (n == 0)
        throw std::invalid_argument("simplex_maximize: no variables");
    if ((m_ub > 0 && (lp.a_ub.rows() != m_ub || lp.a_ub.cols() != n)) ||
        (m_eq > 0 && (lp.a_eq.rows() != m_eq || lp.a_eq.cols() != n)))
        throw std::invalid_argument("simplex_maximize: inconsistent dimensions");

    const int m = m_ub + m_eq;
    const int n_struct = n + m_ub;  // decision variables and slacks

    // Equality form rows [A | S] = b before sign normalisation.
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, n_struct);
    Eigen::VectorXd b(m);
    if (m_ub > 0) {
        rows.topLeftCorner(m_ub, n) = lp.a_ub;
        rows.block(0, n, m_ub, m_ub).setIdentity();
        b.head(m_ub) = lp.b_ub;
    }
    if (m_eq > 0) {
        rows.bottomLeftCorner(m_eq, n) = lp.a_eq;
        b.tail(m_eq) = lp.b_eq;
    }
    const Eigen::MatrixXd original_rows = rows;
    const Eigen::VectorXd original_b = b;

    std::vector<int> art_row;
    for (int i = 0; i < m; ++i) {
        const double scale = rows.row(i).cwiseAbs().maxCoeff();
        if (scale > 0.0) {
            rows.row(i) /= scale;
            b[i] /= scale;
        }
        if (b[i] < 0.0) {
            rows.row(i) *= -1.0;
            b[i] *= -1.0;
        }
        const bool slack_basic = i < m_ub && rows(i, n + i) > 0.0;
        if (!slack_basic)
            art_row.push_back(i);
    }

    const int n_art = static_cast<int>(art_row.size());
    const int n_cols = n_struct + n_art;
    Tableau tab(m, n_cols);
    for (int i = 0; i < m; ++i) {
        tab.raw().block(i + 1, 0, 1, n_struct) = rows.row(i);
        tab.rhs(i) = b[i];
        if (i < m_ub && rows(i, n + i) > 0.0) {
            // slack already has a positive unit-scaled column; normalise to 1
            const double s = rows(i, n + i);
            tab.raw().row(i + 1) /= s;
            tab.basis()[i] = n + i;
        }
    }
    for (int k = 0; k < n_art; ++k) {
        tab.a(art_row[k], n_struct + k) = 1.0;
        tab.basis()[art_row[k]] = n_struct + k;
    }

    LpResult result;
    std::vector<bool> allowed(n_cols, true);

    if (n_art > 0) {
        Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n_cols);
        phase1.tail(n_art).setConstant(-1.0);
        tab.set_objective(phase1);
        tab.optimize(allowed, result.iterations);
        if (tab.value() < -kFeasTol * std::max(1.0, static_cast<double>(m))) {
            result.status = LpStatus::Infeasible;
            return result;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        for (int i = tab.rows() - 1; i >= 0; --i) {
            if (tab.basis()[i] < n_struct)
                continue;
            int col = -1;
            for (int j = 0; j < n_struct; ++j) {
                if (std::abs(tab.a(i, j)) > 1e-9) {
                    col = j;
                    break;
                }
            }
            if (col >= 0)
                tab.pivot(i, col);
            else
                tab.drop_row(i);
        }
        for (int k = 0; k < n_art; ++k)
            allowed[n_struct + k] = false;
    }

    Eigen::VectorXd cost = Eigen::VectorXd::Zero(n_cols);
    cost.head(n) = lp.c;
    tab.set_objective(cost);
    if (!tab.optimize(allowed, result.iterations)) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    Eigen::VectorXd z = Eigen::VectorXd::Zero(n_struct);
    for (int i = 0; i < tab.rows(); ++i) {
        const int col = tab.basis()[i];
        if (col < n_struct)
            z[col] = std::max(0.0, tab.rhs(i));
    }

    // Re-solve the basic variables against the original constraint rows.
    std::vector<int> basic;
    for (int i = 0; i < tab.rows(); ++i) {
        if (tab.basis()[i] < n_struct)
            basic.push_back(tab.basis()[i]);
    }
    if (!basic.empty()) {
        Eigen::MatrixXd bmat(m, static_cast<Eigen::Index>(basic.size()));
        for (std::size_t k = 0; k < basic.size(); ++k)
            bmat.col(static_cast<Eigen::Index>(k)) = original_rows.col(basic[k]);
        const Eigen::VectorXd xb = bmat.colPivHouseholderQr().solve(original_b);
        Eigen::VectorXd refined = Eigen::VectorXd::Zero(n_struct);
        bool ok = true;
        for (std::size_t k = 0; k < basic.size(); ++k) {
            const double v = xb[static_cast<Eigen::Index>(k)];
            if (!std::isfinite(v) || v < -1e-9) {
                ok = false;
                break;
            }
            refined[basic[k]] = std::max(0.0, v);
        }
        if (ok) {
            const double r_new = (original_rows * refined - original_b).cwiseAbs().maxCoeff();
            const double r_old = (original_rows * z - original_b).cwiseAbs().maxCoeff();
            if (r_new <= r_old)
                z = refined;
        }
    }

    result.status = LpStatus::Optimal;
    result.x = z.head(n);
    result.objective = lp.c.dot(result.x);
    return result;
}

} // namespace isac
