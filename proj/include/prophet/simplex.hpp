#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace prophet {

enum class RowSense { le, ge, eq };

enum class SimplexStatus { optimal, infeasible, unbounded, iteration_limit };

// min (or max) c'x  s.t.  A x (sense) b,  x >= 0.
template <typename Scalar>
struct LinearProgram {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Matrix A;
    Vector b;
    std::vector<RowSense> sense;
    Vector c;
    bool maximize = false;
};

template <typename Scalar>
struct SimplexResult {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    SimplexStatus status = SimplexStatus::iteration_limit;
    Scalar objective = 0;
    Vector x;
    Vector y; // row duals in the orientation of the problem as posed
    long iterations = 0;
    Scalar primal_residual = 0;
    Scalar dual_residual = 0;
    Scalar complementarity = 0;
};

namespace detail {

template <typename Scalar>
class Tableau {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    // Rows are normalized so b >= 0; a >= row with b = 0 becomes a <= row.
    explicit Tableau(const LinearProgram<Scalar>& lp) : rows_(lp.A.rows()), structural_(lp.A.cols())
    {
        const Eigen::Index m = rows_;
        flipped_.assign(std::size_t(m), false);
        std::vector<RowSense> sense(lp.sense);
        for (Eigen::Index i = 0; i < m; ++i) {
            const bool flip = lp.b(i) < 0 || (lp.b(i) == 0 && sense[i] == RowSense::ge);
            flipped_[i] = flip;
            if (flip && sense[i] != RowSense::eq)
                sense[i] = sense[i] == RowSense::le ? RowSense::ge : RowSense::le;
        }
        Eigen::Index slacks = 0, arts = 0;
        for (auto s : sense) {
            slacks += s != RowSense::eq;
            arts += s != RowSense::le;
        }
        cols_ = structural_ + slacks + arts;
        first_art_ = structural_ + slacks;
        T_ = Matrix::Zero(m + 1, cols_ + 1);
        basis_.assign(std::size_t(m), 0);
        unit_col_.assign(std::size_t(m), 0);
        Eigen::Index next_slack = structural_, next_art = first_art_;
        for (Eigen::Index i = 0; i < m; ++i) {
            const Scalar sign = flipped_[i] ? Scalar(-1) : Scalar(1);
            T_.row(i).head(structural_) = sign * lp.A.row(i);
            T_(i, cols_) = sign * lp.b(i);
            if (sense[i] == RowSense::le) {
                T_(i, next_slack) = 1;
                basis_[i] = unit_col_[i] = next_slack++;
            } else {
                if (sense[i] == RowSense::ge)
                    T_(i, next_slack++) = -1;
                T_(i, next_art) = 1;
                basis_[i] = unit_col_[i] = next_art++;
            }
        }
    }

    template <typename Allowed>
    SimplexStatus run(Allowed&& allowed, long& iterations, long limit)
    {
        const Scalar cost_tol = Scalar(1e-10), pivot_tol = Scalar(1e-9);
        int degenerate_run = 0;
        while (true) {
            const bool bland = degenerate_run > 50;
            Eigen::Index enter = -1;
            Scalar best = -cost_tol;
            for (Eigen::Index j = 0; j < cols_; ++j) {
                if (!allowed(j))
                    continue;
                const Scalar r = T_(rows_, j);
                if (r < best) {
                    enter = j;
                    if (bland)
                        break;
                    best = r;
                }
            }
            if (enter < 0)
                return SimplexStatus::optimal;
            if (iterations >= limit)
                return SimplexStatus::iteration_limit;

            Scalar ratio = std::numeric_limits<Scalar>::infinity();
            for (Eigen::Index i = 0; i < rows_; ++i)
                if (T_(i, enter) > pivot_tol)
                    ratio = std::min(ratio, T_(i, cols_) / T_(i, enter));
            // Ties go to the smallest basic index (Bland).
            Eigen::Index leave = -1;
            for (Eigen::Index i = 0; i < rows_; ++i)
                if (T_(i, enter) > pivot_tol && T_(i, cols_) / T_(i, enter) <= ratio + Scalar(1e-12) &&
                    (leave < 0 || basis_[i] < basis_[leave]))
                    leave = i;
            if (leave < 0)
                return SimplexStatus::unbounded;
            degenerate_run = ratio <= Scalar(1e-12) ? degenerate_run + 1 : 0;
            pivot(leave, enter);
            ++iterations;
        }
    }

    void pivot(Eigen::Index r, Eigen::Index c)
    {
        T_.row(r) /= T_(r, c);
        Vector col = T_.col(c);
        col(r) = 0;
        T_.noalias() -= col * T_.row(r);
        T_.col(c).setZero();
        T_(r, c) = 1;
        basis_[r] = c;
    }

    void set_phase1_objective()
    {
        T_.row(rows_).setZero();
        for (Eigen::Index i = 0; i < rows_; ++i)
            if (basis_[i] >= first_art_)
                T_.row(rows_) -= T_.row(i);
        T_.row(rows_).segment(first_art_, cols_ - first_art_).setZero();
    }

    void set_phase2_objective(const Vector& c)
    {
        T_.row(rows_).setZero();
        T_.row(rows_).head(structural_) = c.transpose();
        for (Eigen::Index i = 0; i < rows_; ++i) {
            const Scalar cb = basis_[i] < structural_ ? c(basis_[i]) : Scalar(0);
            if (cb != 0)
                T_.row(rows_) -= cb * T_.row(i);
        }
    }

    // Pivots basic artificials (at level zero) out where possible.
    void expel_artificials()
    {
        for (Eigen::Index i = 0; i < rows_; ++i) {
            if (basis_[i] < first_art_)
                continue;
            for (Eigen::Index j = 0; j < first_art_; ++j)
                if (std::abs(T_(i, j)) > Scalar(1e-9)) {
                    pivot(i, j);
                    break;
                }
        }
    }

    Scalar objective_value() const { return -T_(rows_, cols_); }
    Eigen::Index first_artificial() const { return first_art_; }

    Vector primal() const
    {
        Vector x = Vector::Zero(structural_);
        for (Eigen::Index i = 0; i < rows_; ++i)
            if (basis_[i] < structural_)
                x(basis_[i]) = T_(i, cols_);
        return x;
    }

    // Duals of the original rows for the minimization form.
    Vector duals() const
    {
        Vector y(rows_);
        for (Eigen::Index i = 0; i < rows_; ++i) {
            const Scalar yi = -T_(rows_, unit_col_[i]);
            y(i) = flipped_[i] ? -yi : yi;
        }
        return y;
    }

private:
    Eigen::Index rows_, structural_, cols_ = 0, first_art_ = 0;
    Matrix T_;
    std::vector<Eigen::Index> basis_;
    // Initial +1 slack or artificial of each row; its reduced cost is minus the row dual.
    std::vector<Eigen::Index> unit_col_;
    std::vector<bool> flipped_;
};

} // namespace detail

// Two-phase dense tableau simplex. Entering column by largest reduced cost,
// switching to Bland's rule after a run of degenerate pivots.
template <typename Scalar>
SimplexResult<Scalar> solve_simplex(const LinearProgram<Scalar>& lp, long iteration_limit = 200000)
{
    using Vector = typename SimplexResult<Scalar>::Vector;
    SimplexResult<Scalar> out;
    const Vector c = lp.maximize ? Vector(-lp.c) : lp.c;

    detail::Tableau<Scalar> tab(lp);
    const auto first_art = tab.first_artificial();
    tab.set_phase1_objective();
    auto status = tab.run([](Eigen::Index) { return true; }, out.iterations, iteration_limit);
    if (status == SimplexStatus::iteration_limit) {
        out.status = status;
        out.objective = std::numeric_limits<Scalar>::quiet_NaN();
        return out;
    }
    if (tab.objective_value() > Scalar(1e-9)) {
        out.status = SimplexStatus::infeasible;
        return out;
    }
    tab.expel_artificials();
    tab.set_phase2_objective(c);
    status = tab.run([first_art](Eigen::Index j) { return j < first_art; }, out.iterations, iteration_limit);
    out.status = status;
    out.x = tab.primal();
    out.objective = lp.maximize ? -tab.objective_value() : tab.objective_value();
    if (status == SimplexStatus::unbounded)
        return out;

    Vector y = tab.duals();
    // KKT residuals in the minimization form.
    const Vector ax = lp.A * out.x;
    const Vector reduced = c - lp.A.transpose() * y;
    Scalar primal = 0, dual = 0, comp = 0;
    for (Eigen::Index i = 0; i < lp.A.rows(); ++i) {
        const Scalar slack = ax(i) - lp.b(i);
        switch (lp.sense[i]) {
        case RowSense::le:
            primal = std::max(primal, slack);
            dual = std::max(dual, y(i));
            break;
        case RowSense::ge:
            primal = std::max(primal, -slack);
            dual = std::max(dual, -y(i));
            break;
        case RowSense::eq:
            primal = std::max(primal, std::abs(slack));
            break;
        }
        comp = std::max(comp, std::abs(y(i) * slack));
    }
    for (Eigen::Index j = 0; j < lp.A.cols(); ++j) {
        primal = std::max(primal, -out.x(j));
        dual = std::max(dual, -reduced(j));
        comp = std::max(comp, std::abs(out.x(j) * reduced(j)));
    }
    out.primal_residual = primal;
    out.dual_residual = dual;
    out.complementarity = comp;
    out.y = lp.maximize ? Vector(-y) : y;
    return out;
}

} // namespace prophet
