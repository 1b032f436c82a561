#include "prophet/lp_oracle.hpp"

#include <cmath>
#include <cstdio>

namespace prophet {

namespace {

// (1 - x)^p computed in log space; 0^0 = 1.
double pow1m(double x, double p)
{
    if (p == 0)
        return 1.0;
    if (x >= 1)
        return 0.0;
    return std::exp(p * std::log1p(-x));
}

void check_size(const WindowPlan& plan, int m)
{
    plan.validate();
    if (m < plan.k)
        throw LpSizeError("discretization needs m >= k");
    if (m > lp_max_m || long(plan.k) * m > lp_max_km)
        throw LpSizeError("discretization exceeds the size caps m <= 500, k*m <= 2000");
}

// c_{t,i} = (1 - (1-i/m)^tau) / (i/m), p_{t,i} = (1-i/m)^tau.
struct Coefficients {
    double c, p;
};

Coefficients coeff(long tau, int i, int m)
{
    const double x = double(i) / m;
    const double p = pow1m(x, double(tau));
    return {(1 - p) / x, p};
}

std::string label(const char* base, int a) { return std::string(base) + "_" + std::to_string(a); }
std::string label(const char* base, int a, int b)
{
    return std::string(base) + "_" + std::to_string(a) + "_" + std::to_string(b);
}

} // namespace

DiscretizedLP build_D(const WindowPlan& plan, int m)
{
    check_size(plan, m);
    const int k = plan.k;
    const double n = double(plan.n);
    DiscretizedLP out;
    out.orientation = LpOrientation::minimize_D;
    out.plan = plan;
    out.m = m;

    const int vars = k + m + 1;
    const int nrows = k * m + 1 + m;
    auto& lp = out.lp;
    lp.A = Eigen::MatrixXd::Zero(nrows, vars);
    lp.b = Eigen::VectorXd::Zero(nrows);
    lp.c = Eigen::VectorXd::Zero(vars);
    lp.c(0) = 1;
    lp.maximize = false;
    lp.sense.assign(std::size_t(nrows), RowSense::ge);

    for (int t = 1; t <= k; ++t)
        out.variables.push_back(label("d", t));
    for (int l = 0; l <= m; ++l)
        out.variables.push_back(label("f", l));
    auto f = [k](int l) { return k + l; };

    int r = 0;
    for (int t = 1; t <= k; ++t)
        for (int i = 1; i <= m; ++i, ++r) {
            const auto [c, p] = coeff(plan.tau[t - 1], i, m);
            lp.A(r, t - 1) = 1;
            for (int l = 0; l <= i; ++l)
                lp.A(r, f(l)) = -c / m;
            if (t < k)
                lp.A(r, t) = -p;
            out.rows.push_back(label("dyn", t, i));
        }
    for (int l = 0; l <= m; ++l)
        lp.A(r, f(l)) = n * pow1m(double(l) / m, n - 1) / m;
    lp.b(r) = 1;
    lp.sense[r] = RowSense::eq;
    out.rows.push_back("norm");
    ++r;
    for (int l = 1; l <= m; ++l, ++r) {
        lp.A(r, f(l - 1)) = 1;
        lp.A(r, f(l)) = -1;
        out.rows.push_back(label("mono", l));
    }
    return out;
}

DiscretizedLP build_P(const WindowPlan& plan, int m)
{
    check_size(plan, m);
    const int k = plan.k;
    const double n = double(plan.n);
    DiscretizedLP out;
    out.orientation = LpOrientation::maximize_P;
    out.plan = plan;
    out.m = m;

    auto alpha = [m](int t, int i) { return (t - 1) * m + (i - 1); };
    const int v = k * m;
    auto eta = [v](int l) { return v + 1 + l; };
    const int vars = k * m + 1 + (m + 2);
    const int nrows = 1 + (k - 1) + (m + 1) + 2;

    auto& lp = out.lp;
    lp.A = Eigen::MatrixXd::Zero(nrows, vars);
    lp.b = Eigen::VectorXd::Zero(nrows);
    lp.c = Eigen::VectorXd::Zero(vars);
    lp.c(v) = 1;
    lp.maximize = true;
    lp.sense.assign(std::size_t(nrows), RowSense::le);

    for (int t = 1; t <= k; ++t)
        for (int i = 1; i <= m; ++i)
            out.variables.push_back(label("alpha", t, i));
    out.variables.push_back("v");
    for (int l = 0; l <= m + 1; ++l)
        out.variables.push_back(label("eta", l));

    int r = 0;
    for (int i = 1; i <= m; ++i)
        lp.A(r, alpha(1, i)) = 1;
    lp.b(r) = 1;
    out.rows.push_back("start");
    ++r;
    for (int t = 1; t < k; ++t, ++r) {
        for (int i = 1; i <= m; ++i) {
            lp.A(r, alpha(t + 1, i)) = 1;
            lp.A(r, alpha(t, i)) = -coeff(plan.tau[t - 1], i, m).p;
        }
        out.rows.push_back(label("flow", t));
    }
    for (int l = 0; l <= m; ++l, ++r) {
        lp.A(r, v) = n / m * pow1m(double(l) / m, n - 1);
        lp.A(r, eta(l + 1)) += 1;
        lp.A(r, eta(l)) -= 1;
        for (int t = 1; t <= k; ++t)
            for (int i = std::max(l, 1); i <= m; ++i)
                lp.A(r, alpha(t, i)) -= coeff(plan.tau[t - 1], i, m).c / m;
        out.rows.push_back(label("value", l));
    }
    lp.A(r, eta(0)) = 1;
    lp.sense[r] = RowSense::eq;
    out.rows.push_back("eta_first");
    ++r;
    lp.A(r, eta(m + 1)) = 1;
    lp.sense[r] = RowSense::eq;
    out.rows.push_back("eta_last");
    return out;
}

SimplexResult<double> solve(const DiscretizedLP& lp, long iteration_limit)
{
    return solve_simplex(lp.lp, iteration_limit);
}

void write_lp_text(std::ostream& os, const DiscretizedLP& d)
{
    const auto& lp = d.lp;
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    auto write_row = [&](Eigen::Index i) {
        bool first = true;
        for (Eigen::Index j = 0; j < lp.A.cols(); ++j) {
            const double a = lp.A(i, j);
            if (a == 0)
                continue;
            os << (a < 0 ? " - " : (first ? " " : " + ")) << num(std::abs(a)) << ' ' << d.variables[j];
            first = false;
        }
        if (first)
            os << " 0 " << d.variables.front();
    };

    os << "\\ discretized " << (d.orientation == LpOrientation::minimize_D ? "D" : "P") << " n=" << d.plan.n
       << " k=" << d.plan.k << " m=" << d.m << '\n';
    os << (lp.maximize ? "Maximize\n" : "Minimize\n") << " obj:";
    for (Eigen::Index j = 0; j < lp.c.size(); ++j)
        if (lp.c(j) != 0)
            os << " + " << num(lp.c(j)) << ' ' << d.variables[j];
    os << "\nSubject To\n";
    for (Eigen::Index i = 0; i < lp.A.rows(); ++i) {
        os << ' ' << d.rows[i] << ':';
        write_row(i);
        const char* op = lp.sense[i] == RowSense::le ? " <= " : lp.sense[i] == RowSense::ge ? " >= " : " = ";
        os << op << num(lp.b(i)) << '\n';
    }
    os << "Bounds\n";
    for (const auto& v : d.variables)
        os << ' ' << v << " >= 0\n";
    os << "End\n";
}

const char* to_string(SimplexStatus s)
{
    switch (s) {
    case SimplexStatus::optimal:
        return "optimal";
    case SimplexStatus::infeasible:
        return "infeasible";
    case SimplexStatus::unbounded:
        return "unbounded";
    case SimplexStatus::iteration_limit:
        return "iteration-limit";
    }
    return "unknown";
}

nlohmann::json to_json(const SimplexResult<double>& r)
{
    return {{"status", to_string(r.status)},
            {"objective", r.objective},
            {"iterations", r.iterations},
            {"primal_residual", r.primal_residual},
            {"dual_residual", r.dual_residual},
            {"complementarity", r.complementarity}};
}

} // namespace prophet
