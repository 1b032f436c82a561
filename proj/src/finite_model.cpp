#include "prophet/finite_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "prophet/quadrature.hpp"
#include "prophet/roots.hpp"

namespace prophet {

namespace {

// (1-q)^m for integer m >= 0, stable for large m.
double pow1m(double q, double m)
{
    if (m == 0)
        return 1.0;
    if (q >= 1)
        return 0.0;
    return std::exp(m * std::log1p(-q));
}

// 1 - (1-q)^m
double one_minus_pow1m(double q, double m)
{
    if (q >= 1)
        return 1.0;
    return -std::expm1(m * std::log1p(-q));
}

// q / (1 - (1-q)^tau), with limit 1/tau at q = 0.
double q_over_mass(double q, double tau)
{
    if (q <= 0)
        return 1.0 / tau;
    return q / one_minus_pow1m(q, tau);
}

// Recursion integrand q (1-q)^{n-2} / (1 - (1-q)^tau).
struct StageIntegrand {
    double n, tau;
    double operator()(double q) const { return pow1m(q, n - 2) * q_over_mass(q, tau); }
};

// int_0^eps q (1-q)^{n-2} dq.
double mass_below(double eps, double n)
{
    if (eps <= 0)
        return 0.0;
    const double tail = pow1m(eps, n - 1) * (1 + (n - 1) * eps);
    return (1 - tail) / (n * (n - 1));
}

class StageQuadrature {
public:
    explicit StageQuadrature(long n) : n_(double(n))
    {
        const double scale = 1.0 / (n_ * (n_ - 1));
        spec_ = {1e-15 * scale, 1e-12, 1000000};
        // The integrand lives on a band of width ~1/n; split geometrically
        // around it so no panel straddles the peak.
        for (double p = 1.0 / (64 * n_); p < 1; p *= 2)
            grid_.push_back(p);
    }

    double operator()(double tau, double a, double b) const
    {
        if (b <= a)
            return 0.0;
        std::vector<double> pts{a};
        for (double p : grid_)
            if (p > a && p < b)
                pts.push_back(p);
        pts.push_back(b);
        return integrate(StageIntegrand{n_, tau}, pts, spec_);
    }

private:
    double n_;
    QuadratureSpec<double> spec_;
    std::vector<double> grid_;
};

} // namespace

WindowPlan WindowPlan::equal(long n, int k)
{
    if (n < 1)
        throw PlanError("n must be >= 1");
    if (k < 1 || k > n)
        throw PlanError("k must lie in [1, n]");
    const long tau = (n + k - 1) / k;
    const long sigma = n - long(k - 1) * tau;
    if (sigma < 1)
        throw PlanError("equal windows leave the last window empty (n=" + std::to_string(n) +
                        ", k=" + std::to_string(k) + ")");
    WindowPlan p{n, k, std::vector<long>(std::size_t(k), tau)};
    p.tau.back() = sigma;
    return p;
}

WindowPlan WindowPlan::two_window(long n, double theta)
{
    if (n < 2)
        throw PlanError("two windows need n >= 2");
    if (!(theta > 0 && theta < 1))
        throw PlanError("theta must lie in (0, 1)");
    const long first = long(std::ceil(theta * double(n)));
    WindowPlan p{n, 2, {first, n - first}};
    p.validate();
    return p;
}

void WindowPlan::validate() const
{
    if (n < 1 || k < 1 || k > n)
        throw PlanError("window plan needs 1 <= k <= n");
    if (tau.size() != std::size_t(k))
        throw PlanError("window plan needs exactly k windows");
    long total = 0;
    for (long t : tau) {
        if (t < 1)
            throw PlanError("every window needs at least one draw");
        total += t;
    }
    if (total != n)
        throw PlanError("window lengths must sum to n");
}

double gamma_n_1(long n)
{
    if (n < 1)
        throw std::invalid_argument("n must be >= 1");
    const double nd = double(n);
    return -std::expm1(nd * std::log1p(-1.0 / nd));
}

EpsilonAttempt epsilon_schedule(const WindowPlan& plan, double v)
{
    plan.validate();
    if (plan.n < 2)
        throw PlanError("the relaxation needs n >= 2");
    if (!(v > 0) || !std::isfinite(v))
        throw std::invalid_argument("v must be positive");

    const double n = double(plan.n);
    const double c = 1.0 / (v * n * (n - 1));
    const StageQuadrature integral(plan.n);

    EpsilonAttempt out;
    auto& s = out.schedule;
    s.plan = plan;
    s.v = v;
    s.eps = {0.0};

    for (int t = 1; t <= plan.k; ++t) {
        const double prev = s.eps.back();
        const double tau = double(plan.tau[t - 1]);
        const double rhs = c - mass_below(prev, n);
        if (rhs < 0) {
            out.failed_stage = t;
            out.kind = Infeasibility::v_too_large;
            return out;
        }
        const double available = integral(tau, prev, 1.0);
        if (t == plan.k)
            s.final_residual = available - rhs;
        if (available - rhs < -1e-9 * rhs) {
            out.failed_stage = t;
            out.kind = Infeasibility::v_too_small;
            return out;
        }
        if (available - rhs <= 1e-9 * rhs) {
            s.eps.push_back(1.0);
            continue;
        }
        auto g = [&](double x) { return integral(tau, prev, x) - rhs; };
        s.eps.push_back(find_root_monotone(g, RootBracket<double>{prev, 1.0}, 1e-15));
    }
    out.feasible = true;
    return out;
}

EpsilonSchedule solve_v_finite(const WindowPlan& plan, double delta)
{
    if (!(delta > 0))
        throw std::invalid_argument("delta must be positive");
    // Signed last-stage residual; earlier-stage failures get their sign
    // from the infeasibility kind.
    auto sign_of = [&](double v) {
        const auto r = epsilon_schedule(plan, v);
        if (r.feasible)
            return r.schedule.final_residual;
        return r.kind == Infeasibility::v_too_small ? -1.0 : 1.0;
    };
    double lo = 0.5;
    while (sign_of(lo) >= 0) {
        lo /= 2;
        if (lo < 1e-6)
            throw BracketError("could not bracket v from below");
    }
    const double v = find_root_monotone(sign_of, RootBracket<double>{lo, 1.0}, delta);
    auto r = epsilon_schedule(plan, v);
    if (!r.feasible) {
        // Step to the feasible side of the final bracket.
        r = epsilon_schedule(plan, v + delta);
        if (!r.feasible)
            throw BracketError("optimal v could not be certified");
    }
    r.schedule.eps.back() = 1.0;
    return r.schedule;
}

double DualCertificate::F_piece(int t, double q) const
{
    const double tt = double(tau[t - 1]);
    return (a[t - 1] - a[t] * pow1m(q, tt)) * q_over_mass(q, tt);
}

double DualCertificate::F(double q) const
{
    const int k = int(tau.size());
    int t = 1;
    while (t < k && q >= eps[t])
        ++t;
    return F_piece(t, q);
}

double DualCertificate::g(int t, double q) const
{
    const double tt = double(tau[t - 1]);
    const double next = std::size_t(t) < d.size() ? d[t] : 0.0;
    return F(q) / q_over_mass(q, tt) + pow1m(q, tt) * next;
}

DualCertificate dual_certificate(const EpsilonSchedule& schedule)
{
    const auto& plan = schedule.plan;
    const int k = plan.k;
    if (schedule.eps.size() != std::size_t(k + 1) || std::abs(schedule.eps.back() - 1.0) > 1e-8)
        throw CertificateError("dual certificate needs an optimal schedule (eps_k = 1)");

    DualCertificate cert;
    cert.n = plan.n;
    cert.tau = plan.tau;
    cert.eps = schedule.eps;

    for (int r = 1; r <= k - 1; ++r) {
        const double e = cert.eps[r];
        const double next = double(plan.tau[r]);
        cert.h.push_back(pow1m(e, next) * one_minus_pow1m(e, double(plan.tau[r - 1])) /
                         one_minus_pow1m(e, next));
    }
    // tail[s] = sum_{j=s}^{k-1} prod_{r=j}^{k-1} h_r, s = 1..k
    std::vector<double> tail(std::size_t(k + 1), 0.0);
    double prod = 1.0;
    for (int s = k - 1; s >= 1; --s) {
        prod *= cert.h[s - 1];
        tail[s] = tail[s + 1] + prod;
    }
    cert.a.assign(std::size_t(k + 1), 0.0);
    for (int t = 1; t <= k; ++t)
        cert.a[t - 1] = schedule.v * (1 + tail[t]) / (1 + tail[1]);

    cert.d.assign(std::size_t(k), 0.0);
    for (int t = k; t >= 1; --t) {
        const double next = t < k ? cert.d[t] : 0.0;
        double best = double(plan.tau[t - 1]) * cert.F(0.0) + next;
        for (int s = 1; s <= k; ++s)
            best = std::max(best, cert.g(t, cert.eps[s]));
        cert.d[t - 1] = best;
    }
    return cert;
}

TwoThresholdExact two_threshold_exact()
{
    auto a1_of = [](double u) { return 1 - u / std::expm1(u); };
    auto exponent = [&](double theta, double u) { return a1_of(u) * theta + (u + 1) * (1 - theta); };
    auto implicit = [&](double theta, double u) {
        const double eu = std::exp(-u);
        const double E = std::exp(-exponent(theta, u));
        return -eu - u * eu - E * (1 - eu - u * eu) + std::exp(-a1_of(u) * theta);
    };
    auto solve_u = [&](double theta) {
        return find_root_monotone([&](double u) { return implicit(theta, u); }, RootBracket<double>{1e-3, 50.0},
                                  1e-13);
    };
    auto value = [&](double theta) { return -std::expm1(-exponent(theta, solve_u(theta))); };

    // Golden-section maximization of the value over theta.
    const double inv_phi = (std::sqrt(5.0) - 1) / 2;
    double lo = 0.3, hi = 0.9;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = value(x1);
        }
    }

    TwoThresholdExact out;
    out.theta = (lo + hi) / 2;
    out.u2 = solve_u(out.theta);
    out.a1 = a1_of(out.u2);
    out.a2 = out.u2 + 1;
    out.v_bar = -std::expm1(-exponent(out.theta, out.u2));
    out.implicit_residual = implicit(out.theta, out.u2);

    const double th = out.theta, u = out.u2, a1 = out.a1, a2 = out.a2;
    const double e1 = std::exp(-th * a1), g1 = -std::expm1(-th * a1) / a1;
    const double dg1 = (th * e1 * a1 - (1 - e1)) / (a1 * a1);
    const double e2 = std::exp(-(1 - th) * a2), g2 = -std::expm1(-(1 - th) * a2) / a2;
    const double dg2 = ((1 - th) * e2 * a2 - (1 - e2)) / (a2 * a2);

    Eigen::Matrix3d M;
    M << 1, -std::expm1(-u), std::exp(-u),
        dg1 - th * e1 * g2, g1 + a1 * dg1 - th * e1 * g2 * u, -th * e1 * g2 * (a2 - u),
        dg2, u * dg2, g2 + (a2 - u) * dg2;
    const Eigen::Vector3d rhs(1, 0, 0);
    const Eigen::Vector3d x = M.fullPivLu().solve(rhs);
    out.a = x(0);
    out.b = x(1);
    out.c = x(2);
    out.linear_residual = (M * x - rhs).cwiseAbs().maxCoeff();
    out.d2 = g2 * (out.a + out.b * u + out.c * (a2 - u));
    out.d1 = g1 * (out.a + out.b * a1) + e1 * out.d2;
    return out;
}

nlohmann::json to_json(const WindowPlan& p) { return {{"n", p.n}, {"k", p.k}, {"tau", p.tau}}; }

nlohmann::json to_json(const EpsilonSchedule& s)
{
    return {{"plan", to_json(s.plan)}, {"v", s.v}, {"eps", s.eps}, {"final_residual", s.final_residual}};
}

nlohmann::json to_json(const DualCertificate& c)
{
    return {{"n", c.n}, {"tau", c.tau}, {"eps", c.eps}, {"a", c.a}, {"h", c.h}, {"d", c.d}};
}

nlohmann::json to_json(const TwoThresholdExact& t)
{
    return {{"u2", t.u2},
            {"theta", t.theta},
            {"a1", t.a1},
            {"a2", t.a2},
            {"v_bar", t.v_bar},
            {"dual", {{"a", t.a}, {"b", t.b}, {"c", t.c}, {"d1", t.d1}, {"d2", t.d2}}},
            {"residuals", {{"implicit", t.implicit_residual}, {"linear", t.linear_residual}}}};
}

} // namespace prophet
