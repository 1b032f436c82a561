#include "prophet/infinite_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "prophet/quadrature.hpp"
#include "prophet/roots.hpp"

namespace prophet {

namespace {

const QuadratureSpec<double> h_spec{1e-13, 1e-13, 1000000};
constexpr double y_tol = 1e-15;

// -log s / (1 - s), with its limit 1 at s = 1.
double log_ratio(double s)
{
    const double w = 1.0 - s;
    if (w < 1e-8)
        return 1.0 + w / 2 + w * w / 3;
    return -std::log1p(-w) / w;
}

// y (log y - 1), with Y(0) = 0.
double Y(double y) { return y > 0 ? y * (std::log(y) - 1.0) : 0.0; }

double h_impl(double phi, double x)
{
    if (!(x >= 0 && x <= 1))
        throw std::invalid_argument("H argument must lie in [0, 1]");
    if (x == 0)
        return 0.0;
    // s = y^phi: integrand p^2 s^{p-1} (-log s)/(1-s), p = 1/phi.
    const double p = 1.0 / phi;
    auto g = [p](double s) { return p * p * std::pow(s, p - 1) * log_ratio(s); };
    return integrate(g, 0.0, std::pow(x, phi), h_spec);
}

// Slack below which a constraint counts as met; the H values carry
// quadrature error of about this size.
constexpr double feasibility_tol = 1e-12;

void check_v(double v)
{
    if (!(v > 0) || !std::isfinite(v))
        throw std::invalid_argument("v must be positive");
}

// v -> feasibility is monotone (feasible below the optimum). Returns the
// feasible side of a bracket of width <= delta.
template <typename Attempt>
auto bisect_feasible(Attempt&& attempt, double lo, double hi, double delta)
{
    auto best = attempt(lo);
    while (!best.feasible && lo > 0.05) {
        lo -= 0.05;
        best = attempt(lo);
    }
    if (!best.feasible)
        throw BracketError("no feasible v found in the lower bracket");
    if (attempt(hi).feasible)
        throw BracketError("upper end of the v bracket is feasible");
    while (hi - lo > delta) {
        const double mid = lo + (hi - lo) / 2;
        auto r = attempt(mid);
        if (r.feasible) {
            lo = mid;
            best = std::move(r);
        } else {
            hi = mid;
        }
    }
    return best;
}

struct ThetaAttempt {
    bool feasible = false;
    TwoThresholdTheta point;
};

ThetaAttempt theta_attempt(double theta, double v, double h_theta_1)
{
    ThetaAttempt out;
    out.point.theta = theta;
    out.point.v = v;
    auto c1 = [&](double y) { return 1.0 / v - h_theta_1 + h_impl(theta, y); };
    const double y1 = bisect_threshold([&](double y) { return c1(y) >= 0; }, 0.0, 1.0, y_tol);
    out.point.y1 = y1;
    out.point.residual1 = c1(y1);
    out.point.residual2 = h_theta_1 - h_impl(theta, y1) - h_impl(1 - theta, y1) - 1.0 - Y(y1);
    out.feasible = out.point.residual2 >= 0;
    return out;
}

} // namespace

double H(int k, double x)
{
    if (k < 1)
        throw std::invalid_argument("k must be >= 1");
    return h_impl(1.0 / k, x);
}

double H_phi(double phi, double x)
{
    if (!(phi > 0 && phi <= 1))
        throw std::invalid_argument("phi must lie in (0, 1]");
    return h_impl(phi, x);
}

BreakpointAttempt breakpoints_given_v(int k, double v)
{
    if (k < 1)
        throw std::invalid_argument("k must be >= 1");
    check_v(v);
    BreakpointAttempt out;
    auto& pts = out.points;
    pts.k = k;
    pts.v = v;
    pts.y = {1.0};

    const double phi = 1.0 / k;
    std::vector<double> hy = {h_impl(phi, 1.0)};

    for (int t = 1; t <= k; ++t) {
        std::function<double(double)> c;
        if (t == 1) {
            const double h1 = hy[0];
            c = [=](double y) { return 1.0 / v - h1 + h_impl(phi, y); };
        } else {
            const double base = hy[t - 2] - 2 * hy[t - 1] + Y(pts.y[t - 2]) - Y(pts.y[t - 1]);
            c = [=](double y) { return base + h_impl(phi, y); };
        }
        if (t == k) {
            const double r = c(0.0);
            pts.residuals.push_back(r);
            pts.y.push_back(0.0);
            if (r < -feasibility_tol) {
                out.failed_stage = t;
                return out;
            }
            break;
        }
        const double prev = pts.y[t - 1];
        if (c(prev) < -feasibility_tol) {
            pts.residuals.push_back(c(prev));
            out.failed_stage = t;
            return out;
        }
        const double yt = bisect_threshold([&](double y) { return c(y) >= 0; }, 0.0, prev, y_tol);
        pts.y.push_back(yt);
        pts.residuals.push_back(c(yt));
        hy.push_back(h_impl(phi, yt));
    }
    out.feasible = true;
    return out;
}

InfiniteBreakpoints solve_v_infinity(int k, double delta)
{
    if (k < 1 || k > max_infinite_k)
        throw std::invalid_argument("k must lie in [1, 64]");
    if (!(delta > 0))
        throw std::invalid_argument("delta must be positive");
    const double lo = 6.0 / (std::numbers::pi * std::numbers::pi) - 0.01;
    auto best = bisect_feasible([k](double v) { return breakpoints_given_v(k, v); }, lo, 0.7453, delta);
    return best.points;
}

TwoThresholdTheta v_infinity_2_theta(double theta, double delta)
{
    if (!(theta >= 0.5 && theta < 1))
        throw std::invalid_argument("theta must lie in [1/2, 1)");
    if (!(delta > 0))
        throw std::invalid_argument("delta must be positive");
    const double h_theta_1 = h_impl(theta, 1.0);
    auto best = bisect_feasible([&](double v) { return theta_attempt(theta, v, h_theta_1); }, 0.55, 0.7453, delta);
    return best.point;
}

ThetaSweep optimize_theta(int r, double delta)
{
    if (r < 2)
        throw std::invalid_argument("theta grid resolution must be >= 2");
    const int first = (r + 1) / 2;
    const int count = r - first;
    ThetaSweep out;
    out.grid.resize(count);

    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), count));
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (int i = int(w); i < count; i += int(workers))
                out.grid[i] = v_infinity_2_theta(double(first + i) / r, delta);
        }));
    for (auto& j : jobs)
        j.get();

    double vmax = out.grid.front().v;
    for (const auto& g : out.grid)
        vmax = std::max(vmax, g.v);
    for (const auto& g : out.grid)
        if (g.v >= vmax - delta) {
            out.best = g;
            break;
        }
    out.theta = out.best.theta;
    return out;
}

nlohmann::json to_json(const InfiniteBreakpoints& b)
{
    return {{"k", b.k}, {"v", b.v}, {"y", b.y}, {"residuals", b.residuals}};
}

nlohmann::json to_json(const TwoThresholdTheta& t)
{
    return {{"theta", t.theta},
            {"v", t.v},
            {"y1", t.y1},
            {"residuals", {t.residual1, t.residual2}}};
}

} // namespace prophet
