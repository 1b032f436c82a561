#include "prophet/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "prophet/infinite_model.hpp"
#include "prophet/quadrature.hpp"
#include "prophet/roots.hpp"

namespace prophet {

namespace {

// w (1 - log w), with limit 0 at w = 0.
double w_term(double w) { return w > 0 ? w * (1 - std::log(w)) : 0.0; }

double euler_step(double x, double beta, int k) { return std::max(0.0, x - (beta - 1 + w_term(x)) / k); }

} // namespace

double I(double beta)
{
    if (!(beta >= 1))
        throw std::invalid_argument("I(beta) needs beta >= 1");
    // The integrand behaves like 1/(w (1 - log w)) at beta = 1, which is not integrable.
    if (beta == 1)
        return std::numeric_limits<double>::infinity();
    auto f = [beta](double w) { return 1.0 / (beta - 1 + w_term(w)); };
    return integrate(f, 0.0, 1.0, QuadratureSpec<double>{1e-13, 1e-13, 1000000});
}

BetaBar beta_bar(double tol)
{
    if (!(tol > 0))
        throw std::invalid_argument("tolerance must be positive");
    const double beta = find_root_monotone([](double b) { return I(b) - 1; }, RootBracket<double>{1.25, 1.5}, tol);
    return {beta, 1 / beta};
}

EulerTrace euler_sequences(int k, double beta)
{
    if (k < 1)
        throw std::invalid_argument("k must be >= 1");
    if (!(beta >= 1.25))
        throw std::invalid_argument("beta* must be >= 1.25");
    EulerTrace e{k, beta, {1.0}, {1.0}};
    const double z_step = 1.0 / (std::pow(32.0 * k, 1.0 / k) * k);
    for (int t = 0; t < k; ++t) {
        e.x.push_back(euler_step(e.x.back(), beta, k));
        const double z = e.z.back();
        e.z.push_back(std::max(0.0, z - z_step * (beta - 1 + w_term(z))));
    }
    return e;
}

SandwichReport verify_sandwich(int k, double tol)
{
    if (k < 6)
        throw std::invalid_argument("sandwich bounds are checked for k >= 6");
    const auto opt = solve_v_infinity(k);
    const auto trace = euler_sequences(k, 1 / opt.v);
    const double width = 4 * std::log(32.0 * k) / k;

    SandwichReport rep;
    rep.k = k;
    rep.v = opt.v;
    for (int t = 0; t <= k; ++t) {
        SandwichRow row;
        row.t = t;
        row.x = trace.x[t];
        row.y = opt.y[t];
        row.z = trace.z[t];
        row.lower_margin = row.y - row.x;
        row.upper_margin = row.x + width - row.y;
        row.spread_margin = row.y - double(k - t) / (32.0 * k);
        row.z_margin = row.z - row.y;
        const bool ok = row.lower_margin >= -tol && row.upper_margin >= -tol && row.spread_margin >= -tol &&
                        row.z_margin >= -tol;
        if (!ok && rep.passed) {
            rep.passed = false;
            rep.first_failure = t;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

Bands asymptotic_bands(int k)
{
    if (k < 1)
        throw std::invalid_argument("k must be >= 1");
    const double g = beta_bar().gamma;
    const double l = std::log(32.0 * k) / k;
    return {g * (1 - 512 * l), g * (1 - 4 * l)};
}

nlohmann::json to_json(const SandwichReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"t", row.t},
                        {"x", row.x},
                        {"y", row.y},
                        {"z", row.z},
                        {"lower_margin", row.lower_margin},
                        {"upper_margin", row.upper_margin},
                        {"spread_margin", row.spread_margin},
                        {"z_margin", row.z_margin}});
    return {{"k", r.k}, {"v", r.v}, {"passed", r.passed}, {"first_failure", r.first_failure}, {"rows", rows}};
}

nlohmann::json to_json(const EulerTrace& e)
{
    return {{"k", e.k}, {"beta", e.beta}, {"x", e.x}, {"z", e.z}};
}

} // namespace prophet
