#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace prophet {

template <typename Scalar = double>
struct QuadratureSpec {
    Scalar abs_tol = Scalar(1e-10);
    Scalar rel_tol = Scalar(1e-10);
    std::size_t max_subdivisions = 1000000;

    void validate() const
    {
        if (!(abs_tol > 0) || !(rel_tol > 0))
            throw std::invalid_argument("quadrature tolerances must be positive");
        if (max_subdivisions < 1)
            throw std::invalid_argument("max_subdivisions must be >= 1");
    }
};

// Thrown when the subdivision budget runs out (or panels shrink to rounding
// level) before the requested accuracy is reached.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(double estimate, double residual)
        : std::runtime_error("quadrature did not converge: estimate " + std::to_string(estimate) +
                             ", error " + std::to_string(residual)),
          estimate_(estimate), residual_(residual)
    {
    }
    double estimate() const noexcept { return estimate_; }
    double residual() const noexcept { return residual_; }

private:
    double estimate_;
    double residual_;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> gk15_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk15_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Scalar>
struct Panel {
    Scalar a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename Scalar, typename F>
Panel<Scalar> gk15(F& f, Scalar a, Scalar b)
{
    const Scalar c = (a + b) / 2;
    const Scalar h = (b - a) / 2;
    const Scalar fc = f(c);
    Scalar kron = fc * Scalar(gk15_wk[7]);
    Scalar gauss = fc * Scalar(gk15_wg[3]);
    Scalar abs_sum = std::abs(kron);
    std::array<Scalar, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const Scalar dx = h * Scalar(gk15_x[j]);
        f1[j] = f(c - dx);
        f2[j] = f(c + dx);
        kron += Scalar(gk15_wk[j]) * (f1[j] + f2[j]);
        abs_sum += Scalar(gk15_wk[j]) * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1)
            gauss += Scalar(gk15_wg[j / 2]) * (f1[j] + f2[j]);
    }
    const Scalar mean = kron / 2;
    Scalar asc = Scalar(gk15_wk[7]) * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        asc += Scalar(gk15_wk[j]) * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    Scalar err = std::abs((kron - gauss) * h);
    asc *= std::abs(h);
    if (asc != 0 && err != 0)
        err = asc * std::min(Scalar(1), std::pow(Scalar(200) * err / asc, Scalar(1.5)));
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    const Scalar abs_int = abs_sum * std::abs(h);
    if (abs_int > std::numeric_limits<Scalar>::min() / (50 * eps))
        err = std::max(err, 50 * eps * abs_int);
    return {a, b, kron * h, err};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod quadrature over [a, b] split first at the
// given interior breakpoints. Nodes never touch panel endpoints, so
// integrable endpoint singularities are tolerated.
template <typename Scalar, typename F>
Scalar integrate(F&& f, const std::vector<Scalar>& points, const QuadratureSpec<Scalar>& spec = {})
{
    spec.validate();
    if (points.size() < 2)
        throw std::invalid_argument("integrate needs at least two points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i - 1] <= points[i]))
            throw std::invalid_argument("integration points must be nondecreasing");

    std::priority_queue<detail::Panel<Scalar>> heap;
    Scalar total = 0, total_err = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i] == points[i - 1])
            continue;
        auto p = detail::gk15<Scalar>(f, points[i - 1], points[i]);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    std::size_t panels = heap.size();
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    // Panels too narrow to split further carry their error as a floor.
    Scalar frozen_err = 0;
    while (!heap.empty() && total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (panels >= spec.max_subdivisions)
            throw QuadratureError(double(total), double(total_err));
        auto worst = heap.top();
        heap.pop();
        const Scalar mid = (worst.a + worst.b) / 2;
        const Scalar scale = std::max(std::abs(worst.a), std::abs(worst.b));
        if (worst.b - worst.a <= 100 * eps * scale || mid <= worst.a || mid >= worst.b) {
            frozen_err += worst.error;
            if (frozen_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)))
                throw QuadratureError(double(total), double(total_err));
            continue;
        }
        auto left = detail::gk15<Scalar>(f, worst.a, mid);
        auto right = detail::gk15<Scalar>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    // Re-sum from the panels so the running update does not accumulate drift.
    Scalar sum = 0;
    std::vector<Scalar> values;
    values.reserve(heap.size());
    while (!heap.empty()) {
        values.push_back(heap.top().value);
        heap.pop();
    }
    std::sort(values.begin(), values.end(), [](Scalar x, Scalar y) { return std::abs(x) < std::abs(y); });
    for (Scalar v : values)
        sum += v;
    return sum;
}

template <typename Scalar, typename F>
Scalar integrate(F&& f, Scalar a, Scalar b, const QuadratureSpec<Scalar>& spec = {})
{
    if (a > b)
        throw std::invalid_argument("integrate requires a <= b");
    if (a == b)
        return Scalar(0);
    return integrate<Scalar>(f, std::vector<Scalar>{a, b}, spec);
}

// Integrates f over [a, b] (0 <= a <= b) after substituting y = x^p, i.e.
// int_{a^{1/p}}^{b^{1/p}} f(x^p) p x^{p-1} dx. With p = k this turns a
// -log y singularity at 0 into the smooth x^{k-1} log x.
template <typename Scalar, typename F>
Scalar integrate_with_substitution(F&& f, Scalar a, Scalar b, Scalar p, const QuadratureSpec<Scalar>& spec = {})
{
    if (!(a >= 0) || a > b)
        throw std::invalid_argument("integrate_with_substitution requires 0 <= a <= b");
    if (!(p > 0))
        throw std::invalid_argument("substitution exponent must be positive");
    auto g = [&](Scalar x) { return f(std::pow(x, p)) * p * std::pow(x, p - 1); };
    return integrate<Scalar>(g, std::pow(a, 1 / p), std::pow(b, 1 / p), spec);
}

} // namespace prophet
