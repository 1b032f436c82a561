#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace prophet {

class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Scalar = double>
struct RootBracket {
    Scalar lo;
    Scalar hi;
};

// Bisection on a monotone function. Stops once the bracket is narrower than
// tol and returns its midpoint; an exact zero at a probe ends the search early.
template <typename Scalar, typename G>
Scalar find_root_monotone(G&& g, RootBracket<Scalar> bracket, Scalar tol)
{
    if (!(tol > 0))
        throw std::invalid_argument("bisection tolerance must be positive");
    Scalar lo = bracket.lo, hi = bracket.hi;
    if (!(lo < hi))
        throw BracketError("bracket requires lo < hi");
    const Scalar glo = g(lo);
    if (glo == 0)
        return lo;
    const Scalar ghi = g(hi);
    if (ghi == 0)
        return hi;
    if (std::signbit(glo) == std::signbit(ghi) || std::isnan(glo) || std::isnan(ghi))
        throw BracketError("no sign change on [" + std::to_string(double(lo)) + ", " +
                           std::to_string(double(hi)) + "]");
    const bool lo_negative = std::signbit(glo);
    while (hi - lo > tol) {
        const Scalar mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi)
            break;
        const Scalar gm = g(mid);
        if (gm == 0)
            return mid;
        if (std::signbit(gm) == lo_negative)
            lo = mid;
        else
            hi = mid;
    }
    return lo + (hi - lo) / 2;
}

// Smallest x in [lo, hi] (to within tol) where a monotone predicate turns
// true. Assumes pred(hi) holds; returns lo when pred(lo) already holds.
// The returned point always satisfies the predicate.
template <typename Scalar, typename P>
Scalar bisect_threshold(P&& pred, Scalar lo, Scalar hi, Scalar tol)
{
    if (pred(lo))
        return lo;
    while (hi - lo > tol) {
        const Scalar mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi)
            break;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace prophet
