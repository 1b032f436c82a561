#pragma once

#include <vector>

#include <json.hpp>

namespace prophet {

// Breakpoints 1 = y_0 >= y_1 >= ... >= y_k = 0 of the n -> infinity relaxation
// and its value v. residuals[t-1] is the slack of constraint t at the
// returned breakpoints (constraint k is evaluated at y_k = 0).
struct InfiniteBreakpoints {
    int k = 0;
    double v = 0;
    std::vector<double> y;
    std::vector<double> residuals;
};

struct BreakpointAttempt {
    bool feasible = false;
    int failed_stage = 0; // first infeasible constraint, 1-based; 0 when feasible
    InfiniteBreakpoints points; // y holds y_0..y_{failed_stage-1} on failure
};

// H(x) = int_0^x -log y / (1 - y^{1/k}) dy.
double H(int k, double x);
// H_phi(x) = int_0^x -log y / (1 - y^phi) dy for phi in (0, 1].
double H_phi(double phi, double x);

// Greedy breakpoint construction for a fixed v.
BreakpointAttempt breakpoints_given_v(int k, double v);

inline constexpr int max_infinite_k = 64;
inline constexpr double default_delta = 1e-8;

InfiniteBreakpoints solve_v_infinity(int k, double delta = default_delta);

// Two windows of relative lengths theta and 1 - theta.
struct TwoThresholdTheta {
    double theta = 0;
    double v = 0;
    double y1 = 0;
    double residual1 = 0;
    double residual2 = 0;
};

TwoThresholdTheta v_infinity_2_theta(double theta, double delta = default_delta);

struct ThetaSweep {
    double theta = 0;
    TwoThresholdTheta best;
    std::vector<TwoThresholdTheta> grid; // theta = i/r, i = ceil(r/2) .. r-1
};

// Grid sweep over theta in [1/2, 1). Among grid points within delta of the
// maximum, the smallest theta wins.
ThetaSweep optimize_theta(int r, double delta = default_delta);

nlohmann::json to_json(const InfiniteBreakpoints& b);
nlohmann::json to_json(const TwoThresholdTheta& t);

} // namespace prophet
