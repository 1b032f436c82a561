#pragma once

#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace prophet {

class PlanError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Horizon n split into k windows of lengths tau[0..k-1].
struct WindowPlan {
    long n = 0;
    int k = 0;
    std::vector<long> tau;

    // tau_1 = ... = tau_{k-1} = ceil(n/k), tau_k = n - (k-1) ceil(n/k).
    static WindowPlan equal(long n, int k);
    // Two windows, the first of length ceil(theta n).
    static WindowPlan two_window(long n, double theta);
    void validate() const;
};

double gamma_n_1(long n);

struct EpsilonSchedule {
    WindowPlan plan;
    double v = 0;
    std::vector<double> eps; // eps_0 = 0 .. eps_k
    // int_{eps_{k-1}}^1 f_{tau_k} minus the last stage's required mass;
    // zero at the optimum, positive when v is above it.
    double final_residual = 0;
};

enum class Infeasibility { none, v_too_large, v_too_small };

struct EpsilonAttempt {
    bool feasible = false;
    int failed_stage = 0; // 1-based
    Infeasibility kind = Infeasibility::none;
    EpsilonSchedule schedule;
};

EpsilonAttempt epsilon_schedule(const WindowPlan& plan, double v);

inline constexpr double default_finite_delta = 1e-12;

// v*_{n,k} and its schedule, with eps_k = 1.
EpsilonSchedule solve_v_finite(const WindowPlan& plan, double delta = default_finite_delta);

struct DualCertificate {
    long n = 0;
    std::vector<long> tau;
    std::vector<double> eps; // eps_0..eps_k
    std::vector<double> a;   // a_1..a_{k+1}, stored 0-based (a[k] = 0)
    std::vector<double> h;   // h_1..h_{k-1}
    std::vector<double> d;   // d_1..d_k

    // Piece t (1-based) of F: (a_t - a_{t+1}(1-q)^{tau_t}) q / (1 - (1-q)^{tau_t}).
    double F_piece(int t, double q) const;
    // Nondecreasing CDF of the dual measure on [0, 1].
    double F(double q) const;
    // ((1-(1-q)^{tau_t})/q) F(q) + (1-q)^{tau_t} d_{t+1}, whose sup defines d_t.
    double g(int t, double q) const;
};

DualCertificate dual_certificate(const EpsilonSchedule& schedule);

// Exact n -> infinity two-threshold policy and its dual witness.
struct TwoThresholdExact {
    double u2 = 0, theta = 0, a1 = 0, a2 = 0, v_bar = 0;
    double a = 0, b = 0, c = 0, d1 = 0, d2 = 0;
    double implicit_residual = 0; // of the (theta, u2) equation
    double linear_residual = 0;   // max-norm of the 3x3 system residual
};

TwoThresholdExact two_threshold_exact();

nlohmann::json to_json(const WindowPlan& p);
nlohmann::json to_json(const EpsilonSchedule& s);
nlohmann::json to_json(const DualCertificate& c);
nlohmann::json to_json(const TwoThresholdExact& t);

} // namespace prophet
