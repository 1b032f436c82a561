#pragma once

#include <vector>

#include <json.hpp>

namespace prophet {

// I(beta) = int_0^1 dw / (beta - 1 + w (1 - log w)); +inf at beta = 1.
double I(double beta);

struct BetaBar {
    double beta = 0;
    double gamma = 0; // 1 / beta
};

BetaBar beta_bar(double tol = 1e-12);

struct EulerTrace {
    int k = 0;
    double beta = 0;
    std::vector<double> x; // x_0..x_k
    std::vector<double> z; // z_0..z_k
};

EulerTrace euler_sequences(int k, double beta);

struct SandwichRow {
    int t = 0;
    double x = 0, y = 0, z = 0;
    double lower_margin = 0;   // y_t - x_t
    double upper_margin = 0;   // x_t + 4 log(32k)/k - y_t
    double spread_margin = 0;  // y_t - (k - t)/(32k), the y_{k-l} >= l/(32k) check
    double z_margin = 0;       // z_t - y_t
};

struct SandwichReport {
    int k = 0;
    double v = 0;
    bool passed = true;
    int first_failure = -1; // offending t, -1 when all hold
    std::vector<SandwichRow> rows;
};

// Checks x_t <= y_t <= x_t + 4 log(32k)/k, y_t <= z_t and y_{k-l} >= l/(32k) at the
// infinite-model optimum, with beta* = 1/v. tol absorbs solver error.
SandwichReport verify_sandwich(int k, double tol = 1e-9);

struct Bands {
    double lower = 0;
    double upper = 0;
};

// gamma-bar (1 - 512 log(32k)/k) and gamma-bar (1 - 4 log(32k)/k).
Bands asymptotic_bands(int k);

nlohmann::json to_json(const SandwichReport& r);
nlohmann::json to_json(const EulerTrace& e);

} // namespace prophet
