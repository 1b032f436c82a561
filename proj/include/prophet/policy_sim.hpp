#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "prophet/distributions.hpp"
#include "prophet/finite_model.hpp"
#include "prophet/random.hpp"

namespace prophet {

// Law of the acceptance quantile q in one window: a fixed value, or the
// infinite-model density on (y_lo, y_hi) mapped through q = -log y / (n-1).
struct QuantileRule {
    enum class Kind { deterministic, density };
    Kind kind = Kind::deterministic;
    double q = 1;
    double y_lo = 0, y_hi = 1;
    // Inverse-CDF table for density rules: y at evenly spaced levels.
    std::shared_ptr<const std::vector<double>> inverse;

    double draw(Rng& rng, long n) const;
};

enum class ScheduleMode { single, two_threshold, density, midpoint };

struct QuantileSchedule {
    ScheduleMode mode = ScheduleMode::single;
    WindowPlan plan;
    std::vector<QuantileRule> rules;
    double bound = 0;        // guaranteed ratio of the policy (heuristic for midpoint)
    bool certified = true;
};

const char* to_string(ScheduleMode m);

QuantileSchedule schedule_single(long n, double q);
QuantileSchedule schedule_deterministic(const WindowPlan& plan, const std::vector<double>& q);
QuantileSchedule schedule_two_threshold_exact(long n);
QuantileSchedule schedule_from_infinite(int k, long n, ScheduleMode mode);

// One pass of the windowed threshold policy; 0 when nothing is accepted.
double run_once(const QuantileSchedule& s, const Distribution& d, Rng& rng);

struct SimulationReport {
    double policy_value = 0;
    double value_stderr = 0;
    double prophet_value = 0;
    bool prophet_exact = true;
    double ratio = 0;
    double stderr_ratio = 0;
    double accept_rate = 0;
    long trials = 0;
    std::uint64_t seed = 0;
    nlohmann::json distribution;
    nlohmann::json schedule;
};

inline constexpr long simulation_batch = 4096;

// Trials are split into fixed batches of simulation_batch, batch b drawing
// from sub-stream b, so results do not depend on the worker count.
SimulationReport simulate(const QuantileSchedule& s, const Distribution& d, long trials, std::uint64_t seed,
                          unsigned workers = 0);

nlohmann::json to_json(const QuantileSchedule& s);
nlohmann::json to_json(const SimulationReport& r);

} // namespace prophet
