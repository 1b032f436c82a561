#include "prophet/policy_sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

#include "prophet/infinite_model.hpp"
#include "prophet/quadrature.hpp"
#include "prophet/roots.hpp"

namespace prophet {

namespace {

constexpr int table_levels = 2048;
constexpr int table_panels = 4096;

double log_ratio(double s)
{
    const double w = 1.0 - s;
    if (w < 1e-8)
        return 1.0 + w / 2 + w * w / 3;
    return -std::log1p(-w) / w;
}

// y at levels j / table_levels of the law with density proportional to
// -log y / (1 - y^{1/k}) on (y_lo, y_hi), built in s = y^{1/k}.
std::shared_ptr<const std::vector<double>> inverse_table(int k, double y_lo, double y_hi)
{
    const double p = k;
    const double s_lo = std::pow(y_lo, 1.0 / k), s_hi = std::pow(y_hi, 1.0 / k);
    auto g = [p](double s) { return p * p * std::pow(s, p - 1) * log_ratio(s); };
    const QuadratureSpec<double> spec{1e-14, 1e-12, 100000};

    std::vector<double> s(table_panels + 1), cum(table_panels + 1, 0.0);
    for (int i = 0; i <= table_panels; ++i)
        s[i] = s_lo + (s_hi - s_lo) * i / table_panels;
    s.back() = s_hi;
    for (int i = 0; i < table_panels; ++i)
        cum[i + 1] = cum[i] + integrate(g, s[i], s[i + 1], spec);

    auto table = std::make_shared<std::vector<double>>(table_levels + 1);
    (*table)[0] = y_lo;
    (*table)[table_levels] = y_hi;
    for (int j = 1; j < table_levels; ++j) {
        const double target = cum.back() * j / table_levels;
        const auto it = std::upper_bound(cum.begin(), cum.end(), target);
        const int i = std::clamp(int(it - cum.begin()) - 1, 0, table_panels - 1);
        const double w = cum[i + 1] - cum[i];
        const double frac = w > 0 ? (target - cum[i]) / w : 0.0;
        (*table)[j] = std::pow(s[i] + frac * (s[i + 1] - s[i]), p);
    }
    return table;
}

double quantile_of_y(double y, long n)
{
    if (n <= 1 || y <= 0)
        return 1.0;
    return std::min(1.0, -std::log(y) / double(n - 1));
}

QuantileRule deterministic_rule(double q)
{
    if (!(q >= 0 && q <= 1))
        throw std::invalid_argument("quantiles must lie in [0, 1]");
    QuantileRule r;
    r.q = q;
    return r;
}

// Combines (count, mean, M2) triples in a fixed pairwise order.
struct Moments {
    double count = 0, mean = 0, m2 = 0, accepts = 0;
};

Moments merge(const Moments& a, const Moments& b)
{
    Moments out;
    out.count = a.count + b.count;
    if (out.count == 0)
        return out;
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * b.count / out.count;
    out.m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / out.count;
    out.accepts = a.accepts + b.accepts;
    return out;
}

Moments pairwise(const std::vector<Moments>& v, std::size_t lo, std::size_t hi)
{
    if (hi - lo == 1)
        return v[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return merge(pairwise(v, lo, mid), pairwise(v, mid, hi));
}

template <typename Batch>
Moments run_batches(long trials, unsigned workers, Batch&& batch)
{
    const long batches = (trials + simulation_batch - 1) / simulation_batch;
    std::vector<Moments> results(static_cast<std::size_t>(batches));
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, unsigned(batches));
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (long b = w; b < batches; b += workers) {
                const long size = std::min(simulation_batch, trials - b * simulation_batch);
                results[std::size_t(b)] = batch(b, size);
            }
        }));
    for (auto& j : jobs)
        j.get();
    return pairwise(results, 0, results.size());
}

// Offset separating prophet-value fallback streams from policy streams.
constexpr std::uint64_t fallback_stream_offset = std::uint64_t(1) << 40;

} // namespace

double QuantileRule::draw(Rng& rng, long n) const
{
    if (kind == Kind::deterministic)
        return q;
    const auto& t = *inverse;
    const double pos = rng.uniform() * table_levels;
    const int j = std::min(int(pos), table_levels - 1);
    const double y = t[j] + (pos - j) * (t[j + 1] - t[j]);
    return quantile_of_y(y, n);
}

const char* to_string(ScheduleMode m)
{
    switch (m) {
    case ScheduleMode::single:
        return "single";
    case ScheduleMode::two_threshold:
        return "two-threshold";
    case ScheduleMode::density:
        return "density";
    case ScheduleMode::midpoint:
        return "midpoint";
    }
    return "unknown";
}

QuantileSchedule schedule_single(long n, double q)
{
    QuantileSchedule s;
    s.mode = ScheduleMode::single;
    s.plan = WindowPlan::equal(n, 1);
    s.rules = {deterministic_rule(q)};
    // The single-threshold guarantee is known for q = 1/n.
    s.certified = std::abs(q * double(n) - 1) < 1e-12;
    s.bound = s.certified ? gamma_n_1(n) : 0.0;
    return s;
}

QuantileSchedule schedule_deterministic(const WindowPlan& plan, const std::vector<double>& q)
{
    plan.validate();
    if (q.size() != std::size_t(plan.k))
        throw std::invalid_argument("one quantile per window is required");
    QuantileSchedule s;
    s.mode = ScheduleMode::single;
    s.plan = plan;
    for (double x : q)
        s.rules.push_back(deterministic_rule(x));
    s.certified = false;
    return s;
}

QuantileSchedule schedule_two_threshold_exact(long n)
{
    if (n < 4)
        throw PlanError("the two-threshold schedule needs n >= 4");
    const auto ex = two_threshold_exact();
    QuantileSchedule s;
    s.mode = ScheduleMode::two_threshold;
    s.plan = WindowPlan::two_window(n, ex.theta);
    s.rules = {deterministic_rule(ex.a1 / double(n)), deterministic_rule(ex.a2 / double(n))};
    s.bound = ex.v_bar;
    return s;
}

QuantileSchedule schedule_from_infinite(int k, long n, ScheduleMode mode)
{
    if (mode != ScheduleMode::density && mode != ScheduleMode::midpoint)
        throw std::invalid_argument("infinite-model schedules are density or midpoint");
    if (n < 1 || k < 1 || k > n)
        throw PlanError("infinite-model schedule needs 1 <= k <= n");
    QuantileSchedule s;
    s.mode = mode;
    s.plan = WindowPlan::equal(n, k);
    s.certified = mode == ScheduleMode::density;
    if (n == 1) {
        s.rules = {deterministic_rule(1.0)};
        s.bound = 1.0;
        return s;
    }
    const auto opt = solve_v_infinity(k);
    for (int t = 1; t <= k; ++t) {
        const double y_hi = opt.y[t - 1], y_lo = opt.y[t];
        if (mode == ScheduleMode::midpoint) {
            const double h_lo = H(k, y_lo), h_hi = H(k, y_hi);
            const double target = (h_lo + h_hi) / 2;
            const double y = bisect_threshold([&](double x) { return H(k, x) >= target; }, y_lo, y_hi, 1e-15);
            s.rules.push_back(deterministic_rule(quantile_of_y(y, n)));
        } else {
            QuantileRule r;
            r.kind = QuantileRule::Kind::density;
            r.y_lo = y_lo;
            r.y_hi = y_hi;
            r.inverse = inverse_table(k, y_lo, y_hi);
            s.rules.push_back(std::move(r));
        }
    }
    const double nn = double(n);
    s.bound = std::max(0.0, opt.v * (1 - double(k) * k / nn) * (1 + 4 * std::log(opt.y[k - 1]) / (nn - 1)));
    return s;
}

namespace {

struct Outcome {
    bool accepted = false;
    double value = 0;
};

Outcome run_policy(const QuantileSchedule& s, const Distribution& d, Rng& rng)
{
    for (int t = 0; t < s.plan.k; ++t) {
        const double x = threshold_from_quantile(d, s.rules[t].draw(rng, s.plan.n));
        for (long i = 0; i < s.plan.tau[t]; ++i) {
            const double value = d.sample(rng);
            if (value >= x)
                return {true, value};
        }
    }
    return {};
}

} // namespace

double run_once(const QuantileSchedule& s, const Distribution& d, Rng& rng) { return run_policy(s, d, rng).value; }

SimulationReport simulate(const QuantileSchedule& s, const Distribution& d, long trials, std::uint64_t seed,
                          unsigned workers)
{
    if (trials < 100)
        throw std::invalid_argument("simulation needs at least 100 trials");
    s.plan.validate();

    const Moments policy = run_batches(trials, workers, [&](long b, long size) {
        Rng rng = Rng::substream(seed, std::uint64_t(b));
        Moments m;
        for (long i = 0; i < size; ++i) {
            const auto [accepted, x] = run_policy(s, d, rng);
            m.count += 1;
            const double delta = x - m.mean;
            m.mean += delta / m.count;
            m.m2 += delta * (x - m.mean);
            m.accepts += accepted ? 1 : 0;
        }
        return m;
    });

    SimulationReport r;
    r.trials = trials;
    r.seed = seed;
    r.policy_value = policy.mean;
    r.value_stderr = std::sqrt(policy.m2 / (policy.count - 1) / policy.count);
    r.accept_rate = policy.accepts / policy.count;
    try {
        r.prophet_value = prophet_value_exact(d, s.plan.n);
    } catch (const QuadratureError&) {
        r.prophet_exact = false;
        const Moments mx = run_batches(trials, workers, [&](long b, long size) {
            Rng rng = Rng::substream(seed, fallback_stream_offset + std::uint64_t(b));
            Moments m;
            for (long i = 0; i < size; ++i) {
                double best = 0;
                for (long j = 0; j < s.plan.n; ++j)
                    best = std::max(best, d.sample(rng));
                m.count += 1;
                m.mean += (best - m.mean) / m.count;
            }
            return m;
        });
        r.prophet_value = mx.mean;
    }
    r.ratio = r.policy_value / r.prophet_value;
    r.stderr_ratio = r.value_stderr / r.prophet_value;
    r.distribution = d.descriptor();
    r.schedule = to_json(s);
    return r;
}

nlohmann::json to_json(const QuantileSchedule& s)
{
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& r : s.rules) {
        if (r.kind == QuantileRule::Kind::deterministic)
            rules.push_back({{"kind", "deterministic"}, {"q", r.q}});
        else
            rules.push_back({{"kind", "density"}, {"y_lo", r.y_lo}, {"y_hi", r.y_hi}});
    }
    return {{"mode", to_string(s.mode)},
            {"plan", to_json(s.plan)},
            {"rules", rules},
            {"bound", s.bound},
            {"bound_kind", s.certified ? "certified" : "heuristic"}};
}

nlohmann::json to_json(const SimulationReport& r)
{
    return {{"policy_value", r.policy_value},
            {"value_stderr", r.value_stderr},
            {"prophet_value", r.prophet_value},
            {"prophet_value_source", r.prophet_exact ? "quadrature" : "monte-carlo"},
            {"ratio", r.ratio},
            {"stderr", r.stderr_ratio},
            {"accept_rate", r.accept_rate},
            {"trials", r.trials},
            {"seed", r.seed},
            {"distribution", r.distribution},
            {"schedule", r.schedule}};
}

} // namespace prophet
