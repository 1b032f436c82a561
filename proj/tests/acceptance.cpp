// One PASS/FAIL line per acceptance criterion. argv[1] is the kprophet binary.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "prophet/asymptotics.hpp"
#include "prophet/distributions.hpp"
#include "prophet/finite_model.hpp"
#include "prophet/infinite_model.hpp"
#include "prophet/lp_oracle.hpp"
#include "prophet/policy_sim.hpp"

using namespace prophet;
using nlohmann::json;

namespace {

std::string cli;
const double inv_zeta2 = 6 / (std::numbers::pi * std::numbers::pi);

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void need(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [miss: " << what << "]";
        }
    }
};

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args)
{
    Run r;
    const std::string cmd = cli + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p)
        return r;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0)
        r.out.append(buf.data(), got);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double x)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.7g", x);
    return b;
}

void criterion_1(Outcome& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Run r = run("bounds --k 1..10 --model infinite --format json");
    const double elapsed = seconds_since(t0);
    o.need(r.status == 0, "exit status " + std::to_string(r.status));
    if (r.status != 0)
        return;
    const auto doc = json::parse(r.out);
    const std::vector<std::pair<int, double>> table = {{1, inv_zeta2}, {3, 0.7233}, {4, 0.7321},
                                                       {5, 0.7364},    {6, 0.7389}, {7, 0.7405},
                                                       {8, 0.7416},    {9, 0.7423}, {10, 0.7428}};
    double worst = 0;
    for (auto [k, ref] : table) {
        const double v = doc["rows"][k - 1]["v"].get<double>();
        worst = std::max(worst, std::abs(v - ref));
        o.need(std::abs(v - ref) <= 5e-4, "k=" + std::to_string(k) + " v=" + num(v));
    }
    o.need(elapsed < 60, "runtime");
    o.detail << " max|v-ref|=" << num(worst) << " time=" << num(elapsed) << "s";
}

void criterion_2(Outcome& o)
{
    // Correctly rounded 1 - (1 - 1/n)^n from exact rational arithmetic.
    const std::vector<std::pair<long, double>> exact = {
        {1, 1.0}, {2, 0.75}, {5, 0.67232}, {100, 0.6339676587267705}};
    for (auto [n, g] : exact)
        o.need(gamma_n_1(n) == g, "n=" + std::to_string(n));
    const double lim = std::abs(gamma_n_1(1000000) - (1 - std::exp(-1.0)));
    o.need(lim <= 1e-6, "limit");
    o.detail << " |gamma(1e6)-(1-1/e)|=" << num(lim);
}

void criterion_3(Outcome& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto t = two_threshold_exact();
    const double elapsed = seconds_since(t0);
    const std::vector<std::tuple<const char*, double, double>> checks = {
        {"u2", t.u2, 1.316097},  {"theta", t.theta, 0.603285}, {"a1", t.a1, 0.517708},
        {"a2", t.a2, 2.316097},  {"v_bar", t.v_bar, 0.70804},  {"a", t.a, 0.516213},
        {"b", t.b, 0.567355},    {"c", t.c, 0.255744},         {"d1-v_bar", t.d1 - t.v_bar, 0.0}};
    double worst = 0;
    for (auto [name, v, ref] : checks) {
        worst = std::max(worst, std::abs(v - ref));
        o.need(std::abs(v - ref) <= 1e-4, name);
    }
    o.need(elapsed < 5, "runtime");
    o.detail << " max err=" << num(worst) << " time=" << num(elapsed) << "s";
}

void criterion_4(Outcome& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto sweep = optimize_theta(1000);
    const double elapsed = seconds_since(t0);
    o.need(std::abs(sweep.theta - 0.610) <= 0.005, "theta*=" + num(sweep.theta));
    o.need(std::abs(sweep.best.v - 0.7048) <= 5e-4, "v=" + num(sweep.best.v));
    o.need(std::abs(sweep.best.y1 - 0.2620) <= 5e-3, "y1=" + num(sweep.best.y1));
    o.need(elapsed < 120, "runtime");
    const double half = v_infinity_2_theta(0.5).v;
    o.need(std::abs(half - 0.701) <= 1e-3, "v(1/2)=" + num(half));
    const double near1 = v_infinity_2_theta(0.99).v;
    o.need(std::abs(near1 - inv_zeta2) <= 5e-3, "|v(0.99)-6/pi^2|=" + num(std::abs(near1 - inv_zeta2)));
    o.detail << " theta*=" << num(sweep.theta) << " v=" << num(sweep.best.v) << " y1=" << num(sweep.best.y1)
             << " v(0.5)=" << num(half) << " v(0.99)=" << num(near1) << " time=" << num(elapsed) << "s";
}

void criterion_5(Outcome& o)
{
    const auto b = beta_bar();
    o.need(std::abs(b.beta - 1.341) <= 1e-3, "beta");
    o.need(std::abs(b.gamma - 0.745) <= 1e-3, "gamma");
    double prev = I(1.05);
    bool mono = true;
    for (int i = 1; i < 20; ++i) {
        const double cur = I(1.05 + 0.05 * i);
        mono = mono && cur < prev;
        prev = cur;
    }
    o.need(mono, "I monotone on grid");
    o.detail << " beta=" << num(b.beta) << " gamma=" << num(b.gamma);
}

void criterion_6(Outcome& o)
{
    double worst = 0, jump = 0;
    for (auto [n, k] : {std::pair{100L, 2}, std::pair{100L, 4}, std::pair{1000L, 3}}) {
        const auto s = solve_v_finite(WindowPlan::equal(n, k));
        const auto c = dual_certificate(s);
        const std::string tag = "(" + std::to_string(n) + "," + std::to_string(k) + ")";
        o.need(std::abs(c.d[0] - c.a[0]) <= 1e-6, tag + " d1-a1");
        o.need(std::abs(c.a[0] - s.v) <= 1e-6, tag + " a1-v");
        worst = std::max({worst, std::abs(c.d[0] - c.a[0]), std::abs(c.a[0] - s.v)});
        for (int t = 0; t < k; ++t)
            o.need(c.a[t] >= c.a[t + 1], tag + " a nonincreasing");
        for (int t = 1; t < k; ++t) {
            const double j = std::abs(c.F_piece(t, c.eps[t]) - c.F_piece(t + 1, c.eps[t]));
            jump = std::max(jump, j);
            o.need(j <= 1e-7, tag + " F continuity");
        }
    }
    o.detail << " max gap=" << num(worst) << " max F jump=" << num(jump);
}

void criterion_7(Outcome& o)
{
    for (int k : {1, 2, 3}) {
        const double vinf = solve_v_infinity(k).v;
        double prev = INFINITY;
        o.detail << " k=" << k << ":";
        for (long n : {1000L, 2000L, 4000L, 8000L}) {
            const double gap = std::abs(solve_v_finite(WindowPlan::equal(n, k)).v - vinf);
            o.need(gap < prev, "k=" + std::to_string(k) + " n=" + std::to_string(n));
            o.detail << ' ' << num(gap);
            prev = gap;
        }
    }
}

void criterion_8(Outcome& o)
{
    for (int k : {6, 8, 10, 20}) {
        const auto r = verify_sandwich(k);
        o.need(r.passed, "k=" + std::to_string(k) + " t=" + std::to_string(r.first_failure));
    }
    o.detail << " k in {6,8,10,20}";
}

void criterion_9(Outcome& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::pair<const char*, Distribution>> dists = {
        {"uniform01", uniform01()}, {"exponential(1)", exponential(1)}, {"bounded-pareto(2,100)", bounded_pareto(2, 100)}};
    const std::vector<std::pair<const char*, QuantileSchedule>> schedules = {
        {"single", schedule_single(100, 0.01)},
        {"two-threshold", schedule_two_threshold_exact(1000)},
        {"infinite k=5", schedule_from_infinite(5, 1000, ScheduleMode::density)}};
    double worst = INFINITY;
    for (const auto& [sname, s] : schedules)
        for (const auto& [dname, d] : dists) {
            const auto r = simulate(s, d, 100000, 7);
            const double margin = (r.ratio - (s.bound - 3 * r.stderr_ratio));
            worst = std::min(worst, margin);
            o.need(margin >= 0, std::string(sname) + "/" + dname + " ratio=" + num(r.ratio));
            if (std::string(sname) == "single" && std::string(dname) == "uniform01") {
                const double n = 100;
                const double oracle = (1 - std::pow(1 - 1 / n, n)) * (1 - 1 / (2 * n)) * (n + 1) / n;
                o.need(std::abs(r.ratio - oracle) <= 3 * r.stderr_ratio, "uniform oracle");
                o.detail << " uniform k=1 ratio=" << num(r.ratio) << " oracle=" << num(oracle);
            }
        }
    const double elapsed = seconds_since(t0);
    o.need(elapsed < 180, "runtime");
    o.detail << " min margin=" << num(worst) << " time=" << num(elapsed) << "s";
}

void criterion_10(Outcome& o)
{
    struct Case {
        long n;
        int k, m;
    };
    double worst = 0;
    for (const auto& c : {Case{1, 1, 10}, Case{2, 1, 100}, Case{3, 1, 200}, Case{2, 2, 100}, Case{4, 2, 100},
                          Case{5, 3, 60}}) {
        const auto plan = WindowPlan::equal(c.n, c.k);
        const auto d = solve(build_D(plan, c.m));
        const auto p = solve(build_P(plan, c.m));
        const double gap = std::abs(d.objective - p.objective);
        worst = std::max(worst, gap);
        o.need(d.status == SimplexStatus::optimal && p.status == SimplexStatus::optimal && gap <= 1e-6,
               "duality n=" + std::to_string(c.n) + " k=" + std::to_string(c.k));
    }
    std::vector<double> dist;
    for (int m : {50, 100, 200, 400})
        dist.push_back(std::abs(solve(build_D(WindowPlan::equal(2, 1), m)).objective - 0.75));
    o.need(dist.back() <= 0.02, "D(2,1,400)");
    for (std::size_t i = 1; i < dist.size(); ++i)
        o.need(dist[i] <= dist[i - 1] + 1e-3, "trend in m");
    // n = 10 needs m >= 82944, beyond the oracle's m <= 500 cap.
    o.detail << " max duality gap=" << num(worst) << " |D(2,1,400)-0.75|=" << num(dist.back())
             << " discretization bound: skipped (m cap)";
}

void criterion_11(Outcome& o)
{
    const std::vector<std::string> commands = {
        "simulate --k 2 --n 1000 --dist exponential:1 --trials 20000 --seed 7",
        "simulate --k 1 --n 100 --dist uniform01 --trials 20000 --seed 1",
        "simulate --k 5 --n 1000 --dist bounded-pareto:2,100 --trials 20000 --seed 3",
        "bounds --k 1..4 --model infinite --format json",
        "bounds --k 3 --model finite --n 500 --format json",
        "verify two-threshold"};
    for (const auto& c : commands) {
        const Run a = run(c), b = run(c);
        o.need(a.status == 0 && b.status == 0 && !a.out.empty() && a.out == b.out, c);
    }
    const Run w1 = run(commands[0] + " --workers 1"), w4 = run(commands[0] + " --workers 4");
    o.need(w1.status == 0 && w1.out == w4.out, "worker count");
    o.detail << " " << commands.size() << " commands rerun, worker counts 1/4";
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cerr << "usage: acceptance <path to kprophet>\n";
        return 3;
    }
    cli = argv[1];

    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {"1 infinite-model values k=1..10", criterion_1},
        {"2 single-threshold value", criterion_2},
        {"3 exact two-threshold constants", criterion_3},
        {"4 two-window theta sweep", criterion_4},
        {"5 beta-bar", criterion_5},
        {"6 finite-model strong duality", criterion_6},
        {"7 convergence in n", criterion_7},
        {"8 sandwich inequalities", criterion_8},
        {"9 Monte Carlo certification", criterion_9},
        {"10 LP oracle", criterion_10},
        {"11 determinism", criterion_11}};

    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ":" << o.detail.str() << std::endl;
        failed += !o.pass;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
