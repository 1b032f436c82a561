#include "prophet/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace prophet {

namespace {

using detail::DistributionModel;

struct Uniform01 final : DistributionModel {
    double cdf(double x) const override { return std::clamp(x, 0.0, 1.0); }
    double quantile(double u) const override { return u; }
    double tail_quantile(double q) const override { return 1.0 - q; }
    nlohmann::json descriptor() const override
    {
        return {{"name", "uniform01"}, {"params", nlohmann::json::object()}};
    }
};

struct Exponential final : DistributionModel {
    double rate;
    explicit Exponential(double r) : rate(r) {}
    double cdf(double x) const override { return x <= 0 ? 0.0 : -std::expm1(-rate * x); }
    double quantile(double u) const override { return -std::log1p(-u) / rate; }
    double tail_quantile(double q) const override { return -std::log(q) / rate; }
    nlohmann::json descriptor() const override
    {
        return {{"name", "exponential"}, {"params", {{"rate", rate}}}};
    }
};

struct BoundedPareto final : DistributionModel {
    double shape, cap, mass; // mass = 1 - cap^{-shape}
    BoundedPareto(double a, double h) : shape(a), cap(h), mass(-std::expm1(-a * std::log(h))) {}
    double cdf(double x) const override
    {
        if (x <= 1)
            return 0.0;
        if (x >= cap)
            return 1.0;
        return -std::expm1(-shape * std::log(x)) / mass;
    }
    double quantile(double u) const override { return std::min(cap, std::pow(1.0 - u * mass, -1.0 / shape)); }
    double tail_quantile(double q) const override
    {
        // 1 - (1-q) mass = cap^{-shape} + q mass
        return std::min(cap, std::pow(std::exp(-shape * std::log(cap)) + q * mass, -1.0 / shape));
    }
    nlohmann::json descriptor() const override
    {
        return {{"name", "bounded-pareto"}, {"params", {{"shape", shape}, {"cap", cap}, {"scale", 1.0}}}};
    }
};

struct Smoothed final : DistributionModel {
    struct Piece {
        double lo, hi, p;
    };
    std::vector<Piece> pieces;
    SmoothedDiscrete source;
    double lo_support, hi_support;

    explicit Smoothed(SmoothedDiscrete d) : source(std::move(d))
    {
        for (auto [value, p] : source.atoms) {
            const double lo = std::max(0.0, value - source.width / 2);
            pieces.push_back({lo, value + source.width / 2, p});
        }
        lo_support = hi_support = pieces.front().lo;
        for (const auto& pc : pieces) {
            lo_support = std::min(lo_support, pc.lo);
            hi_support = std::max(hi_support, pc.hi);
        }
    }
    double cdf(double x) const override
    {
        double c = 0;
        for (const auto& pc : pieces)
            c += pc.p * std::clamp((x - pc.lo) / (pc.hi - pc.lo), 0.0, 1.0);
        return std::min(c, 1.0);
    }
    double quantile(double u) const override
    {
        double lo = lo_support, hi = hi_support;
        if (u <= 0)
            return lo;
        for (int i = 0; i < 200; ++i) {
            const double mid = lo + (hi - lo) / 2;
            if (mid <= lo || mid >= hi)
                break;
            (cdf(mid) >= u ? hi : lo) = mid;
        }
        return hi;
    }
    nlohmann::json descriptor() const override
    {
        nlohmann::json atoms = nlohmann::json::array();
        for (auto [value, p] : source.atoms)
            atoms.push_back({value, p});
        return {{"name", "smoothed-discrete"}, {"params", {{"atoms", atoms}, {"width", source.width}}}};
    }
};

struct Scaled final : DistributionModel {
    Distribution base;
    double c;
    Scaled(Distribution b, double factor) : base(std::move(b)), c(factor) {}
    double cdf(double x) const override { return base.cdf(x / c); }
    double quantile(double u) const override { return c * base.quantile(u); }
    double tail_quantile(double q) const override { return c * base.tail_quantile(q); }
    nlohmann::json descriptor() const override
    {
        return {{"name", "scaled"}, {"params", {{"factor", c}, {"base", base.descriptor()}}}};
    }
};

void require(bool ok, const char* what)
{
    if (!ok)
        throw std::invalid_argument(what);
}

} // namespace

double Distribution::quantile(double u) const
{
    if (!(u >= 0 && u < 1))
        throw std::invalid_argument("quantile argument must lie in [0, 1)");
    return model_->quantile(u);
}

Distribution uniform01() { return Distribution(std::make_shared<Uniform01>()); }

Distribution exponential(double rate)
{
    require(std::isfinite(rate) && rate > 0, "exponential rate must be positive");
    return Distribution(std::make_shared<Exponential>(rate));
}

Distribution bounded_pareto(double shape, double cap)
{
    require(std::isfinite(shape) && shape > 0, "pareto shape must be positive");
    require(std::isfinite(cap) && cap > 1, "pareto cap must exceed the lower bound 1");
    return Distribution(std::make_shared<BoundedPareto>(shape, cap));
}

Distribution smooth(const SmoothedDiscrete& d)
{
    require(std::isfinite(d.width) && d.width > 0, "smoothing width must be positive");
    require(!d.atoms.empty(), "smoothed distribution needs at least one atom");
    double total = 0;
    for (auto [value, p] : d.atoms) {
        require(std::isfinite(value) && value >= 0, "atom values must be nonnegative");
        require(std::isfinite(p) && p > 0, "atom probabilities must be positive");
        total += p;
    }
    require(std::abs(total - 1) <= 1e-12, "atom probabilities must sum to 1");
    return Distribution(std::make_shared<Smoothed>(d));
}

Distribution scaled(const Distribution& d, double c)
{
    require(std::isfinite(c) && c > 0, "scale factor must be positive");
    return Distribution(std::make_shared<Scaled>(d, c));
}

Distribution parse_distribution(const std::string& text)
{
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            require(used == tok.size() && !tok.empty(), "malformed distribution parameter");
            args.push_back(v);
        }
    }
    if (name == "uniform01" && args.empty())
        return uniform01();
    if (name == "exponential" && args.size() <= 1)
        return exponential(args.empty() ? 1.0 : args[0]);
    if (name == "bounded-pareto" && args.size() == 2)
        return bounded_pareto(args[0], args[1]);
    throw std::invalid_argument("unknown distribution '" + text +
                                "' (expected uniform01, exponential:RATE, bounded-pareto:SHAPE,CAP)");
}

Distribution from_descriptor(const nlohmann::json& j)
{
    const std::string name = j.at("name").get<std::string>();
    const auto& p = j.at("params");
    if (name == "uniform01")
        return uniform01();
    if (name == "exponential")
        return exponential(p.at("rate").get<double>());
    if (name == "bounded-pareto")
        return bounded_pareto(p.at("shape").get<double>(), p.at("cap").get<double>());
    if (name == "smoothed-discrete") {
        SmoothedDiscrete s;
        s.width = p.at("width").get<double>();
        for (const auto& a : p.at("atoms"))
            s.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        return smooth(s);
    }
    if (name == "scaled")
        return scaled(from_descriptor(p.at("base")), p.at("factor").get<double>());
    throw std::invalid_argument("unknown distribution descriptor '" + name + "'");
}

double threshold_from_quantile(const Distribution& d, double q)
{
    if (!(q >= 0 && q <= 1))
        throw std::invalid_argument("acceptance quantile must lie in [0, 1]");
    if (q == 0)
        return std::numeric_limits<double>::infinity();
    return d.tail_quantile(q);
}

double prophet_value_exact(const Distribution& d, long n, const QuadratureSpec<double>& spec)
{
    if (n < 1)
        throw std::invalid_argument("prophet value needs n >= 1");
    const double inv_n = 1.0 / double(n);
    auto integrand = [&](double s) { return d.tail_quantile(-std::expm1(std::log(s) * inv_n)); };
    return integrate(integrand, 0.0, 1.0, spec);
}

} // namespace prophet
