#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "prophet/quadrature.hpp"
#include "prophet/random.hpp"

namespace prophet {

namespace detail {
struct DistributionModel {
    virtual ~DistributionModel() = default;
    virtual double cdf(double x) const = 0;
    virtual double quantile(double u) const = 0;
    // x with P(X >= x) = q; overridden where 1 - q would lose digits.
    virtual double tail_quantile(double q) const { return quantile(1.0 - q); }
    virtual nlohmann::json descriptor() const = 0;
};
} // namespace detail

// Immutable handle to a continuous distribution on [0, inf).
class Distribution {
public:
    explicit Distribution(std::shared_ptr<const detail::DistributionModel> m) : model_(std::move(m)) {}

    double cdf(double x) const { return model_->cdf(x); }
    // inf{x : cdf(x) >= u} for u in [0, 1).
    double quantile(double u) const;
    double tail_quantile(double q) const { return model_->tail_quantile(q); }
    double sample(Rng& rng) const { return model_->tail_quantile(1.0 - rng.uniform()); }
    nlohmann::json descriptor() const { return model_->descriptor(); }

private:
    std::shared_ptr<const detail::DistributionModel> model_;
};

struct SmoothedDiscrete {
    std::vector<std::pair<double, double>> atoms; // (value, probability)
    double width = 1e-6;
};

Distribution uniform01();
Distribution exponential(double rate);
// Pareto with lower bound 1 and shape alpha, truncated at cap > 1.
Distribution bounded_pareto(double shape, double cap);
Distribution smooth(const SmoothedDiscrete& d);
// Values multiplied by c > 0.
Distribution scaled(const Distribution& d, double c);

// Parses "uniform01", "exponential:RATE", "bounded-pareto:SHAPE,CAP".
Distribution parse_distribution(const std::string& text);
Distribution from_descriptor(const nlohmann::json& j);

// Threshold x with P(X >= x) = q. q = 0 means "never accept" and returns
// +infinity, which no finite draw reaches.
double threshold_from_quantile(const Distribution& d, double q);

// E[max of n draws] = int_0^1 F^{-1}(1-u) n (1-u)^{n-1} du, evaluated after
// the change of variable s = (1-u)^n.
double prophet_value_exact(const Distribution& d, long n, const QuadratureSpec<double>& spec = {});

} // namespace prophet
