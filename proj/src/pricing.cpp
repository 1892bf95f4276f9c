#include "bsclt/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "bsclt/core_math.hpp"
#include "bsclt/error.hpp"

namespace bsclt {

void OptionSpec::validate() const {
    if (!std::isfinite(spot) || !(spot > 0.0)) throw ValidationError("spot", "must be finite and > 0");
    if (!std::isfinite(strike) || !(strike > 0.0)) {
        throw ValidationError("strike", "must be finite and > 0");
    }
    if (!std::isfinite(rate)) throw ValidationError("rate", "must be finite");
    if (!std::isfinite(expiry) || !(expiry >= 0.0)) {
        throw ValidationError("expiry", "must be finite and >= 0");
    }
    if (!std::isfinite(volatility) || !(volatility >= 0.0)) {
        throw ValidationError("volatility", "must be finite and >= 0");
    }
}

double OptionSpec::total_volatility() const { return volatility * std::sqrt(expiry); }

std::string_view to_string(PricingMethod method) {
    switch (method) {
        case PricingMethod::closed_form: return "closed_form";
        case PricingMethod::tree: return "tree";
        case PricingMethod::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

DPlusMinus d_plus_minus(const OptionSpec& spec) {
    spec.validate();
    const double s = spec.total_volatility();
    if (!(s > 0.0)) throw DomainError("d_plus_minus: degenerate volatility (sigma * sqrt(t) = 0)");
    const double centre = (spec.rate * spec.expiry + std::log(spec.spot / spec.strike)) / s;
    return {centre + 0.5 * s, centre - 0.5 * s};
}

double intrinsic_lower_bound(const OptionSpec& spec) {
    return std::max(spec.spot - discount(spec.strike, spec.rate, spec.expiry), 0.0);
}

PriceResult bs_call_price(const OptionSpec& spec) {
    spec.validate();
    PriceResult result;
    result.method = PricingMethod::closed_form;
    const double lower = intrinsic_lower_bound(spec);
    if (spec.expiry == 0.0) {
        result.price = std::max(spec.spot - spec.strike, 0.0);
        return result;
    }
    if (!(spec.total_volatility() > 0.0)) {
        result.price = lower;
        return result;
    }
    const auto [dp, dm] = d_plus_minus(spec);
    const double raw = spec.spot * norm_cdf(dp) -
                       discount(spec.strike, spec.rate, spec.expiry) * norm_cdf(dm);
    result.price = std::clamp(raw, lower, spec.spot);
    result.d_plus = dp;
    result.d_minus = dm;
    return result;
}

LognormalCallTerms lognormal_call_terms(const NormalParams& params, double threshold) {
    if (!std::isfinite(threshold) || !(threshold > 0.0)) {
        throw DomainError("lognormal_call_expectation: threshold M must be > 0");
    }
    if (!std::isfinite(params.mean)) throw DomainError("lognormal_call_expectation: mean not finite");
    if (!std::isfinite(params.std_dev) || !(params.std_dev > 0.0)) {
        throw DomainError("lognormal_call_expectation: std_dev must be > 0");
    }
    const double s = params.std_dev;
    const double half_var = 0.5 * s * s;
    // log(E[e^Y] / M) without forming E[e^Y] first.
    const double log_ratio = params.mean + half_var - std::log(threshold);
    const double h_plus = (log_ratio + half_var) / s;
    const double h_minus = (log_ratio - half_var) / s;
    const double expected_exp = std::exp(params.mean + half_var);
    const double value = expected_exp * norm_cdf(h_plus) - threshold * norm_cdf(h_minus);
    return {std::max(value, 0.0), expected_exp, h_plus, h_minus};
}

double lognormal_call_expectation(const NormalParams& params, double threshold) {
    return lognormal_call_terms(params, threshold).value;
}

NormalParams risk_neutral_params(const OptionSpec& spec) {
    spec.validate();
    const double var_rate = spec.volatility * spec.volatility;
    return {(spec.rate - 0.5 * var_rate) * spec.expiry, spec.total_volatility()};
}

double discount(double value, double rate, double t) { return value * std::exp(-rate * t); }

}  // namespace bsclt
