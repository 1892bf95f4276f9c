#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bsclt/error.hpp"
#include "bsclt/lattice_mc.hpp"

namespace bsclt {

namespace {

constexpr std::uint64_t kBackwardInductionMaxSteps = 1000;

// Terminal asset price after k up-moves out of n.
double terminal_price(const OptionSpec& spec, const CrrStep& step, std::uint64_t k, std::uint64_t n) {
    const double moves = static_cast<double>(2 * static_cast<std::int64_t>(k) - static_cast<std::int64_t>(n));
    return spec.spot * std::exp(moves * step.log_up);
}

}  // namespace

void TreeConfig::validate() const {
    if (steps < 1) throw ValidationError("steps", "must be >= 1");
}

CrrStep crr_step(const OptionSpec& spec, std::uint64_t steps) {
    spec.validate();
    if (steps < 1) throw ValidationError("steps", "must be >= 1");
    const double dt = spec.expiry / static_cast<double>(steps);
    const double log_up = spec.volatility * std::sqrt(dt);
    const double up = std::exp(log_up);
    const double down = std::exp(-log_up);
    const double growth = std::exp(spec.rate * dt);
    const double p = (growth - down) / (up - down);
    if (!(p > 0.0 && p < 1.0)) {
        throw ParameterizationError("crr tree: risk-neutral step probability " + std::to_string(p) +
                                    " is outside (0, 1); increase the number of steps");
    }
    return {up, down, growth, p, log_up};
}

double crr_backward_induction(const OptionSpec& spec, std::uint64_t steps) {
    const CrrStep step = crr_step(spec, steps);
    const std::uint64_t n = steps;
    std::vector<double> values(n + 1);
    for (std::uint64_t k = 0; k <= n; ++k) {
        values[k] = std::max(terminal_price(spec, step, k, n) - spec.strike, 0.0);
    }
    const double step_discount = 1.0 / step.growth;
    const double p = step.probability;
    const double q = 1.0 - p;
    for (std::uint64_t level = n; level-- > 0;) {
        for (std::uint64_t k = 0; k <= level; ++k) {
            values[k] = step_discount * (p * values[k + 1] + q * values[k]);
        }
    }
    return values[0];
}

double crr_log_weights(const OptionSpec& spec, std::uint64_t steps) {
    const CrrStep step = crr_step(spec, steps);
    const std::uint64_t n = steps;
    const double nd = static_cast<double>(n);
    const double log_p = std::log(step.probability);
    const double log_q = std::log1p(-step.probability);
    const double log_n_fact = std::lgamma(nd + 1.0);
    double sum = 0.0;
    // Payoff is increasing in k; walk down from the top node until it vanishes.
    for (std::uint64_t k = n + 1; k-- > 0;) {
        const double payoff = terminal_price(spec, step, k, n) - spec.strike;
        if (payoff <= 0.0) break;
        const double kd = static_cast<double>(k);
        const double log_weight = log_n_fact - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
                                  kd * log_p + (nd - kd) * log_q;
        sum += std::exp(log_weight) * payoff;
    }
    return discount(sum, spec.rate, spec.expiry);
}

PriceResult crr_tree_price(const OptionSpec& spec, const TreeConfig& cfg) {
    spec.validate();
    cfg.validate();
    PriceResult result;
    if (!(spec.total_volatility() > 0.0)) {
        result = bs_call_price(spec);
    } else {
        const double raw = cfg.steps <= kBackwardInductionMaxSteps
                               ? crr_backward_induction(spec, cfg.steps)
                               : crr_log_weights(spec, cfg.steps);
        result.price = std::clamp(raw, intrinsic_lower_bound(spec), spec.spot);
        const auto [dp, dm] = d_plus_minus(spec);
        result.d_plus = dp;
        result.d_minus = dm;
        const CrrStep step = crr_step(spec, cfg.steps);
        result.detail["up"] = step.up;
        result.detail["down"] = step.down;
        result.detail["step_probability"] = step.probability;
    }
    result.method = PricingMethod::tree;
    result.nodes = (cfg.steps + 1) * (cfg.steps + 2) / 2;
    return result;
}

}  // namespace bsclt
