#include <algorithm>
#include <cmath>

#include "bsclt/core_math.hpp"
#include "bsclt/error.hpp"
#include "bsclt/lattice_mc.hpp"
#include "bsclt/parallel.hpp"
#include "bsclt/rng.hpp"

namespace bsclt {

namespace {

double log_return(const NormalParams& law, std::uint64_t seed, std::uint64_t path) {
    StreamRng rng(seed, path);
    return law.mean + law.std_dev * norm_quantile(rng.uniform_open());
}

}  // namespace

void McConfig::validate() const {
    if (paths < 2) throw ValidationError("paths", "must be >= 2");
    if (batch_size < 1) throw ValidationError("batch_size", "must be >= 1");
    if (batch_size > paths) throw ValidationError("batch_size", "must not exceed paths");
}

PriceResult mc_price(const OptionSpec& spec, const McConfig& cfg) {
    spec.validate();
    cfg.validate();
    PriceResult result;
    result.method = PricingMethod::monte_carlo;
    if (!(spec.total_volatility() > 0.0)) {
        result.price = bs_call_price(spec).price;
        result.std_error = 0.0;
        return result;
    }
    const NormalParams law = risk_neutral_params(spec);
    const double df = std::exp(-spec.rate * spec.expiry);
    const Moments m = deterministic_moments(cfg.paths, cfg.batch_size, cfg.threads, [&](std::uint64_t i) {
        const double y = log_return(law, cfg.seed, i);
        return df * std::max(spec.spot * std::exp(y) - spec.strike, 0.0);
    });
    result.price = m.mean;
    result.std_error = std::sqrt(m.variance() / static_cast<double>(m.count));
    const auto [dp, dm] = d_plus_minus(spec);
    result.d_plus = dp;
    result.d_minus = dm;
    return result;
}

ForwardCheck mc_forward_check(const OptionSpec& spec, const McConfig& cfg) {
    spec.validate();
    cfg.validate();
    if (!(spec.total_volatility() > 0.0)) return {1.0, 0.0};
    const NormalParams law = risk_neutral_params(spec);
    const double drift = spec.rate * spec.expiry;
    const Moments m = deterministic_moments(cfg.paths, cfg.batch_size, cfg.threads, [&](std::uint64_t i) {
        return std::exp(log_return(law, cfg.seed, i) - drift);
    });
    return {m.mean, std::sqrt(m.variance() / static_cast<double>(m.count))};
}

}  // namespace bsclt
