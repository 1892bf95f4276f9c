#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace bsclt {

/// Market and contract parameters of one European call.
struct OptionSpec {
    double spot = 0.0;        ///< X0, > 0
    double strike = 0.0;      ///< K, > 0
    double rate = 0.0;        ///< continuously compounded r
    double expiry = 0.0;      ///< t in years, >= 0
    double volatility = 0.0;  ///< sigma, annualized, >= 0

    /// Throws ValidationError naming the first field that breaks an invariant.
    void validate() const;

    /// sigma * sqrt(t), the standard deviation of the log-return to expiry.
    [[nodiscard]] double total_volatility() const;

    bool operator==(const OptionSpec&) const = default;
};

/// Mean and standard deviation of a normal log-return Y.
struct NormalParams {
    double mean = 0.0;
    double std_dev = 0.0;

    bool operator==(const NormalParams&) const = default;
};

enum class PricingMethod { closed_form, tree, monte_carlo };

[[nodiscard]] std::string_view to_string(PricingMethod method);

struct PriceResult {
    double price = 0.0;
    /// Absent in the degenerate sigma * sqrt(t) = 0 limit.
    std::optional<double> d_plus;
    std::optional<double> d_minus;
    PricingMethod method = PricingMethod::closed_form;
    std::optional<double> std_error;
    std::optional<std::uint64_t> nodes;
    std::map<std::string, double> detail;
};

struct DPlusMinus {
    double plus;
    double minus;
};

/// d± = log(e^{rt} X0 / K) / (sigma sqrt t) ± sigma sqrt(t) / 2.
/// Throws DomainError when sigma * sqrt(t) == 0.
[[nodiscard]] DPlusMinus d_plus_minus(const OptionSpec& spec);

/// C = X0 N(d+) - K e^{-rt} N(d-), with the deterministic limit
/// max(X0 - K e^{-rt}, 0) when sigma * sqrt(t) == 0.
[[nodiscard]] PriceResult bs_call_price(const OptionSpec& spec);

/// Expectation E[max(e^Y - M, 0)] split into its closed-form pieces.
struct LognormalCallTerms {
    double value;
    double expected_exp;  ///< E[e^Y] = e^{mu + s^2/2}
    double h_plus;
    double h_minus;
};

/// E[max(e^Y - M, 0)] = E[e^Y] N(h+) - M N(h-) for Y ~ N(mean, std_dev^2).
/// Throws DomainError when M <= 0 or std_dev <= 0.
[[nodiscard]] LognormalCallTerms lognormal_call_terms(const NormalParams& params, double threshold);

[[nodiscard]] double lognormal_call_expectation(const NormalParams& params, double threshold);

/// The normal law with variance sigma^2 t and E[e^Y] = e^{rt}: mean (r - sigma^2/2) t, sd sigma sqrt(t).
[[nodiscard]] NormalParams risk_neutral_params(const OptionSpec& spec);

/// value * e^{-rate * t}.
[[nodiscard]] double discount(double value, double rate, double t);

/// Lower no-arbitrage bound max(X0 - K e^{-rt}, 0).
[[nodiscard]] double intrinsic_lower_bound(const OptionSpec& spec);

}  // namespace bsclt
