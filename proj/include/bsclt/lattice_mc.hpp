#pragma once

#include <cstdint>

#include "bsclt/pricing.hpp"

namespace bsclt {

struct TreeConfig {
    std::uint64_t steps = 1000;

    void validate() const;
};

struct McConfig {
    std::uint64_t paths = 100000;
    std::uint64_t seed = 0;
    std::uint64_t batch_size = 65536;
    /// Worker count, 0 = hardware concurrency. Never affects results.
    unsigned threads = 0;

    void validate() const;
};

/// One-step factors of a Cox-Ross-Rubinstein lattice.
struct CrrStep {
    double up;
    double down;
    double growth;       ///< e^{r t / n}
    double probability;  ///< (growth - down) / (up - down)
    double log_up;       ///< sigma sqrt(t / n)
};

/// Throws ParameterizationError when the step probability leaves (0, 1).
[[nodiscard]] CrrStep crr_step(const OptionSpec& spec, std::uint64_t steps);

/// Recombining binomial tree price of the call.
///
/// Backward induction up to 1000 steps, log-space binomial weights beyond.
/// Zero volatility (or expiry) returns the closed-form deterministic limit.
[[nodiscard]] PriceResult crr_tree_price(const OptionSpec& spec, const TreeConfig& cfg);

/// The two tree evaluators, exposed so tests can cross-check them.
[[nodiscard]] double crr_backward_induction(const OptionSpec& spec, std::uint64_t steps);
[[nodiscard]] double crr_log_weights(const OptionSpec& spec, std::uint64_t steps);

/// Monte Carlo estimate of e^{-rt} E[max(X0 e^Y - K, 0)], Y ~ risk_neutral_params(spec).
/// Path i draws from StreamRng(seed, i); output is independent of batch_size and threads.
[[nodiscard]] PriceResult mc_price(const OptionSpec& spec, const McConfig& cfg);

struct ForwardCheck {
    double ratio;      ///< estimate of E[X_t] / (X0 e^{rt})
    double std_error;
};

/// Monte Carlo check of E[X_t] = X0 e^{rt}; `ratio` should be within 3 standard errors of 1.
[[nodiscard]] ForwardCheck mc_forward_check(const OptionSpec& spec, const McConfig& cfg);

}  // namespace bsclt
