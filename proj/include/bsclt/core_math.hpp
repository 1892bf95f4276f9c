#pragma once

#include <cstddef>
#include <functional>
#include <limits>

namespace bsclt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A real number in [0, 1]. Converts implicitly to double.
class Probability {
public:
    /// Throws DomainError when `value` is NaN or outside [0, 1].
    explicit Probability(double value);

    [[nodiscard]] constexpr double value() const noexcept { return value_; }
    constexpr operator double() const noexcept { return value_; }

private:
    double value_;
};

/// Standard normal CDF, 0.5 * erfc(-x / sqrt(2)). Absolute error below 1e-15.
[[nodiscard]] Probability norm_cdf(double x);

/// Standard normal density exp(-x^2/2) / sqrt(2 pi).
[[nodiscard]] double norm_pdf(double x);

/// Inverse of the standard normal CDF on (0, 1) (Wichura's AS 241, relative error ~1e-16).
[[nodiscard]] double norm_quantile(double p);

struct QuadratureSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_subdivisions = 2000;

    /// Throws ValidationError naming the first bad field.
    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t intervals = 0;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) integration of `f` over [lower, upper].
///
/// Either endpoint may be infinite; half-lines are mapped onto a finite
/// interval with x = a + u/(1-u) and the whole line with x = u/(1-u^2) before
/// subdivision. The largest-error interval is bisected until the summed error
/// estimate falls below max(abs_tol, rel_tol * |value|).
///
/// Throws ConvergenceError (carrying the best estimate) when max_subdivisions
/// is reached first, and DomainError if `f` returns a non-finite value.
[[nodiscard]] QuadratureResult integrate_with_error(const Integrand& f, double lower, double upper,
                                                    const QuadratureSettings& settings = {});

/// Value-only form of integrate_with_error.
[[nodiscard]] double integrate(const Integrand& f, double lower, double upper,
                               const QuadratureSettings& settings = {});

}  // namespace bsclt
