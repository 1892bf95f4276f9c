#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bsclt/rng.hpp"

namespace bsclt {

enum class ModelKind { two_point, uniform, centered_exponential, normal, poisson_jump };

[[nodiscard]] std::string_view to_string(ModelKind kind);
/// Throws ValidationError for an unknown name.
[[nodiscard]] ModelKind parse_model_kind(std::string_view name);

/// Law of one mean-zero increment Y_{s+h} - Y_s, with variance per_unit_variance * h.
///
/// two_point:             +-sqrt(v h) with probability 1/2 each
/// uniform:               U(-sqrt(3 v h), +sqrt(3 v h))
/// centered_exponential:  sqrt(v h) (E - 1), E ~ Exp(1)
/// normal:                N(0, v h)
/// poisson_jump:          a (N - lambda h), N ~ Poisson(lambda h), v = a^2 lambda
class IncrementModel {
public:
    static IncrementModel two_point(double per_unit_variance);
    static IncrementModel uniform(double per_unit_variance);
    static IncrementModel centered_exponential(double per_unit_variance);
    static IncrementModel normal(double per_unit_variance);
    static IncrementModel poisson_jump(double jump_size, double intensity);

    [[nodiscard]] ModelKind kind() const noexcept { return kind_; }
    [[nodiscard]] double per_unit_variance() const noexcept { return per_unit_variance_; }
    [[nodiscard]] double jump_size() const noexcept { return jump_size_; }
    [[nodiscard]] double intensity() const noexcept { return intensity_; }

    [[nodiscard]] double mean(double h) const;
    [[nodiscard]] double variance(double h) const;

    /// One increment over a step of length h.
    [[nodiscard]] double draw(double h, StreamRng& rng) const;

    /// E[Z^2; |Z| > epsilon] for one increment Z over a step of length h.
    [[nodiscard]] double tail_second_moment(double h, double epsilon) const;

    bool operator==(const IncrementModel&) const = default;

private:
    IncrementModel(ModelKind kind, double per_unit_variance, double jump_size, double intensity);

    ModelKind kind_;
    double per_unit_variance_;
    double jump_size_ = 0.0;
    double intensity_ = 0.0;
};

/// Triangular array X_ni = Y_{ti/n} - Y_{t(i-1)/n}, i = 1..rows, replicated `samples` times.
struct ArraySpec {
    IncrementModel model = IncrementModel::normal(1.0);
    double horizon = 1.0;
    std::uint64_t rows = 1;
    std::uint64_t samples = 1;
    std::uint64_t seed = 0;
    /// Worker count, 0 = hardware concurrency. Never affects results.
    unsigned threads = 0;

    void validate() const;
};

/// Row sums sum_i X_ni (= Y_t - Y_0), one per sample. Sample j uses StreamRng(seed, j),
/// drawing cells in row order.
[[nodiscard]] std::vector<double> sample_row_sum(const ArraySpec& spec);

/// The single cell X_ni (1-based `cell`) of every sample, from the same streams as sample_row_sum.
[[nodiscard]] std::vector<double> sample_cell(const ArraySpec& spec, std::uint64_t cell);

struct LindebergEstimate {
    double estimate;   ///< Monte Carlo n E[Z^2; |Z| > eps]
    double std_error;
    std::optional<double> analytic;
};

/// n E[Z^2; |Z| > epsilon] for Z one increment over [0, horizon / n].
[[nodiscard]] LindebergEstimate lindeberg_statistic(const IncrementModel& model, std::uint64_t n,
                                                    double horizon, double epsilon,
                                                    std::uint64_t samples, std::uint64_t seed,
                                                    unsigned threads = 0);

/// n-independent lower bound a lambda t (a - 2 eps) on the poisson_jump Lindeberg statistic.
/// Throws DomainError for other models or when epsilon >= a / 2.
[[nodiscard]] double jump_tail_lower_bound(const IncrementModel& model, double horizon, double epsilon);

/// max_i E[X_ni^2] = per_unit_variance * horizon / n.
[[nodiscard]] double max_cell_variance(const IncrementModel& model, std::uint64_t n, double horizon);

struct KsResult {
    double statistic;
    double threshold_at_1pct;

    [[nodiscard]] bool rejects() const noexcept { return statistic >= threshold_at_1pct; }
};

/// One-sample Kolmogorov-Smirnov distance to N(mean, std_dev^2) with the asymptotic
/// 1% critical value 1.628 / sqrt(m). Throws InsufficientDataError below 100 samples.
[[nodiscard]] KsResult ks_normal_test(std::span<const double> samples, double mean, double std_dev);

/// Two-sample KS statistic with critical value 1.628 sqrt((m + k) / (m k)).
[[nodiscard]] KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct LinearityFit {
    double slope;
    double intercept;
    double max_residual;
    double slope_std_error;
    double intercept_std_error;
    std::vector<double> horizons;
    std::vector<double> variances;
    std::vector<double> variance_std_errors;
};

/// Estimate Var[Y_t - Y_0] at each horizon from `samples` simulated row sums of `cells`
/// cells and fit a least-squares line in t. Standard errors propagate the per-horizon
/// variance-estimator errors (from the sample fourth moment) through the fit.
[[nodiscard]] LinearityFit variance_linearity_check(const IncrementModel& model,
                                                    std::span<const double> horizons,
                                                    std::uint64_t samples, std::uint64_t seed,
                                                    std::uint64_t cells = 64, unsigned threads = 0);

struct AdditivityCheck {
    double combined;        ///< Var^[Y_{s+t} - Y_0]
    double sum_of_parts;    ///< Var^[Y_s - Y_0] + Var^[Y_t - Y_0], independent samples
    double std_error;       ///< of combined - sum_of_parts
};

[[nodiscard]] AdditivityCheck variance_additivity_check(const IncrementModel& model, double s,
                                                        double t, std::uint64_t samples,
                                                        std::uint64_t seed, std::uint64_t cells = 64,
                                                        unsigned threads = 0);

enum class Verdict { normal_limit, non_normal_limit, inconclusive };

[[nodiscard]] std::string_view to_string(Verdict verdict);

struct ConvergenceReport {
    std::vector<std::uint64_t> n_ladder;
    std::vector<double> ks_statistics;
    std::vector<double> ks_thresholds;
    std::vector<double> lindeberg_values;     ///< analytic
    std::vector<double> lindeberg_estimates;  ///< Monte Carlo
    std::vector<double> lindeberg_std_errors;
    std::vector<double> max_cell_variance;
    Verdict verdict = Verdict::inconclusive;
};

/// For each n: sample row sums, KS-test them against N(0, v t), and record the
/// Lindeberg statistic and max cell variance. `spec.rows` is ignored.
///
/// normal_limit: largest-n KS below threshold and the Lindeberg values fall below
///               half the first value and below 0.1 v t.
/// non_normal_limit: largest-n KS at or above threshold.
[[nodiscard]] ConvergenceReport run_convergence_experiment(const ArraySpec& spec,
                                                           std::span<const std::uint64_t> n_ladder,
                                                           double epsilon);

}  // namespace bsclt
