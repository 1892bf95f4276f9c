#include "bsclt/clt_lab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsclt/core_math.hpp"
#include "bsclt/error.hpp"
#include "bsclt/parallel.hpp"

namespace bsclt {

namespace {

constexpr std::uint64_t kSampleBatch = 1024;
constexpr double kMaxPoissonMean = 700.0;

void require_positive(double value, const char* field) {
    if (!std::isfinite(value) || !(value > 0.0)) throw ValidationError(field, "must be finite and > 0");
}

void require_step(double h) {
    if (!std::isfinite(h) || !(h > 0.0)) throw DomainError("increment step h must be finite and > 0");
}

double poisson_draw(double mean, double u) {
    double pmf = std::exp(-mean);
    double cdf = pmf;
    std::uint64_t k = 0;
    while (u > cdf && pmf > 0.0) {
        ++k;
        pmf *= mean / static_cast<double>(k);
        cdf += pmf;
    }
    return static_cast<double>(k);
}

double poisson_tail_second_moment(double a, double mean, double epsilon) {
    const double spread = 40.0 * std::sqrt(mean) + 40.0;
    const auto first = static_cast<std::uint64_t>(std::max(0.0, std::floor(mean - spread)));
    const auto last = static_cast<std::uint64_t>(std::ceil(mean + spread));
    const double log_mean = std::log(mean);
    double total = 0.0;
    for (std::uint64_t k = first; k <= last; ++k) {
        const double kd = static_cast<double>(k);
        const double z = a * (kd - mean);
        if (std::fabs(z) <= epsilon) continue;
        const double pmf = std::exp(kd * log_mean - mean - std::lgamma(kd + 1.0));
        total += pmf * z * z;
    }
    return total;
}

struct VarianceEstimate {
    double variance;
    double std_error;
};

// Unbiased sample variance and its standard error from the fourth central moment.
VarianceEstimate estimate_variance(const std::vector<double>& xs) {
    const auto m = static_cast<double>(xs.size());
    if (xs.size() < 4) throw InsufficientDataError("variance estimate needs at least 4 samples");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= m;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : xs) {
        const double d2 = (x - mean) * (x - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    const double var_biased = m2 / m;
    m4 /= m;
    const double var = m2 / (m - 1.0);
    const double est_var = std::max(0.0, (m4 - var_biased * var_biased * (m - 3.0) / (m - 1.0)) / m);
    return {var, std::sqrt(est_var)};
}

VarianceEstimate simulated_variance(const IncrementModel& model, double horizon, std::uint64_t cells,
                                    std::uint64_t samples, std::uint64_t seed, unsigned threads) {
    ArraySpec spec{model, horizon, cells, samples, seed, threads};
    return estimate_variance(sample_row_sum(spec));
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::two_point: return "two_point";
        case ModelKind::uniform: return "uniform";
        case ModelKind::centered_exponential: return "centered_exponential";
        case ModelKind::normal: return "normal";
        case ModelKind::poisson_jump: return "poisson_jump";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    for (ModelKind k : {ModelKind::two_point, ModelKind::uniform, ModelKind::centered_exponential,
                        ModelKind::normal, ModelKind::poisson_jump}) {
        if (to_string(k) == name) return k;
    }
    throw ValidationError("model", "unknown model kind '" + std::string(name) + "'");
}

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::normal_limit: return "normal_limit";
        case Verdict::non_normal_limit: return "non_normal_limit";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

IncrementModel::IncrementModel(ModelKind kind, double per_unit_variance, double jump_size,
                               double intensity)
    : kind_(kind), per_unit_variance_(per_unit_variance), jump_size_(jump_size), intensity_(intensity) {
    require_positive(per_unit_variance_, "per_unit_variance");
}

IncrementModel IncrementModel::two_point(double v) { return {ModelKind::two_point, v, 0.0, 0.0}; }
IncrementModel IncrementModel::uniform(double v) { return {ModelKind::uniform, v, 0.0, 0.0}; }
IncrementModel IncrementModel::centered_exponential(double v) {
    return {ModelKind::centered_exponential, v, 0.0, 0.0};
}
IncrementModel IncrementModel::normal(double v) { return {ModelKind::normal, v, 0.0, 0.0}; }

IncrementModel IncrementModel::poisson_jump(double jump_size, double intensity) {
    require_positive(jump_size, "jump_size");
    require_positive(intensity, "intensity");
    return {ModelKind::poisson_jump, jump_size * jump_size * intensity, jump_size, intensity};
}

double IncrementModel::mean(double h) const {
    require_step(h);
    return 0.0;
}

double IncrementModel::variance(double h) const {
    require_step(h);
    return per_unit_variance_ * h;
}

double IncrementModel::draw(double h, StreamRng& rng) const {
    const double scale = std::sqrt(per_unit_variance_ * h);
    switch (kind_) {
        case ModelKind::two_point:
            return (rng.next_u64() >> 63) != 0 ? scale : -scale;
        case ModelKind::uniform:
            return std::sqrt(3.0) * scale * (2.0 * rng.uniform() - 1.0);
        case ModelKind::centered_exponential:
            return scale * (-std::log(rng.uniform_open()) - 1.0);
        case ModelKind::normal:
            return scale * norm_quantile(rng.uniform_open());
        case ModelKind::poisson_jump: {
            const double mean_jumps = intensity_ * h;
            if (mean_jumps > kMaxPoissonMean) {
                throw DomainError("poisson_jump: intensity * h exceeds " + std::to_string(kMaxPoissonMean));
            }
            return jump_size_ * (poisson_draw(mean_jumps, rng.uniform()) - mean_jumps);
        }
    }
    throw ValidationError("model", "unknown model kind");
}

double IncrementModel::tail_second_moment(double h, double epsilon) const {
    require_step(h);
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
    const double var = per_unit_variance_ * h;
    const double s = std::sqrt(var);
    switch (kind_) {
        case ModelKind::two_point:
            return s > epsilon ? var : 0.0;
        case ModelKind::uniform: {
            const double b = std::sqrt(3.0) * s;
            return b > epsilon ? (b * b * b - epsilon * epsilon * epsilon) / (3.0 * b) : 0.0;
        }
        case ModelKind::centered_exponential: {
            // Z = s (E - 1): tails E > 1 + eps/s and E < 1 - eps/s.
            const double upper = 1.0 + epsilon / s;
            const double lower = 1.0 - epsilon / s;
            double tail = std::exp(-upper) * (upper * upper + 1.0);
            if (lower > 0.0) tail += -std::expm1(-lower) - std::exp(-lower) * lower * lower;
            return var * tail;
        }
        case ModelKind::normal: {
            const double c = epsilon / s;
            return 2.0 * var * (c * norm_pdf(c) + norm_cdf(-c));
        }
        case ModelKind::poisson_jump:
            return poisson_tail_second_moment(jump_size_, intensity_ * h, epsilon);
    }
    throw ValidationError("model", "unknown model kind");
}

void ArraySpec::validate() const {
    require_positive(horizon, "horizon");
    if (rows < 1) throw ValidationError("rows", "must be >= 1");
    if (samples < 1) throw ValidationError("samples", "must be >= 1");
}

std::vector<double> sample_row_sum(const ArraySpec& spec) {
    spec.validate();
    const double h = spec.horizon / static_cast<double>(spec.rows);
    std::vector<double> sums(spec.samples);
    parallel_for_batches(spec.samples, kSampleBatch, spec.threads,
                         [&](std::uint64_t first, std::uint64_t last) {
                             for (std::uint64_t j = first; j < last; ++j) {
                                 StreamRng rng(spec.seed, j);
                                 double sum = 0.0;
                                 for (std::uint64_t i = 0; i < spec.rows; ++i) sum += spec.model.draw(h, rng);
                                 sums[j] = sum;
                             }
                         });
    return sums;
}

std::vector<double> sample_cell(const ArraySpec& spec, std::uint64_t cell) {
    spec.validate();
    if (cell < 1 || cell > spec.rows) throw ValidationError("cell", "must lie in [1, rows]");
    const double h = spec.horizon / static_cast<double>(spec.rows);
    std::vector<double> cells(spec.samples);
    parallel_for_batches(spec.samples, kSampleBatch, spec.threads,
                         [&](std::uint64_t first, std::uint64_t last) {
                             for (std::uint64_t j = first; j < last; ++j) {
                                 StreamRng rng(spec.seed, j);
                                 double x = 0.0;
                                 for (std::uint64_t i = 0; i < cell; ++i) x = spec.model.draw(h, rng);
                                 cells[j] = x;
                             }
                         });
    return cells;
}

LindebergEstimate lindeberg_statistic(const IncrementModel& model, std::uint64_t n, double horizon,
                                      double epsilon, std::uint64_t samples, std::uint64_t seed,
                                      unsigned threads) {
    if (n < 1) throw ValidationError("n", "must be >= 1");
    require_positive(horizon, "horizon");
    require_positive(epsilon, "epsilon");
    if (samples < 2) throw ValidationError("samples", "must be >= 2");
    const double h = horizon / static_cast<double>(n);
    const double nd = static_cast<double>(n);
    const Moments m = deterministic_moments(samples, kReductionBlock, threads, [&](std::uint64_t j) {
        StreamRng rng(seed, j);
        const double z = model.draw(h, rng);
        return std::fabs(z) > epsilon ? nd * z * z : 0.0;
    });
    return {m.mean, std::sqrt(m.variance() / static_cast<double>(m.count)),
            nd * model.tail_second_moment(h, epsilon)};
}

double jump_tail_lower_bound(const IncrementModel& model, double horizon, double epsilon) {
    if (model.kind() != ModelKind::poisson_jump) {
        throw DomainError("jump_tail_lower_bound: only defined for poisson_jump");
    }
    require_positive(horizon, "horizon");
    const double a = model.jump_size();
    if (!(epsilon > 0.0 && 2.0 * epsilon < a)) {
        throw DomainError("jump_tail_lower_bound: requires 0 < epsilon < jump_size / 2");
    }
    return a * model.intensity() * horizon * (a - 2.0 * epsilon);
}

double max_cell_variance(const IncrementModel& model, std::uint64_t n, double horizon) {
    if (n < 1) throw ValidationError("n", "must be >= 1");
    require_positive(horizon, "horizon");
    return model.per_unit_variance() * horizon / static_cast<double>(n);
}

KsResult ks_normal_test(std::span<const double> samples, double mean, double std_dev) {
    if (samples.size() < 100) {
        throw InsufficientDataError("ks_normal_test: need at least 100 samples, got " +
                                    std::to_string(samples.size()));
    }
    if (!std::isfinite(std_dev) || !(std_dev > 0.0)) throw DomainError("ks_normal_test: std_dev must be > 0");
    if (!std::isfinite(mean)) throw DomainError("ks_normal_test: mean must be finite");
    std::vector<double> z(samples.begin(), samples.end());
    for (double& x : z) x = (x - mean) / std_dev;
    std::sort(z.begin(), z.end());
    const auto m = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = norm_cdf(z[i]);
        const double above = static_cast<double>(i + 1) / m - f;
        const double below = f - static_cast<double>(i) / m;
        d = std::max({d, above, below});
    }
    return {d, 1.628 / std::sqrt(m)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InsufficientDataError("ks_two_sample: empty sample");
    std::vector<double> xs(a.begin(), a.end());
    std::vector<double> ys(b.begin(), b.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const auto na = static_cast<double>(xs.size());
    const auto nb = static_cast<double>(ys.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < xs.size() && j < ys.size()) {
        const double x = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] == x) ++i;
        while (j < ys.size() && ys[j] == x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return {d, 1.628 * std::sqrt((na + nb) / (na * nb))};
}

LinearityFit variance_linearity_check(const IncrementModel& model, std::span<const double> horizons,
                                      std::uint64_t samples, std::uint64_t seed, std::uint64_t cells,
                                      unsigned threads) {
    std::vector<double> ts(horizons.begin(), horizons.end());
    for (double t : ts) require_positive(t, "horizons");
    std::vector<double> sorted = ts;
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 3) {
        throw ValidationError("horizons", "need at least 3 distinct values");
    }
    if (cells < 1) throw ValidationError("cells", "must be >= 1");

    LinearityFit fit{};
    fit.horizons = ts;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const VarianceEstimate v = simulated_variance(model, ts[k], cells, samples, derive_seed(seed, k), threads);
        fit.variances.push_back(v.variance);
        fit.variance_std_errors.push_back(v.std_error);
    }

    const auto count = static_cast<double>(ts.size());
    double t_bar = 0.0;
    for (double t : ts) t_bar += t;
    t_bar /= count;
    double sxx = 0.0;
    for (double t : ts) sxx += (t - t_bar) * (t - t_bar);

    double slope = 0.0;
    double intercept = 0.0;
    double slope_var = 0.0;
    double intercept_var = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double w_slope = (ts[k] - t_bar) / sxx;
        const double w_intercept = 1.0 / count - t_bar * w_slope;
        const double se2 = fit.variance_std_errors[k] * fit.variance_std_errors[k];
        slope += w_slope * fit.variances[k];
        intercept += w_intercept * fit.variances[k];
        slope_var += w_slope * w_slope * se2;
        intercept_var += w_intercept * w_intercept * se2;
    }
    fit.slope = slope;
    fit.intercept = intercept;
    fit.slope_std_error = std::sqrt(slope_var);
    fit.intercept_std_error = std::sqrt(intercept_var);
    fit.max_residual = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        fit.max_residual = std::max(fit.max_residual, std::fabs(fit.variances[k] - (intercept + slope * ts[k])));
    }
    return fit;
}

AdditivityCheck variance_additivity_check(const IncrementModel& model, double s, double t,
                                          std::uint64_t samples, std::uint64_t seed,
                                          std::uint64_t cells, unsigned threads) {
    require_positive(s, "s");
    require_positive(t, "t");
    const VarianceEstimate whole = simulated_variance(model, s + t, cells, samples, derive_seed(seed, 0), threads);
    const VarianceEstimate first = simulated_variance(model, s, cells, samples, derive_seed(seed, 1), threads);
    const VarianceEstimate second = simulated_variance(model, t, cells, samples, derive_seed(seed, 2), threads);
    return {whole.variance, first.variance + second.variance,
            std::sqrt(whole.std_error * whole.std_error + first.std_error * first.std_error +
                      second.std_error * second.std_error)};
}

ConvergenceReport run_convergence_experiment(const ArraySpec& spec, std::span<const std::uint64_t> n_ladder,
                                             double epsilon) {
    spec.validate();
    require_positive(epsilon, "epsilon");
    if (n_ladder.empty()) throw ValidationError("n_ladder", "must not be empty");
    for (std::size_t k = 0; k < n_ladder.size(); ++k) {
        if (n_ladder[k] < 1) throw ValidationError("n_ladder", "entries must be >= 1");
        if (k > 0 && n_ladder[k] <= n_ladder[k - 1]) {
            throw ValidationError("n_ladder", "must be strictly increasing");
        }
    }

    const double total_variance = spec.model.per_unit_variance() * spec.horizon;
    const double limit_sd = std::sqrt(total_variance);
    ConvergenceReport report;
    for (std::uint64_t n : n_ladder) {
        ArraySpec level = spec;
        level.rows = n;
        const std::vector<double> sums = sample_row_sum(level);
        const KsResult ks = ks_normal_test(sums, 0.0, limit_sd);
        const LindebergEstimate lind = lindeberg_statistic(spec.model, n, spec.horizon, epsilon,
                                                           std::max<std::uint64_t>(spec.samples, 2),
                                                           derive_seed(spec.seed, n), spec.threads);
        report.n_ladder.push_back(n);
        report.ks_statistics.push_back(ks.statistic);
        report.ks_thresholds.push_back(ks.threshold_at_1pct);
        report.lindeberg_values.push_back(*lind.analytic);
        report.lindeberg_estimates.push_back(lind.estimate);
        report.lindeberg_std_errors.push_back(lind.std_error);
        report.max_cell_variance.push_back(max_cell_variance(spec.model, n, spec.horizon));
    }

    const bool ks_passes = report.ks_statistics.back() < report.ks_thresholds.back();
    const double first = report.lindeberg_values.front();
    const double last = report.lindeberg_values.back();
    const bool lindeberg_vanishing = last < 0.5 * first && last < 0.1 * total_variance;
    if (!ks_passes) {
        report.verdict = Verdict::non_normal_limit;
    } else if (lindeberg_vanishing) {
        report.verdict = Verdict::normal_limit;
    } else {
        report.verdict = Verdict::inconclusive;
    }
    return report;
}

}  // namespace bsclt
