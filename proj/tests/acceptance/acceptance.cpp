// Acceptance suite: one pass/fail line per criterion.
//
//   acceptance            run every criterion
//   acceptance <name>...  run the named criteria
//
// Exit status is 0 only if every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bsclt/cli.hpp"
#include "bsclt/clt_lab.hpp"
#include "bsclt/core_math.hpp"
#include "bsclt/lattice_mc.hpp"
#include "bsclt/pricing.hpp"

using namespace bsclt;

namespace {

const OptionSpec kExample{50.0, 52.0, 0.04, 1.0, 0.15};

// Fixed beforehand with a 40-digit mpmath quadrature of
// e^{-rt} * integral (X0 e^y - K)^+ phi_{(r - s^2/2) t, s sqrt(t)}(y) dy.
constexpr double kExampleOraclePrice = 3.0076149434583623;

// a lambda t (a - 2 eps) for a = 1, lambda = 2, t = 1, eps = 0.01.
constexpr double kJumpTailConstant = 1.96;

constexpr double kSigma2 = 0.0225;
constexpr std::uint64_t kLadder[] = {16, 256, 4096};
constexpr std::uint64_t kCltSamples = 100000;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// E[max(e^Y - M, 0)] by adaptive quadrature.
double quadrature_call_expectation(double mean, double sd, double m) {
    auto payoff = [=](double y) {
        const double z = (y - mean) / sd;
        const double norm = 1.0 / (sd * std::sqrt(2.0 * std::numbers::pi));
        return (std::exp(y - 0.5 * z * z) - m * std::exp(-0.5 * z * z)) * norm;
    };
    return integrate(payoff, std::log(m), kInf);
}

Outcome example_reproduction() {
    Outcome o;
    const PriceResult r = bs_call_price(kExample);
    o.require(std::fabs(*r.d_plus - 0.0802) <= 0.0005, fmt("d+ = %.6f vs 0.0802 +- 0.0005", *r.d_plus));
    o.require(std::fabs(*r.d_minus + 0.0698) <= 0.0005, fmt("d- = %.6f vs -0.0698 +- 0.0005", *r.d_minus));
    o.require(std::fabs(r.price - 3.04) <= 0.05, fmt("price = %.6f vs 3.04 +- 0.05", r.price));
    o.require(std::fabs(r.price - kExampleOraclePrice) <= 1e-8,
              fmt("|price - frozen oracle| = %.2e <= 1e-8", std::fabs(r.price - kExampleOraclePrice)));
    const NormalParams law = risk_neutral_params(kExample);
    const double quad = discount(kExample.spot * quadrature_call_expectation(law.mean, law.std_dev, 52.0 / 50.0),
                                 kExample.rate, kExample.expiry);
    o.require(std::fabs(r.price - quad) <= 1e-8, fmt("|price - live quadrature| = %.2e <= 1e-8", std::fabs(r.price - quad)));
    return o;
}

Outcome lemma_oracle() {
    Outcome o;
    const double mus[] = {-0.1, 0.0, 0.1, 0.2, 0.3};
    const double sds[] = {0.05, 0.1, 0.2, 0.4, 0.8};
    const double ms[] = {0.5, 0.8, 1.0, 1.25, 2.0};
    int within = 0;
    double worst = 0.0;
    for (double mu : mus) {
        for (double sd : sds) {
            for (double m : ms) {
                const double closed = lognormal_call_expectation({mu, sd}, m);
                const double quad = quadrature_call_expectation(mu, sd, m);
                const double gap = std::fabs(closed - quad);
                const double tol = std::max(1e-8, 1e-8 * closed);
                worst = std::max(worst, gap / tol);
                if (gap <= tol) ++within;
            }
        }
    }
    o.require(within == 125, fmt("%.0f/125 grid points within max(1e-8, 1e-8 value), worst gap/tol = %.3g",
                                 static_cast<double>(within), worst));
    return o;
}

Outcome pipeline_identity() {
    Outcome o;
    std::mt19937_64 gen(1000);
    std::uniform_real_distribution<double> spot(1.0, 500.0);
    std::uniform_real_distribution<double> moneyness(0.3, 2.0);
    std::uniform_real_distribution<double> rate(-0.03, 0.15);
    std::uniform_real_distribution<double> expiry(0.01, 5.0);
    std::uniform_real_distribution<double> vol(0.02, 1.0);
    double worst_price = 0.0;
    double worst_h = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x0 = spot(gen);
        const OptionSpec s{x0, x0 * moneyness(gen), rate(gen), expiry(gen), vol(gen)};
        const PriceResult r = bs_call_price(s);
        const LognormalCallTerms t = lognormal_call_terms(risk_neutral_params(s), s.strike / s.spot);
        worst_price = std::max(worst_price, std::fabs(r.price - discount(s.spot * t.value, s.rate, s.expiry)));
        worst_h = std::max({worst_h, std::fabs(t.h_plus - *r.d_plus), std::fabs(t.h_minus - *r.d_minus)});
    }
    o.require(worst_price <= 1e-10, fmt("max |C - e^{-rt} X0 E[(e^Y - K/X0)^+]| = %.2e <= 1e-10", worst_price));
    o.require(worst_h <= 1e-12, fmt("max |h - d| = %.2e <= 1e-12", worst_h));
    return o;
}

Outcome tree_convergence() {
    Outcome o;
    const double exact = bs_call_price(kExample).price;
    const std::uint64_t ladder[] = {16, 64, 256, 1024, 4096};
    std::vector<double> errs;
    for (std::uint64_t n : ladder) errs.push_back(std::fabs(crr_tree_price(kExample, {n}).price - exact));
    const double c = std::max(16.0 * errs[0], 64.0 * errs[1]);
    bool enveloped = true;
    std::string listing;
    for (std::size_t k = 0; k < errs.size(); ++k) {
        const double bound = 2.0 * c / static_cast<double>(ladder[k]);
        if (errs[k] > bound) enveloped = false;
        listing += fmt(" n=%.0f:%.2e", static_cast<double>(ladder[k]), errs[k]);
    }
    o.require(enveloped, fmt("errors within the decreasing envelope 2c/n, c = %.4f;", c) + listing);
    const double gap = std::fabs(crr_tree_price(kExample, {10000}).price - exact);
    o.require(gap <= 1e-3, fmt("gap at n = 1e4 = %.2e <= 1e-3", gap));
    return o;
}

Outcome monte_carlo() {
    Outcome o;
    const double exact = bs_call_price(kExample).price;
    const McConfig big{1000000, 20240601, 65536, 0};
    const PriceResult r = mc_price(kExample, big);
    o.require(std::fabs(r.price - exact) <= 3.0 * *r.std_error,
              fmt("|mc - closed| = %.2e <= 3 SE = %.2e", std::fabs(r.price - exact), 3.0 * *r.std_error));
    const ForwardCheck fwd = mc_forward_check(kExample, big);
    o.require(std::fabs(fwd.ratio - 1.0) <= 3.0 * fwd.std_error,
              fmt("forward ratio %.6f within 3 SE (%.2e) of 1", fwd.ratio, 3.0 * fwd.std_error));
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const PriceResult s = mc_price(kExample, {10000, 7000 + seed, 10000, 0});
        if (std::fabs(s.price - exact) <= 3.0 * *s.std_error) ++covered;
    }
    o.require(covered >= 47, fmt("3-sigma coverage %.0f/50 >= 47", static_cast<double>(covered)));
    return o;
}

Outcome clt_positive() {
    Outcome o;
    const ArraySpec spec{IncrementModel::two_point(kSigma2), 1.0, 1, kCltSamples, 16256, 0};
    const double eps = 0.01;
    const ConvergenceReport r = run_convergence_experiment(spec, kLadder, eps);
    o.require(r.verdict == Verdict::normal_limit, "verdict " + std::string(to_string(r.verdict)) + " == normal_limit");
    const double threshold = 1.628 / std::sqrt(static_cast<double>(kCltSamples));
    o.require(r.ks_statistics.back() < threshold,
              fmt("KS(n=4096) = %.5f < %.5f", r.ks_statistics.back(), threshold));
    bool zero_when_inside = true;
    for (std::size_t k = 0; k < r.n_ladder.size(); ++k) {
        const double radius = std::sqrt(kSigma2 / static_cast<double>(r.n_ladder[k]));
        if (radius < eps && (r.lindeberg_values[k] != 0.0 || r.lindeberg_estimates[k] != 0.0)) {
            zero_when_inside = false;
        }
    }
    o.require(zero_when_inside, "Lindeberg statistic exactly 0 once sqrt(sigma^2 t / n) < eps");
    return o;
}

Outcome clt_negative() {
    Outcome o;
    const IncrementModel jump = IncrementModel::poisson_jump(1.0, 2.0);
    const double eps = 0.01;
    const ArraySpec spec{jump, 1.0, 1, kCltSamples, 16257, 0};
    const ConvergenceReport r = run_convergence_experiment(spec, kLadder, eps);
    o.require(r.verdict == Verdict::non_normal_limit,
              "verdict " + std::string(to_string(r.verdict)) + " == non_normal_limit" +
                  fmt(" (KS(n=4096) = %.4f)", r.ks_statistics.back()));
    o.require(std::fabs(jump_tail_lower_bound(jump, 1.0, eps) - kJumpTailConstant) < 1e-15,
              "library jump-tail bound equals the precomputed 1.96");
    double lowest = kInf;
    for (double v : r.lindeberg_values) lowest = std::min(lowest, v);
    o.require(lowest >= kJumpTailConstant, fmt("min Lindeberg over ladder = %.6f >= %.2f", lowest, kJumpTailConstant));
    return o;
}

Outcome variance_linearity() {
    Outcome o;
    const std::vector<double> horizons{0.25, 0.5, 1.0, 2.0};
    for (const IncrementModel& m : {IncrementModel::two_point(kSigma2), IncrementModel::normal(kSigma2)}) {
        const std::string name(to_string(m.kind()));
        const LinearityFit fit = variance_linearity_check(m, horizons, kCltSamples, 31337);
        o.require(std::fabs(fit.slope - kSigma2) <= 3.0 * fit.slope_std_error,
                  name + fmt(" slope %.6f within 3 SE (%.2e) of 0.0225", fit.slope, 3.0 * fit.slope_std_error));
        o.require(std::fabs(fit.intercept) <= 3.0 * fit.intercept_std_error,
                  name + fmt(" intercept %.2e within 3 SE (%.2e) of 0", fit.intercept, 3.0 * fit.intercept_std_error));
        const AdditivityCheck add = variance_additivity_check(m, 0.5, 0.5, kCltSamples, 4242);
        o.require(std::fabs(add.combined - add.sum_of_parts) <= 3.0 * add.std_error,
                  name + fmt(" Var[Y_1] = %.6f vs Var[Y_.5] + Var[Y_.5'] = %.6f (3 SE %.2e)", add.combined,
                             add.sum_of_parts, 3.0 * add.std_error));
    }
    return o;
}

Outcome determinism() {
    Outcome o;
    using Args = std::vector<std::string>;
    const std::vector<Args> commands{
        {"mc", "--spot", "50", "--strike", "52", "--rate", "0.04", "--expiry", "1", "--vol", "0.15", "--paths",
         "200000", "--seed", "42"},
        {"clt-demo", "--model", "two_point", "--samples", "20000", "--seed", "5"},
        {"clt-demo", "--model", "poisson_jump", "--samples", "20000", "--seed", "6"},
        {"lindeberg", "--model", "normal", "--ladder", "100,1000,10000", "--samples", "50000", "--seed", "7"},
        {"var-linearity", "--model", "two_point", "--samples", "20000", "--seed", "8"},
    };
    auto run_once = [](Args args, const std::string& threads, const std::string& format) {
        args.insert(args.end(), {"--threads", threads, "--format", format});
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        return code == 0 ? out.str() : "exit " + std::to_string(code) + ": " + err.str();
    };
    int identical = 0;
    int total = 0;
    for (const Args& cmd : commands) {
        for (const char* format : {"json", "csv"}) {
            const std::string base = run_once(cmd, "1", format);
            for (const char* threads : {"1", "2", "8"}) {
                ++total;
                if (run_once(cmd, threads, format) == base && base.rfind("exit", 0) != 0) ++identical;
            }
        }
    }
    o.require(identical == total, fmt("%.0f/%.0f reruns byte-identical (threads 1, 2, 8; json and csv)",
                                      static_cast<double>(identical), static_cast<double>(total)));
    return o;
}

struct Criterion {
    const char* name;
    const char* title;
    double time_limit_s;
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"example", "Example reproduction", 1.0, example_reproduction},
        {"lemma_oracle", "Lognormal payoff lemma vs quadrature (125-point grid)", 10.0, lemma_oracle},
        {"pipeline_identity", "Pricing pipeline identity (1000 random specs)", 5.0, pipeline_identity},
        {"tree_convergence", "Tree convergence", 30.0, tree_convergence},
        {"monte_carlo", "Monte Carlo consistency", 60.0, monte_carlo},
        {"clt_positive", "CLT positive result (two_point)", 120.0, clt_positive},
        {"clt_negative", "CLT negative result (poisson_jump)", 120.0, clt_negative},
        {"variance_linearity", "Variance linearity and additivity", 60.0, variance_linearity},
        {"determinism", "Determinism across reruns and thread counts", 300.0, determinism},
    };

    std::vector<std::string> selected(argv + 1, argv + argc);
    int failures = 0;
    int ran = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        o.require(seconds < c.time_limit_s, fmt("runtime %.2fs < %.0fs", seconds, c.time_limit_s));
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str());
        if (!o.pass) ++failures;
    }
    if (ran == 0) {
        std::printf("no criterion matched\n");
        return 2;
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
