#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "bsclt/core_math.hpp"
#include "bsclt/error.hpp"

namespace bsclt {

namespace {

// Kronrod 15-point abscissae (positive half), Kronrod weights and the
// embedded 7-point Gauss weights (on the odd-indexed Kronrod nodes).
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

// One GK15 panel with the QUADPACK error heuristic.
template <class G>
Segment gauss_kronrod(const G& g, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = g(centre);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::fabs(resk);
    double fv1[7];
    double fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = g(centre - dx);
        const double f2 = g(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
    }
    const double value = resk * half;
    resabs *= std::fabs(half);
    resasc *= std::fabs(half);
    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    constexpr double kTiny = std::numeric_limits<double>::min();
    if (resabs > kTiny / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    return {a, b, value, err};
}

template <class G>
QuadratureResult adaptive(const G& g, double a, double b, const QuadratureSettings& s) {
    std::priority_queue<Segment> heap;
    const Segment first = gauss_kronrod(g, a, b);
    heap.push(first);
    double total = first.value;
    double total_err = first.error;
    std::size_t intervals = 1;
    auto tolerance = [&] { return std::max(s.abs_tol, s.rel_tol * std::fabs(total)); };

    while (total_err > tolerance()) {
        if (intervals >= s.max_subdivisions) {
            throw ConvergenceError("integrate: no convergence within " +
                                       std::to_string(s.max_subdivisions) + " subdivisions",
                                   total, total_err);
        }
        const Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw ConvergenceError("integrate: interval cannot be subdivided further", total,
                                   total_err);
        }
        heap.pop();
        const Segment left = gauss_kronrod(g, worst.a, mid);
        const Segment right = gauss_kronrod(g, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Re-sum to shed drift from the incremental updates.
    double value = 0.0;
    double err = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {value, err, intervals};
}

}  // namespace

void QuadratureSettings::validate() const {
    if (!(abs_tol > 0.0)) throw ValidationError("abs_tol", "must be > 0");
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol", "must be > 0");
    if (max_subdivisions < 1) throw ValidationError("max_subdivisions", "must be >= 1");
}

QuadratureResult integrate_with_error(const Integrand& f, double lower, double upper,
                                      const QuadratureSettings& settings) {
    settings.validate();
    if (std::isnan(lower) || std::isnan(upper)) throw DomainError("integrate: NaN endpoint");
    if (lower == upper) return {0.0, 0.0, 0};
    if (lower > upper) {
        QuadratureResult r = integrate_with_error(f, upper, lower, settings);
        r.value = -r.value;
        return r;
    }

    auto eval = [&f](double x) {
        const double y = f(x);
        if (!std::isfinite(y)) {
            throw DomainError("integrate: integrand is not finite at x = " + std::to_string(x));
        }
        return y;
    };

    const bool lo_inf = std::isinf(lower);
    const bool hi_inf = std::isinf(upper);
    if (!lo_inf && !hi_inf) {
        return adaptive(eval, lower, upper, settings);
    }
    if (lo_inf && hi_inf) {
        // x = u / (1 - u^2), u in (-1, 1)
        auto g = [&eval](double u) {
            const double w = 1.0 - u * u;
            return eval(u / w) * (1.0 + u * u) / (w * w);
        };
        return adaptive(g, -1.0, 1.0, settings);
    }
    if (hi_inf) {
        // x = a + u / (1 - u), u in [0, 1)
        auto g = [&eval, lower](double u) {
            const double w = 1.0 - u;
            return eval(lower + u / w) / (w * w);
        };
        return adaptive(g, 0.0, 1.0, settings);
    }
    // x = b - u / (1 - u), u in [0, 1)
    auto g = [&eval, upper](double u) {
        const double w = 1.0 - u;
        return eval(upper - u / w) / (w * w);
    };
    return adaptive(g, 0.0, 1.0, settings);
}

double integrate(const Integrand& f, double lower, double upper, const QuadratureSettings& settings) {
    return integrate_with_error(f, lower, upper, settings).value;
}

}  // namespace bsclt
