#include "weakslit/quadrature.hpp"

#include "weakslit/core_types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace weakslit::quadrature {
namespace {

constexpr int kOrder = 10;

struct Rule {
    std::array<double, kOrder> nodes{};
    std::array<double, kOrder> weights{};
};

// Legendre roots by Newton iteration from the Chebyshev-like initial guess.
Rule make_rule() {
    Rule rule;
    for (int i = 0; i < kOrder; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= kOrder; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const Rule& rule() {
    static const Rule r = make_rule();
    return r;
}

} // namespace

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels) {
    const Rule& gl = rule();
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double panel = 0.0;
        for (int i = 0; i < kOrder; ++i) {
            panel += gl.weights[i] * f(mid + 0.5 * h * gl.nodes[i]);
        }
        sum += panel;
    }
    return 0.5 * h * sum;
}

Result integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, Options opts) {
    std::vector<double> cuts{a};
    for (double bp : breakpoints) {
        if (bp > a && bp < b) {
            cuts.push_back(bp);
        }
    }
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(b);

    auto estimate = [&](int panels) {
        double total = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            total += gauss_legendre(f, cuts[k], cuts[k + 1], panels);
        }
        return total;
    };

    int panels = opts.initial_panels;
    double previous = estimate(panels);
    while (panels < opts.max_panels) {
        panels *= 2;
        const double current = estimate(panels);
        const double change = std::abs(current - previous);
        if (change <= opts.rel_tol * std::abs(current) || change <= opts.abs_floor) {
            return Result{current, change, panels};
        }
        previous = current;
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "quadrature did not converge on [" << a << ", " << b << "] after " << panels
        << " panels; last estimate " << previous;
    throw NumericalError(msg.str());
}

} // namespace weakslit::quadrature
