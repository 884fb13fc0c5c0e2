#pragma once

#include <functional>
#include <span>

namespace weakslit::quadrature {

struct Result {
    double value;
    double last_change; // |I_n - I_{n/2}| at convergence
    int panels;         // per sub-interval at convergence
};

struct Options {
    double rel_tol = 1e-8;
    double abs_floor = 1e-300; // convergence also accepted once |change| <= abs_floor
    int initial_panels = 4;
    int max_panels = 1 << 16;
};

/// Composite 10-point Gauss-Legendre rule on [a, b] with `panels` equal panels.
[[nodiscard]] double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                    int panels);

/// Integrates f over [a, b], doubling the panel count until two successive
/// estimates agree to `rel_tol`. Interior `breakpoints` (e.g. payoff kinks)
/// split the interval so every panel sees a smooth integrand.
///
/// Throws NumericalError with the last two estimates when max_panels is reached.
[[nodiscard]] Result integrate(const std::function<double(double)>& f, double a, double b,
                               std::span<const double> breakpoints = {}, Options opts = {});

} // namespace weakslit::quadrature
