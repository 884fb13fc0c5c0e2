#include "weakslit/kernel.hpp"

#include "weakslit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace weakslit {

double bs_kernel(double x, double tau, double x_prime, const MarketParams& params) {
    if (!(tau > 0.0)) {
        throw DomainError("bs_kernel: tau must be positive");
    }
    const double var = tau * params.variance_rate();
    const double u = params.drift_offset(x, x_prime, tau);
    return std::exp(-params.r * tau) / std::sqrt(2.0 * std::numbers::pi * var) *
           std::exp(-u * u / (2.0 * var));
}

double bs_exponent_f(double x_i, double x_f, double T, const MarketParams& params) {
    if (!(T > 0.0)) {
        throw DomainError("bs_exponent_f: T must be positive");
    }
    const double u = params.drift_offset(x_i, x_f, T);
    return -u * u / (2.0 * T * params.variance_rate());
}

double GenericKernel::log_amplitude(double x_i, double x_f, double T) const {
    return std::log(amplitude) + f(x_i, x_f, T);
}

GenericKernel GenericKernel::black_scholes(const MarketParams& params) {
    const double A = std::exp(-params.r * params.T) /
                     std::sqrt(2.0 * std::numbers::pi * params.T * params.variance_rate());
    return GenericKernel{A, [params](double x_i, double x_f, double T) {
                             return bs_exponent_f(x_i, x_f, T, params);
                         }};
}

double f_odd(const GenericKernel& kernel, double x_i, double x_f, double T) {
    return 0.5 * (kernel.f(x_i, x_f, T) - kernel.f(-x_i, x_f, T));
}

double f_odd_final(const GenericKernel& kernel, double x_i, double x_f, double T) {
    return 0.5 * (kernel.f(x_i, x_f, T) - kernel.f(x_i, -x_f, T));
}

Payoff Payoff::make(PayoffKind kind, double strike) {
    if (!(strike > 0.0) || !std::isfinite(strike)) {
        throw DomainError("Payoff: strike must be positive");
    }
    return Payoff{kind, strike};
}

double Payoff::operator()(double S) const noexcept {
    return kind == PayoffKind::call ? std::max(S - strike, 0.0) : std::max(strike - S, 0.0);
}

double price_option(const Payoff& payoff, const MarketParams& params, double tau, double x,
                    LogPriceFrame frame) {
    if (!(tau > 0.0)) {
        throw DomainError("price_option: tau must be positive");
    }
    const double mean = x + tau * params.log_drift();
    const double half_width = 10.0 * params.sigma * std::sqrt(tau);
    const std::array<double, 1> kink{std::log(payoff.strike) - frame.c};
    auto integrand = [&](double x_prime) {
        return bs_kernel(x, tau, x_prime, params) * payoff(from_centered(x_prime, frame));
    };
    // Payoff values scale with the strike; an absolute floor keeps far
    // out-of-the-money options (value ~ 0) from stalling the doubling loop.
    quadrature::Options opts;
    opts.abs_floor = 1e-14 * payoff.strike;
    return quadrature::integrate(integrand, mean - half_width, mean + half_width, kink, opts).value;
}

double parity_gap(double call_value, double put_value, double S, double K, double r,
                  double tau) noexcept {
    return call_value + K * std::exp(-r * tau) - put_value - S;
}

} // namespace weakslit
