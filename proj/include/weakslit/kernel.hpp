#pragma once

#include "weakslit/core_types.hpp"

#include <functional>

namespace weakslit {

/// Black-Scholes pricing kernel p(x, tau; x') in centered log-price.
///
///   p = e^{-r tau} (2 pi tau sigma^2)^{-1/2} exp(-(x - x' + tau (r - sigma^2/2))^2 / (2 tau sigma^2))
///
/// x is the present log-price, x' the log-price at expiry. Only params.r and
/// params.sigma are used; tau is the backward time. tau <= 0 throws DomainError
/// (the delta limit is never evaluated pointwise).
[[nodiscard]] double bs_kernel(double x, double tau, double x_prime, const MarketParams& params);

/// Exponent of the kernel amplitude between slit x_i and endpoint x_f over horizon T:
/// -(x_i - x_f + T (r - sigma^2/2))^2 / (2 T sigma^2).
[[nodiscard]] double bs_exponent_f(double x_i, double x_f, double T, const MarketParams& params);

/// Kernel amplitude written as A * exp(f(x_i, x_f, T)).
///
/// Weak values are ratios of amplitudes, so A cancels; it is kept so that
/// amplitude-level quantities stay meaningful.
struct GenericKernel {
    double amplitude = 1.0;
    std::function<double(double x_i, double x_f, double T)> exponent;

    [[nodiscard]] double f(double x_i, double x_f, double T) const { return exponent(x_i, x_f, T); }
    [[nodiscard]] double log_amplitude(double x_i, double x_f, double T) const;

    /// The Black-Scholes kernel over horizon params.T, normalized to integrate to e^{-rT}.
    static GenericKernel black_scholes(const MarketParams& params);
};

/// Part of the exponent antisymmetric in the slit coordinate:
/// (f(x_i, x_f) - f(-x_i, x_f)) / 2.
[[nodiscard]] double f_odd(const GenericKernel& kernel, double x_i, double x_f, double T);

/// Same antisymmetrization taken in the endpoint coordinate, used when the
/// slits sit on the post-selected (final) side: (f(x_i, x_f) - f(x_i, -x_f)) / 2.
[[nodiscard]] double f_odd_final(const GenericKernel& kernel, double x_i, double x_f, double T);

enum class PayoffKind { call, put };

struct Payoff {
    PayoffKind kind;
    double strike;

    /// Throws DomainError for strike <= 0.
    static Payoff make(PayoffKind kind, double strike);

    [[nodiscard]] double operator()(double S) const noexcept;
};

/// Present value of `payoff` by propagating it with bs_kernel over backward time tau
/// from the present centered log-price x. Integration runs over
/// x' in [x + tau (r - sigma^2/2) -/+ 10 sigma sqrt(tau)], split at the strike,
/// to relative tolerance 1e-8.
[[nodiscard]] double price_option(const Payoff& payoff, const MarketParams& params, double tau,
                                  double x, LogPriceFrame frame);

/// call + K e^{-r tau} - put - S. Zero for arbitrage-free prices.
[[nodiscard]] double parity_gap(double call_value, double put_value, double S, double K, double r,
                                double tau) noexcept;

} // namespace weakslit
