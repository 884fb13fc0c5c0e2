#include "weakslit/kernel.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace weakslit;

namespace {

const MarketParams kParams{0.05, 0.2, 1.0};

// Adaptive Gauss-Kronrod, independent of the library's Gauss-Legendre code.
template <typename F>
double gk(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13);
}

// Black-Scholes call by integrating the lognormal terminal density in S.
double lognormal_call_oracle(double S, double K, double r, double sigma, double tau) {
    const double m = std::log(S) + (r - 0.5 * sigma * sigma) * tau;
    const double s = sigma * std::sqrt(tau);
    auto density = [&](double ST) {
        const double z = (std::log(ST) - m) / s;
        return std::exp(-0.5 * z * z) / (ST * s * std::sqrt(2.0 * M_PI));
    };
    const double hi = std::exp(m + 12.0 * s);
    return std::exp(-r * tau) * gk([&](double ST) { return (ST - K) * density(ST); }, K, hi);
}

double closed_form_call(double S, double K, double r, double sigma, double tau) {
    const boost::math::normal N;
    const double d1 = (std::log(S / K) + (r + 0.5 * sigma * sigma) * tau) / (sigma * std::sqrt(tau));
    const double d2 = d1 - sigma * std::sqrt(tau);
    return S * cdf(N, d1) - K * std::exp(-r * tau) * cdf(N, d2);
}

} // namespace

TEST(BsKernel, WorkedPoint) {
    // e^{-0.05} (2 pi 0.04)^{-1/2} e^{-0.03^2/0.08}, 30-digit reference
    EXPECT_NEAR(bs_kernel(0.0, 1.0, 0.0, kParams), 1.87620173458468939, 1e-13);
    EXPECT_NEAR(bs_kernel(0.4, 1.0, 0.4, kParams), 1.87620173458468939, 1e-13);
}

TEST(BsKernel, RejectsNonPositiveTau) {
    EXPECT_THROW((void)bs_kernel(0.0, 0.0, 0.0, kParams), DomainError);
    EXPECT_THROW((void)bs_kernel(0.0, -1.0, 0.0, kParams), DomainError);
}

TEST(BsKernel, MassIsDiscountFactor) {
    for (double r : {0.0, 0.05}) {
        const MarketParams p{r, 0.2, 1.0};
        for (double tau : {0.01, 0.5, 1.0, 2.0, 5.0}) {
            const double x_prime = 0.3;
            const double mean = x_prime - tau * p.log_drift();
            const double sd = p.sigma * std::sqrt(tau);
            const double mass = gk([&](double x) { return bs_kernel(x, tau, x_prime, p); },
                                   mean - 12 * sd, mean + 12 * sd);
            EXPECT_NEAR(mass, std::exp(-r * tau), 1e-9) << "r=" << r << " tau=" << tau;
        }
    }
}

TEST(BsKernel, GaussianMomentsInX) {
    for (double tau : {0.01, 0.5, 1.0, 5.0}) {
        const double x_prime = -0.2;
        const double mean = x_prime - tau * kParams.log_drift();
        const double sd = kParams.sigma * std::sqrt(tau);
        const double lo = mean - 12 * sd;
        const double hi = mean + 12 * sd;
        const double mass = gk([&](double x) { return bs_kernel(x, tau, x_prime, kParams); }, lo, hi);
        const double m1 =
            gk([&](double x) { return x * bs_kernel(x, tau, x_prime, kParams); }, lo, hi) / mass;
        const double m2 = gk([&](double x) {
            return (x - m1) * (x - m1) * bs_kernel(x, tau, x_prime, kParams);
        }, lo, hi) / mass;
        EXPECT_NEAR(m1, mean, 1e-8);
        EXPECT_NEAR(m2, tau * kParams.variance_rate(), 1e-8);
        EXPECT_GE(bs_kernel(mean + 40 * sd, tau, x_prime, kParams), 0.0);
    }
}

TEST(BsExponent, ZeroAtMeanAndWorkedValue) {
    const double x_f = 0.3;
    EXPECT_NEAR(bs_exponent_f(x_f - kParams.log_drift(), x_f, 1.0, kParams), 0.0, 1e-30);
    EXPECT_NEAR(bs_exponent_f(0.1, 0.05, 1.0, kParams), -0.08, 1e-15);
    EXPECT_THROW((void)bs_exponent_f(0.1, 0.05, 0.0, kParams), DomainError);
}

TEST(BsExponent, SlitDifferenceIsLinearInFinalPrice) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const MarketParams p{0.1 * u(gen), 0.15 + 0.1 * (u(gen) + 1.0), 0.5 + (u(gen) + 1.0)};
        const double x_i = u(gen);
        const double x_f = u(gen);
        auto diff = [&](double xf) {
            return bs_exponent_f(x_i, xf, p.T, p) - bs_exponent_f(-x_i, xf, p.T, p);
        };
        const double expected = 2.0 * x_i / (p.T * p.variance_rate()) * (x_f - p.T * p.log_drift());
        EXPECT_NEAR(diff(x_f), expected, 1e-11 * std::max(1.0, std::abs(expected)));
        // a quadratic's antisymmetric part is linear: constant first difference
        const double h = 1e-3;
        const double slope = (diff(x_f + h) - diff(x_f - h)) / (2 * h);
        EXPECT_NEAR(slope, 2.0 * x_i / (p.T * p.variance_rate()),
                    1e-7 * std::max(1.0, std::abs(slope)));
    }
}

TEST(FOdd, MatchesTanhArgument) {
    const auto K = GenericKernel::black_scholes(kParams);
    EXPECT_EQ(f_odd(K, 0.0, 0.05, 1.0), 0.0);
    EXPECT_NEAR(f_odd(K, 0.1, 0.05, 1.0), 0.05, 1e-15);

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const MarketParams p{0.1 * u(gen), 0.15 + 0.1 * (u(gen) + 1.0), 0.5 + (u(gen) + 1.0)};
        const auto kern = GenericKernel::black_scholes(p);
        const double x_i = u(gen);
        const double x_f = u(gen);
        EXPECT_EQ(f_odd(kern, x_i, x_f, p.T) + f_odd(kern, -x_i, x_f, p.T), 0.0);
        const double analytic = x_i / (p.T * p.variance_rate()) * (x_f - p.T * p.log_drift());
        EXPECT_NEAR(f_odd(kern, x_i, x_f, p.T), analytic, 1e-12 * std::max(1.0, std::abs(analytic)));
    }
}

TEST(GenericKernel, BlackScholesAmplitudeMatchesKernel) {
    const auto K = GenericKernel::black_scholes(kParams);
    for (double x_i : {-0.3, 0.0, 0.2}) {
        EXPECT_NEAR(std::exp(K.log_amplitude(x_i, 0.05, kParams.T)), bs_kernel(x_i, 1.0, 0.05, kParams),
                    1e-13);
    }
}

TEST(PriceOption, AtTheMoneyCallMatchesLognormalOracle) {
    const LogPriceFrame frame{std::log(100.0)};
    const double call = price_option(Payoff::make(PayoffKind::call, 100.0), kParams, 1.0, 0.0, frame);
    // 30-digit lognormal-expectation reference: 10.4505835721855667816512312097
    EXPECT_NEAR(call, 10.4505835721855668, 1e-6);
    EXPECT_NEAR(call, lognormal_call_oracle(100.0, 100.0, 0.05, 0.2, 1.0), 1e-6);
    EXPECT_NEAR(call, closed_form_call(100.0, 100.0, 0.05, 0.2, 1.0), 1e-6);
}

TEST(PriceOption, ParityAcrossParameters) {
    for (double S : {60.0, 100.0, 145.0}) {
        for (double K : {80.0, 100.0, 120.0}) {
            for (double r : {0.0, 0.03, 0.08}) {
                for (double sigma : {0.1, 0.3, 0.6}) {
                    for (double tau : {0.1, 1.0, 3.0}) {
                        const MarketParams p{r, sigma, tau};
                        const LogPriceFrame frame{std::log(90.0)};
                        const double x = to_centered(S, frame);
                        const double c = price_option(Payoff::make(PayoffKind::call, K), p, tau, x, frame);
                        const double q = price_option(Payoff::make(PayoffKind::put, K), p, tau, x, frame);
                        EXPECT_LE(std::abs(parity_gap(c, q, S, K, r, tau)), 1e-6);
                        EXPECT_NEAR(c, closed_form_call(S, K, r, sigma, tau), 1e-6);
                    }
                }
            }
        }
    }
}

TEST(PriceOption, LimitsAndErrors) {
    const LogPriceFrame frame{0.0};
    const MarketParams zero_rate{0.0, 0.25, 1.0};
    const double x = std::log(100.0);
    const double c = price_option(Payoff::make(PayoffKind::call, 100.0), zero_rate, 1.0, x, frame);
    const double q = price_option(Payoff::make(PayoffKind::put, 100.0), zero_rate, 1.0, x, frame);
    EXPECT_NEAR(c, q, 1e-8);

    // Deep in the money: call -> forward S - K e^{-r tau}
    const double K = 1e-6;
    const double deep = price_option(Payoff::make(PayoffKind::call, K), kParams, 1.0, x, frame);
    EXPECT_NEAR(deep - (100.0 - K * std::exp(-0.05)), 0.0, 1e-6);

    EXPECT_THROW((void)price_option(Payoff::make(PayoffKind::call, 1.0), kParams, 0.0, x, frame),
                 DomainError);
    EXPECT_THROW(Payoff::make(PayoffKind::put, 0.0), DomainError);
}

TEST(ParityGap, Arithmetic) {
    EXPECT_EQ(parity_gap(5.0, 5.0, 100.0, 100.0, 0.0, 1.0), 0.0);
    const double c = 10.4505835721855668;
    const double q = c + 100.0 * std::exp(-0.05) - 100.0;
    EXPECT_NEAR(parity_gap(c + 1.0, q, 100.0, 100.0, 0.05, 1.0), 1.0, 1e-12);
}
