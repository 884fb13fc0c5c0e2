#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace weakslit {

/// Input outside an operation's mathematical domain (negative price, tau > T, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed to meet its contract (quadrature, tridiagonal solve).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Black-Scholes parameter triple: spot rate r, volatility sigma, horizon T.
/// All three share one user-chosen time unit.
struct MarketParams {
    double r;
    double sigma;
    double T;

    /// Throws DomainError unless sigma > 0, T > 0 and r is finite.
    static MarketParams make(double r, double sigma, double T);

    /// r - sigma^2/2, the drift of the log-price under the risk-neutral measure.
    [[nodiscard]] double log_drift() const noexcept { return r - 0.5 * sigma * sigma; }
    [[nodiscard]] double variance_rate() const noexcept { return sigma * sigma; }

    /// a - b + tau (r - sigma^2/2) with exact products and compensated summation,
    /// accurate to a few ulps of the result even when the terms nearly cancel.
    [[nodiscard]] double drift_offset(double a, double b, double tau) const noexcept;
};

/// Reference shift c: centered log-price x = ln(S) - c.
struct LogPriceFrame {
    double c = 0.0;

    static LogPriceFrame make(double c);
};

/// ln(S) - c. Throws DomainError for S <= 0.
[[nodiscard]] double to_centered(double S, LogPriceFrame frame);

/// e^{x + c}.
[[nodiscard]] double from_centered(double x, LogPriceFrame frame) noexcept;

enum class SlitSide { pre, post };

/// Superposition of slit positions on one side of the path, with the single
/// endpoint on the opposite side.
///
/// side == pre:  slits are initial log-prices, endpoint is the final x_f.
/// side == post: slits are final log-prices, endpoint is the initial x_i.
struct SlitConfig {
    std::vector<double> positions;
    double endpoint = 0.0;
    SlitSide side = SlitSide::pre;
    std::vector<double> weights;

    /// Validates the invariants; empty `weights` means equal weights of 1.
    static SlitConfig make(std::vector<double> positions, double endpoint, SlitSide side,
                           std::vector<double> weights = {});

    /// Two equal-weight slits at +/-half_separation.
    static SlitConfig symmetric_pair(double half_separation, double endpoint, SlitSide side);
};

/// One point of a weak-value trajectory with its classical envelope.
struct WeakTrajectorySample {
    double t;
    double tau;
    double x_w;
    double band_low;
    double band_high;

    /// Throws DomainError unless 0 <= t <= T and tau == T - t exactly.
    static WeakTrajectorySample make(double t, double tau, double T, double x_w, double band_low,
                                     double band_high);
};

} // namespace weakslit
