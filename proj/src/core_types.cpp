#include "weakslit/core_types.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace weakslit {

MarketParams MarketParams::make(double r, double sigma, double T) {
    if (!std::isfinite(r)) {
        throw DomainError("MarketParams: r must be finite");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("MarketParams: sigma must be positive and finite");
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw DomainError("MarketParams: T must be positive and finite");
    }
    return MarketParams{r, sigma, T};
}

double MarketParams::drift_offset(double a, double b, double tau) const noexcept {
    // tau r and tau sigma^2 split into rounded value + exact rounding error
    const double tr = tau * r;
    const double tr_lo = std::fma(tau, r, -tr);
    const double ts = tau * sigma;
    const double ts_lo = std::fma(tau, sigma, -ts);
    const double tss = ts * sigma;
    const double tss_lo = std::fma(ts, sigma, -tss) + ts_lo * sigma;

    // Neumaier summation
    const std::array<double, 6> terms{a, -b, tr, -0.5 * tss, tr_lo, -0.5 * tss_lo};
    double sum = 0.0;
    double comp = 0.0;
    for (double t : terms) {
        const double next = sum + t;
        comp += std::abs(sum) >= std::abs(t) ? (sum - next) + t : (t - next) + sum;
        sum = next;
    }
    return sum + comp;
}

LogPriceFrame LogPriceFrame::make(double c) {
    if (!std::isfinite(c)) {
        throw DomainError("LogPriceFrame: shift c must be finite");
    }
    return LogPriceFrame{c};
}

double to_centered(double S, LogPriceFrame frame) {
    if (!(S > 0.0)) {
        throw DomainError("to_centered: price must be positive, got " + std::to_string(S));
    }
    return std::log(S) - frame.c;
}

double from_centered(double x, LogPriceFrame frame) noexcept {
    return std::exp(x + frame.c);
}

SlitConfig SlitConfig::make(std::vector<double> positions, double endpoint, SlitSide side,
                            std::vector<double> weights) {
    if (positions.empty()) {
        throw DomainError("SlitConfig: at least one slit position is required");
    }
    if (weights.empty()) {
        weights.assign(positions.size(), 1.0);
    }
    if (weights.size() != positions.size()) {
        throw DomainError("SlitConfig: weights and positions differ in length");
    }
    if (std::any_of(weights.begin(), weights.end(),
                    [](double w) { return !(w >= 0.0) || !std::isfinite(w); })) {
        throw DomainError("SlitConfig: weights must be finite and nonnegative");
    }
    if (std::none_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; })) {
        throw DomainError("SlitConfig: at least one weight must be positive");
    }
    if (!std::isfinite(endpoint) ||
        std::any_of(positions.begin(), positions.end(), [](double a) { return !std::isfinite(a); })) {
        throw DomainError("SlitConfig: positions and endpoint must be finite");
    }
    return SlitConfig{std::move(positions), endpoint, side, std::move(weights)};
}

SlitConfig SlitConfig::symmetric_pair(double half_separation, double endpoint, SlitSide side) {
    return make({half_separation, -half_separation}, endpoint, side);
}

WeakTrajectorySample WeakTrajectorySample::make(double t, double tau, double T, double x_w,
                                                double band_low, double band_high) {
    if (!(t >= 0.0 && t <= T)) {
        throw DomainError("WeakTrajectorySample: t outside [0, T]");
    }
    if (tau != T - t) {
        throw DomainError("WeakTrajectorySample: tau must equal T - t");
    }
    return WeakTrajectorySample{t, tau, x_w, band_low, band_high};
}

} // namespace weakslit
