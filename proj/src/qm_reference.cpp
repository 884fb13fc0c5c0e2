#include "weakslit/qm_reference.hpp"

#include "weakslit/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace weakslit::qm {
namespace {

// Arguments within this many half-periods (relative) of an order are snapped
// onto it, so that orders built from pi in floating point land exactly.
constexpr double kOrderSnap = 1e-12;

} // namespace

QmParams QmParams::make(double m, double hbar, double T, double x_i, double d) {
    if (!(m > 0.0) || !(hbar > 0.0) || !(T > 0.0) || !(d > 0.0)) {
        throw DomainError("QmParams: m, hbar, T and d must be positive");
    }
    if (!(x_i >= 0.0)) {
        throw DomainError("QmParams: slit half-separation must be nonnegative");
    }
    return QmParams{m, hbar, T, x_i, d};
}

std::complex<double> feynman_kernel(double x_f, double x_i, const QmParams& qm) {
    if (!(qm.T > 0.0)) {
        throw DomainError("feynman_kernel: T must be positive");
    }
    using namespace std::complex_literals;
    const std::complex<double> prefactor =
        std::sqrt(qm.m / (2.0 * std::numbers::pi * 1.0i * qm.hbar * qm.T));
    const double dx = x_f - x_i;
    const double phase = qm.m * dx * dx / (2.0 * qm.hbar * qm.T);
    return prefactor * std::polar(1.0, phase);
}

double interference_pattern(double x_f, const QmParams& qm) {
    return 1.0 + std::cos(2.0 * qm.m * qm.x_i * x_f / (qm.hbar * qm.T));
}

ComplexWeakPosition qm_weak_trajectory(double t, double x_f, const QmParams& qm) {
    if (!(t >= 0.0 && t <= qm.T)) {
        throw DomainError("qm_weak_trajectory: t must lie in [0, T]");
    }
    const double s = t / qm.T;
    const double real = x_f * s;
    const double lever = qm.x_i * (1.0 - s);
    if (lever == 0.0) {
        return {{real, 0.0}, false};
    }

    const double arg = qm.m * qm.x_i * x_f / (qm.hbar * qm.T);
    const double half_periods = arg / (0.5 * std::numbers::pi);
    const double nearest = std::round(half_periods);
    const double scale = std::max(1.0, std::abs(half_periods));
    if (std::abs(half_periods - nearest) <= kOrderSnap * scale) {
        if (std::fmod(nearest, 2.0) == 0.0) {
            // constructive order: tan vanishes
            return {{real, 0.0}, false};
        }
        const double tan_sign = std::tan(arg) >= 0.0 ? 1.0 : -1.0;
        return {{real, -tan_sign * std::numeric_limits<double>::infinity()}, true};
    }
    return {{real, -lever * std::tan(arg)}, false};
}

double fringe_spacing(int n, double lambda, const QmParams& /*qm*/) {
    if (!(lambda > 0.0)) {
        throw DomainError("fringe_spacing: wavelength must be positive");
    }
    return n * lambda;
}

} // namespace weakslit::qm
