#pragma once

#include <complex>

namespace weakslit::qm {

/// Free-particle double-slit parameters. Natural units (m = hbar = T = 1) by default.
struct QmParams {
    double m = 1.0;
    double hbar = 1.0;
    double T = 1.0;
    double x_i = 0.0; // slit half-separation
    double d = 1.0;   // slit-to-screen distance

    /// Throws DomainError unless m, hbar, T, d > 0 and x_i >= 0.
    static QmParams make(double m, double hbar, double T, double x_i, double d);
};

/// <x_f|U(T)|x_i> = (m / (2 pi i hbar T))^{1/2} exp(i m (x_f - x_i)^2 / (2 hbar T)),
/// principal square root.
[[nodiscard]] std::complex<double> feynman_kernel(double x_f, double x_i, const QmParams& qm);

/// Normalized screen intensity 1 + cos(2 m x_i x_f / (hbar T)), in [0, 2].
/// Equals |K(x_f, x_i) + K(x_f, -x_i)|^2 / (2 |K|^2).
[[nodiscard]] double interference_pattern(double x_f, const QmParams& qm);

struct ComplexWeakPosition {
    std::complex<double> value;
    bool divergent = false; // tan pole: imaginary part is a signed infinity
};

/// x_f t/T - i x_i (1 - t/T) tan(m x_i x_f / (hbar T)), for 0 <= t <= T.
///
/// Near a pole of tan (cos of the argument below ~1e-12 of its scale) the
/// imaginary part is returned as a signed infinity and `divergent` is set;
/// at t = T it is still exactly x_f.
[[nodiscard]] ComplexWeakPosition qm_weak_trajectory(double t, double x_f, const QmParams& qm);

/// Small-angle fringe offset n * lambda. Throws DomainError for lambda <= 0.
[[nodiscard]] double fringe_spacing(int n, double lambda, const QmParams& qm);

} // namespace weakslit::qm
