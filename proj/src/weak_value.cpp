#include "weakslit/weak_value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weakslit {
namespace {

void require_tau(double tau, double T, const char* where) {
    if (!(T > 0.0)) {
        throw DomainError(std::string(where) + ": T must be positive");
    }
    if (!(tau >= 0.0 && tau <= T)) {
        throw DomainError(std::string(where) + ": tau must lie in [0, T]");
    }
}

// The vanishing term at each boundary is a multiply by an exact 0.0, so the
// boundary value passes through unchanged.
double blend(double straight, double straight_weight, double slit_term, double slit_weight) {
    return straight * straight_weight + slit_term * slit_weight;
}

} // namespace

double forward_two_slit(double x_i, double x_f, double tau, double T, const MarketParams& params) {
    require_tau(tau, T, "forward_two_slit");
    if (!(x_i >= 0.0)) {
        throw DomainError("forward_two_slit: slit half-separation must be nonnegative");
    }
    const double s = tau / T;
    const double arg = x_i / (T * params.variance_rate()) * params.drift_offset(x_f, 0.0, -T);
    return blend(x_f, 1.0 - s, x_i * std::tanh(arg), s);
}

double forward_initial(double x_i, double x_f, double T, const MarketParams& params) {
    if (!(T > 0.0)) {
        throw DomainError("forward_initial: T must be positive");
    }
    return forward_two_slit(x_i, x_f, T, T, params);
}

double inverse_two_slit(double x_i, double x_f, double tau, double T, const MarketParams& params) {
    require_tau(tau, T, "inverse_two_slit");
    if (!(x_f >= 0.0)) {
        throw DomainError("inverse_two_slit: slit half-separation must be nonnegative");
    }
    const double s = tau / T;
    const double arg = x_f / (T * params.variance_rate()) * params.drift_offset(x_i, 0.0, T);
    return blend(x_i, s, x_f * std::tanh(arg), 1.0 - s);
}

double generic_two_slit(const GenericKernel& kernel, double x_i, double x_f, double tau, double T) {
    require_tau(tau, T, "generic_two_slit");
    const double s = tau / T;
    return blend(x_f, 1.0 - s, x_i * std::tanh(f_odd(kernel, x_i, x_f, T)), s);
}

double generic_inverse_two_slit(const GenericKernel& kernel, double x_i, double x_f, double tau,
                                double T) {
    require_tau(tau, T, "generic_inverse_two_slit");
    const double s = tau / T;
    return blend(x_i, s, x_f * std::tanh(f_odd_final(kernel, x_i, x_f, T)), 1.0 - s);
}

double n_slit_weak(const SlitConfig& slits, double tau, double T, const GenericKernel& kernel) {
    require_tau(tau, T, "n_slit_weak");
    const std::size_t n = slits.positions.size();

    // log(w_k) + f; the amplitude A is common to every term and cancels.
    std::vector<double> log_amp(n, -std::numeric_limits<double>::infinity());
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        if (slits.weights[k] <= 0.0) {
            continue;
        }
        const double a = slits.positions[k];
        const double f = slits.side == SlitSide::pre ? kernel.f(a, slits.endpoint, T)
                                                     : kernel.f(slits.endpoint, a, T);
        if (std::isnan(f)) {
            continue;
        }
        log_amp[k] = std::log(slits.weights[k]) + f;
        peak = std::max(peak, log_amp[k]);
    }
    if (!std::isfinite(peak)) {
        throw NumericalError("n_slit_weak: every weighted kernel amplitude vanished");
    }

    // Relative weights 1 + e_k with e_k = expm1(.), summed as (sum a_k + sum a_k e_k) /
    // (count + sum e_k): nearly equal amplitudes keep their small differences exactly.
    double sum_a = 0.0;
    double sum_ae = 0.0;
    double sum_e = 0.0;
    double live = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (log_amp[k] == -std::numeric_limits<double>::infinity()) {
            continue;
        }
        const double e = std::expm1(log_amp[k] - peak);
        sum_a += slits.positions[k];
        sum_ae += slits.positions[k] * e;
        sum_e += e;
        live += 1.0;
    }
    const double num = sum_a + sum_ae;
    const double den = live + sum_e;
    const auto [lo, hi] = std::minmax_element(slits.positions.begin(), slits.positions.end());
    const double slit_mean = std::clamp(num / den, *lo, *hi);

    const double s = tau / T;
    if (slits.side == SlitSide::pre) {
        return blend(slits.endpoint, 1.0 - s, slit_mean, s);
    }
    return blend(slits.endpoint, s, slit_mean, 1.0 - s);
}

std::pair<double, double> classical_envelope(const SlitConfig& slits, double tau, double T) {
    require_tau(tau, T, "classical_envelope");
    const auto [lo, hi] = std::minmax_element(slits.positions.begin(), slits.positions.end());
    const double s = tau / T;
    if (slits.side == SlitSide::pre) {
        return {blend(slits.endpoint, 1.0 - s, *lo, s), blend(slits.endpoint, 1.0 - s, *hi, s)};
    }
    return {blend(slits.endpoint, s, *lo, 1.0 - s), blend(slits.endpoint, s, *hi, 1.0 - s)};
}

void TrajectoryRequest::validate() const {
    if (steps < 2) {
        throw DomainError("TrajectoryRequest: steps must be at least 2");
    }
    if (method == TrajectoryMethod::closed_form) {
        const auto& p = slits.positions;
        if (p.size() != 2 || p[0] != -p[1] || slits.weights[0] != slits.weights[1]) {
            throw DomainError(
                "TrajectoryRequest: closed form needs two equal-weight slits at +/-a");
        }
        return;
    }
    std::vector<double> sorted = slits.positions;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DomainError("TrajectoryRequest: slit positions must be distinct");
    }
}

std::vector<WeakTrajectorySample> sample_trajectory(const TrajectoryRequest& request) {
    request.validate();
    const double T = request.params.T;
    const double half = std::abs(request.slits.positions[0]);
    const GenericKernel kernel = GenericKernel::black_scholes(request.params);

    std::vector<WeakTrajectorySample> out;
    out.reserve(static_cast<std::size_t>(request.steps));
    for (int k = 0; k < request.steps; ++k) {
        const double t = k + 1 == request.steps ? T : T * k / (request.steps - 1);
        const double tau = T - t;
        double x_w = 0.0;
        if (request.method == TrajectoryMethod::n_slit) {
            x_w = n_slit_weak(request.slits, tau, T, kernel);
        } else if (request.slits.side == SlitSide::pre) {
            x_w = forward_two_slit(half, request.slits.endpoint, tau, T, request.params);
        } else {
            x_w = inverse_two_slit(request.slits.endpoint, half, tau, T, request.params);
        }
        const auto [low, high] = classical_envelope(request.slits, tau, T);
        out.push_back(WeakTrajectorySample::make(t, tau, T, x_w, low, high));
    }
    return out;
}

} // namespace weakslit
