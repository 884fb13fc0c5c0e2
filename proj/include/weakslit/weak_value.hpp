#pragma once

#include "weakslit/core_types.hpp"
#include "weakslit/kernel.hpp"

#include <utility>
#include <vector>

namespace weakslit {

// Conventions shared by every function below:
//   * prices are centered log-prices;
//   * tau = T - t is the backward time, tau in [0, T];
//   * tau outside [0, T] throws DomainError.

/// Weak price with two slits at +/-x_i (initial time) and final price x_f:
///
///   x_f (1 - tau/T) + x_i (tau/T) tanh[(x_i / (T sigma^2)) (x_f - T (r - sigma^2/2))]
///
/// Returns x_f bit-for-bit at tau = 0. x_i = 0 collapses to the straight path.
[[nodiscard]] double forward_two_slit(double x_i, double x_f, double tau, double T,
                                      const MarketParams& params);

/// forward_two_slit at t = 0 (tau = T): x_i tanh[...]. Lies strictly inside (-x_i, x_i).
[[nodiscard]] double forward_initial(double x_i, double x_f, double T, const MarketParams& params);

/// Inverse configuration: single initial price x_i, slits at +/-x_f at expiry:
///
///   x_i (tau/T) + x_f (1 - tau/T) tanh[(x_f / (T sigma^2)) (x_i + T (r - sigma^2/2))]
///
/// Returns x_i bit-for-bit at tau = T.
[[nodiscard]] double inverse_two_slit(double x_i, double x_f, double tau, double T,
                                      const MarketParams& params);

/// Forward two-slit weak price for an arbitrary kernel A e^{f}; the tanh
/// argument is f_odd(x_i, x_f).
[[nodiscard]] double generic_two_slit(const GenericKernel& kernel, double x_i, double x_f,
                                      double tau, double T);

/// Inverse two-slit weak price for an arbitrary kernel; tanh argument is
/// f_odd_final(x_i, x_f).
[[nodiscard]] double generic_inverse_two_slit(const GenericKernel& kernel, double x_i, double x_f,
                                              double tau, double T);

/// Weak price for any number of weighted slits on either side of the path.
///
/// Pre-side slits a_k with endpoint x_f:
///   sum_k w_k K(a_k, x_f) x_k(tau) / sum_k w_k K(a_k, x_f),  x_k(tau) = (a_k - x_f) tau/T + x_f
/// Post-side slits b_k with endpoint x_i uses K(x_i, b_k) and
///   x_k(tau) = x_i tau/T + b_k (1 - tau/T).
///
/// Amplitudes are combined in log space, so kernels whose exponents are far
/// below the double range still produce a finite ratio. Throws NumericalError
/// if every weighted amplitude is zero or non-finite.
[[nodiscard]] double n_slit_weak(const SlitConfig& slits, double tau, double T,
                                 const GenericKernel& kernel);

/// Lowest and highest classical straight path over the slits at tau.
[[nodiscard]] std::pair<double, double> classical_envelope(const SlitConfig& slits, double tau,
                                                           double T);

enum class TrajectoryMethod {
    closed_form, // two symmetric slits; pre side -> forward, post side -> inverse
    n_slit,      // ratio of Black-Scholes kernel amplitudes over all slits
};

struct TrajectoryRequest {
    SlitConfig slits;
    MarketParams params;
    LogPriceFrame frame;
    int steps = 101;
    TrajectoryMethod method = TrajectoryMethod::closed_form;

    /// Throws DomainError on steps < 2, non-distinct n-slit positions, or a
    /// closed-form request whose slits are not an equal-weight +/-a pair.
    void validate() const;
};

/// `steps` samples at uniform t in [0, params.T], t increasing, with
/// tau = T - t and the classical envelope attached.
[[nodiscard]] std::vector<WeakTrajectorySample> sample_trajectory(const TrajectoryRequest& request);

} // namespace weakslit
