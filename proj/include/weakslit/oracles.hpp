#pragma once

#include "weakslit/core_types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace weakslit::oracles {

// ---------------------------------------------------------------------------
// Monte Carlo: dS/dt = phi S + sigma S R(t)
// ---------------------------------------------------------------------------

struct GbmParams {
    double S0;
    double phi;
    double sigma;
    double dt;
    int steps;
    std::uint64_t seed;

    /// Throws DomainError unless S0 > 0, sigma > 0, dt > 0, steps >= 1.
    static GbmParams make(double S0, double phi, double sigma, double dt, int steps,
                          std::uint64_t seed);
};

/// One GBM path S_0..S_steps, stepped exactly in log-price:
/// x_{k+1} = x_k + (phi - sigma^2/2) dt + sigma sqrt(dt) Z_k.
/// Bit-identical for identical (params, seed).
[[nodiscard]] std::vector<double> simulate_gbm(const GbmParams& p);

struct McEstimate {
    double estimate;
    double standard_error;
};

/// Monte Carlo estimate of E[e^{-r t} S(t)] - S(0) with paths drifting at p.phi.
/// Each path takes p.steps log-space steps of size t / p.steps (p.dt is not
/// used). Paths are split into fixed-size batches with independent seeded
/// streams, simulated concurrently and merged in batch order, so the result
/// does not depend on the thread count.
[[nodiscard]] McEstimate martingale_check(const GbmParams& p, double r, double t,
                                          std::size_t n_paths);

/// Histogram of terminal log-prices started at x_start, scaled to a density
/// and multiplied by e^{-r tau}. Bins cover mean -/+ 6 sd of the risk-neutral
/// terminal distribution; paths beyond that are folded into the edge bins, so
/// sum(density * width) == e^{-r tau}.
struct KernelHistogram {
    std::vector<double> edges;   // bins + 1
    std::vector<double> density; // bins
    std::vector<std::uint64_t> counts;
    std::size_t n_paths = 0;
    double discount = 1.0; // e^{-r tau}

    [[nodiscard]] std::size_t bins() const noexcept { return density.size(); }
    [[nodiscard]] double center(std::size_t k) const noexcept { return 0.5 * (edges[k] + edges[k + 1]); }
    [[nodiscard]] double width() const noexcept { return edges[1] - edges[0]; }
    [[nodiscard]] double mass() const noexcept;
};

/// Throws DomainError for bins < 10 or tau <= 0.
[[nodiscard]] KernelHistogram mc_kernel_density(double x_start, double tau,
                                                const MarketParams& params, std::size_t n_paths,
                                                std::size_t bins, std::uint64_t seed);

struct ChiSquare {
    double statistic;
    int dof;
    double p_value;
};

/// Pearson chi-square of the histogram counts against bin probabilities
/// obtained by integrating bs_kernel(x_start, tau, .) over each bin (edge bins
/// include their tails), normalized by e^{-r tau}.
[[nodiscard]] ChiSquare chi_square_vs_kernel(const KernelHistogram& hist, double x_start,
                                             double tau, const MarketParams& params);

// ---------------------------------------------------------------------------
// Finite differences for d psi / d tau = -H_BS psi
// ---------------------------------------------------------------------------

/// n interior nodes strictly inside (x_min, x_max); zero Dirichlet values at both ends.
struct Grid {
    double x_min;
    double x_max;
    int n;

    /// Throws DomainError unless x_min < x_max and n >= 16.
    static Grid make(double x_min, double x_max, int n);

    [[nodiscard]] double spacing() const noexcept { return (x_max - x_min) / (n + 1); }
    [[nodiscard]] double node(int j) const noexcept { return x_min + (j + 1) * spacing(); }
    [[nodiscard]] std::vector<double> nodes() const;
};

struct Field {
    std::vector<double> values;

    /// Throws DomainError if the length differs from grid.n or a value is non-finite.
    static Field make(const Grid& grid, std::vector<double> values);
};

/// Tridiagonal matrix: sub[j] = A(j+1, j), super[j] = A(j, j+1).
struct Tridiagonal {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }
    [[nodiscard]] std::vector<double> apply(std::span<const double> v) const;
    [[nodiscard]] Tridiagonal transpose() const;
    [[nodiscard]] Tridiagonal operator+(const Tridiagonal& other) const;
    [[nodiscard]] Tridiagonal operator-() const;
    bool operator==(const Tridiagonal&) const = default;
};

/// H_BS = H^H + H^AH on the grid:
///   H^H  = -(sigma^2/2) d^2 + r   (central second difference, symmetric)
///   H^AH = (sigma^2/2 - r) d      (central first difference, antisymmetric)
struct HamiltonianSplit {
    Tridiagonal hermitian;
    Tridiagonal anti_hermitian;

    [[nodiscard]] Tridiagonal total() const { return hermitian + anti_hermitian; }
};

[[nodiscard]] HamiltonianSplit hamiltonian_split(const Grid& grid, const MarketParams& params);

struct EvolveResult {
    Field psi;
    std::vector<Field> snapshots; // psi0 first, then every `snapshot_every` steps, final last
    bool boundary_warning = false; // |psi| at an end node exceeded 1e-8 of the peak
};

/// Crank-Nicolson for d psi / d tau = -H_BS psi over tau_total in n_time_steps.
///
/// Throws DomainError when psi0 is not negligible (> 1e-12 of its peak) at
/// the end nodes, and NumericalError if the tridiagonal factorization meets a
/// zero pivot. `snapshot_every` = 0 records only psi0 and the final field.
[[nodiscard]] EvolveResult crank_nicolson_evolve(const Field& psi0, double tau_total,
                                                 const MarketParams& params, const Grid& grid,
                                                 int n_time_steps, int snapshot_every = 0);

struct NormSample {
    double mass; // integral of psi
    double l2;   // integral of psi^2
};

/// Trapezoid integrals of each snapshot (end values are the Dirichlet zeros).
/// Throws DomainError for fewer than two snapshots.
[[nodiscard]] std::vector<NormSample> norm_flow(std::span<const Field> fields, const Grid& grid);

/// Closed-form image of a unit-mass Gaussian N(mean0, sd0^2) under the kernel:
/// e^{-r tau} N(mean0 - tau (r - sigma^2/2), sd0^2 + tau sigma^2) evaluated at x.
[[nodiscard]] double evolved_gaussian(double x, double mean0, double sd0, double tau,
                                      const MarketParams& params);

} // namespace weakslit::oracles
