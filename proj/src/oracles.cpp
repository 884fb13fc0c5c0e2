#include "weakslit/oracles.hpp"

#include "weakslit/kernel.hpp"
#include "weakslit/quadrature.hpp"
#include "weakslit/rng.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

namespace weakslit::oracles {
namespace {

constexpr std::size_t kBatchPaths = 1 << 16;

// Runs body(b) for every batch b on a small thread pool. Bodies write only to
// their own batch slot, so merging afterwards in index order is deterministic.
void for_each_batch(std::size_t n_batches, const std::function<void(std::size_t)>& body) {
    const std::size_t workers =
        std::min<std::size_t>(n_batches, std::max(1u, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t b = next++; b < n_batches; b = next++) {
            body(b);
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
}

std::size_t batch_size(std::size_t b, std::size_t n_paths) {
    return std::min(kBatchPaths, n_paths - b * kBatchPaths);
}

std::size_t batch_count(std::size_t n_paths) {
    return (n_paths + kBatchPaths - 1) / kBatchPaths;
}

} // namespace

GbmParams GbmParams::make(double S0, double phi, double sigma, double dt, int steps,
                          std::uint64_t seed) {
    if (!(S0 > 0.0) || !(sigma > 0.0) || !(dt > 0.0) || steps < 1 || !std::isfinite(phi)) {
        throw DomainError("GbmParams: need S0 > 0, sigma > 0, dt > 0, steps >= 1, finite phi");
    }
    return GbmParams{S0, phi, sigma, dt, steps, seed};
}

std::vector<double> simulate_gbm(const GbmParams& p) {
    NormalStream normal(p.seed);
    const double drift = (p.phi - 0.5 * p.sigma * p.sigma) * p.dt;
    const double vol = p.sigma * std::sqrt(p.dt);
    std::vector<double> path(static_cast<std::size_t>(p.steps) + 1);
    double x = std::log(p.S0);
    path[0] = p.S0;
    for (int k = 1; k <= p.steps; ++k) {
        x += drift + vol * normal();
        path[k] = std::exp(x);
    }
    return path;
}

McEstimate martingale_check(const GbmParams& p, double r, double t, std::size_t n_paths) {
    if (n_paths < 100) {
        throw DomainError("martingale_check: need at least 100 paths");
    }
    if (!(t > 0.0)) {
        throw DomainError("martingale_check: t must be positive");
    }
    const double dt = t / p.steps;
    const double drift = (p.phi - 0.5 * p.sigma * p.sigma) * dt;
    const double vol = p.sigma * std::sqrt(dt);
    const double discount = std::exp(-r * t);
    const double x0 = std::log(p.S0);

    const std::size_t n_batches = batch_count(n_paths);
    std::vector<double> sums(n_batches);
    std::vector<double> sumsq(n_batches);
    for_each_batch(n_batches, [&](std::size_t b) {
        NormalStream normal = NormalStream::for_batch(p.seed, b);
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t i = 0, n = batch_size(b, n_paths); i < n; ++i) {
            double x = x0;
            for (int k = 0; k < p.steps; ++k) {
                x += drift + vol * normal();
            }
            const double y = discount * std::exp(x) - p.S0;
            s += y;
            s2 += y * y;
        }
        sums[b] = s;
        sumsq[b] = s2;
    });

    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t b = 0; b < n_batches; ++b) {
        s += sums[b];
        s2 += sumsq[b];
    }
    const double n = static_cast<double>(n_paths);
    const double mean = s / n;
    const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
    return McEstimate{mean, std::sqrt(var / n)};
}

double KernelHistogram::mass() const noexcept {
    double total = 0.0;
    for (std::size_t k = 0; k < bins(); ++k) {
        total += density[k] * (edges[k + 1] - edges[k]);
    }
    return total;
}

KernelHistogram mc_kernel_density(double x_start, double tau, const MarketParams& params,
                                  std::size_t n_paths, std::size_t bins, std::uint64_t seed) {
    if (bins < 10) {
        throw DomainError("mc_kernel_density: need at least 10 bins");
    }
    if (!(tau > 0.0) || n_paths == 0) {
        throw DomainError("mc_kernel_density: need tau > 0 and at least one path");
    }
    const double mean = x_start + tau * params.log_drift();
    const double sd = params.sigma * std::sqrt(tau);
    const double lo = mean - 6.0 * sd;
    const double hi = mean + 6.0 * sd;
    const double width = (hi - lo) / static_cast<double>(bins);

    KernelHistogram hist;
    hist.edges.resize(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) {
        hist.edges[k] = lo + width * static_cast<double>(k);
    }
    hist.edges[bins] = hi;
    hist.n_paths = n_paths;
    hist.discount = std::exp(-params.r * tau);

    const std::size_t n_batches = batch_count(n_paths);
    std::vector<std::vector<std::uint64_t>> partial(n_batches);
    for_each_batch(n_batches, [&](std::size_t b) {
        NormalStream normal = NormalStream::for_batch(seed, b);
        std::vector<std::uint64_t> counts(bins, 0);
        for (std::size_t i = 0, n = batch_size(b, n_paths); i < n; ++i) {
            const double x = mean + sd * normal();
            const double pos = std::floor((x - lo) / width);
            const auto k = static_cast<std::size_t>(
                std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
            ++counts[k];
        }
        partial[b] = std::move(counts);
    });

    hist.counts.assign(bins, 0);
    for (const auto& counts : partial) {
        for (std::size_t k = 0; k < bins; ++k) {
            hist.counts[k] += counts[k];
        }
    }
    hist.density.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        hist.density[k] = hist.discount * static_cast<double>(hist.counts[k]) /
                          (static_cast<double>(n_paths) * (hist.edges[k + 1] - hist.edges[k]));
    }
    return hist;
}

ChiSquare chi_square_vs_kernel(const KernelHistogram& hist, double x_start, double tau,
                               const MarketParams& params) {
    const std::size_t bins = hist.bins();
    const double sd = params.sigma * std::sqrt(tau);
    auto density = [&](double y) { return bs_kernel(x_start, tau, y, params) / hist.discount; };
    quadrature::Options opts;
    opts.rel_tol = 1e-12;
    opts.abs_floor = 1e-16;

    double statistic = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        const double a = k == 0 ? hist.edges[0] - 10.0 * sd : hist.edges[k];
        const double b = k + 1 == bins ? hist.edges[bins] + 10.0 * sd : hist.edges[k + 1];
        const double prob = quadrature::integrate(density, a, b, {}, opts).value;
        const double expected = prob * static_cast<double>(hist.n_paths);
        const double diff = static_cast<double>(hist.counts[k]) - expected;
        statistic += diff * diff / expected;
    }
    const int dof = static_cast<int>(bins) - 1;
    const boost::math::chi_squared_distribution<double> dist(dof);
    return ChiSquare{statistic, dof, boost::math::cdf(boost::math::complement(dist, statistic))};
}

Grid Grid::make(double x_min, double x_max, int n) {
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw DomainError("Grid: need finite x_min < x_max");
    }
    if (n < 16) {
        throw DomainError("Grid: need at least 16 interior nodes");
    }
    return Grid{x_min, x_max, n};
}

std::vector<double> Grid::nodes() const {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        xs[j] = node(j);
    }
    return xs;
}

Field Field::make(const Grid& grid, std::vector<double> values) {
    if (values.size() != static_cast<std::size_t>(grid.n)) {
        throw DomainError("Field: length does not match the grid");
    }
    if (std::any_of(values.begin(), values.end(), [](double v) { return !std::isfinite(v); })) {
        throw DomainError("Field: values must be finite");
    }
    return Field{std::move(values)};
}

std::vector<double> Tridiagonal::apply(std::span<const double> v) const {
    const std::size_t n = size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = diag[j] * v[j];
        if (j > 0) {
            acc += sub[j - 1] * v[j - 1];
        }
        if (j + 1 < n) {
            acc += super[j] * v[j + 1];
        }
        out[j] = acc;
    }
    return out;
}

Tridiagonal Tridiagonal::transpose() const {
    return Tridiagonal{super, diag, sub};
}

Tridiagonal Tridiagonal::operator+(const Tridiagonal& other) const {
    Tridiagonal out = *this;
    for (std::size_t j = 0; j < out.diag.size(); ++j) {
        out.diag[j] += other.diag[j];
    }
    for (std::size_t j = 0; j < out.sub.size(); ++j) {
        out.sub[j] += other.sub[j];
        out.super[j] += other.super[j];
    }
    return out;
}

Tridiagonal Tridiagonal::operator-() const {
    Tridiagonal out = *this;
    for (double& v : out.sub) v = -v;
    for (double& v : out.diag) v = -v;
    for (double& v : out.super) v = -v;
    return out;
}

HamiltonianSplit hamiltonian_split(const Grid& grid, const MarketParams& params) {
    const auto n = static_cast<std::size_t>(grid.n);
    const double h = grid.spacing();
    const double diffusion = 0.5 * params.variance_rate() / (h * h);
    const double advection = (0.5 * params.variance_rate() - params.r) / (2.0 * h);

    HamiltonianSplit split;
    split.hermitian.diag.assign(n, 2.0 * diffusion + params.r);
    split.hermitian.sub.assign(n - 1, -diffusion);
    split.hermitian.super.assign(n - 1, -diffusion);
    split.anti_hermitian.diag.assign(n, 0.0);
    split.anti_hermitian.sub.assign(n - 1, -advection);
    split.anti_hermitian.super.assign(n - 1, advection);
    return split;
}

EvolveResult crank_nicolson_evolve(const Field& psi0, double tau_total, const MarketParams& params,
                                   const Grid& grid, int n_time_steps, int snapshot_every) {
    const auto n = static_cast<std::size_t>(grid.n);
    if (psi0.values.size() != n) {
        throw DomainError("crank_nicolson_evolve: field does not match the grid");
    }
    if (!(tau_total > 0.0) || n_time_steps < 1) {
        throw DomainError("crank_nicolson_evolve: need tau_total > 0 and at least one step");
    }
    auto peak_of = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    auto edge_of = [](const std::vector<double>& v) {
        return std::max(std::abs(v.front()), std::abs(v.back()));
    };
    const double peak0 = peak_of(psi0.values);
    if (edge_of(psi0.values) > 1e-12 * peak0) {
        throw DomainError("crank_nicolson_evolve: initial field is not negligible at the grid "
                          "ends; widen the grid");
    }

    const double dt = tau_total / n_time_steps;
    const Tridiagonal H = hamiltonian_split(grid, params).total();

    // Left operator I + dt/2 H, factorized once (Thomas algorithm).
    std::vector<double> upper(n > 1 ? n - 1 : 0);
    std::vector<double> pivot(n);
    pivot[0] = 1.0 + 0.5 * dt * H.diag[0];
    for (std::size_t j = 0; j < n; ++j) {
        if (j > 0) {
            const double l = 0.5 * dt * H.sub[j - 1];
            pivot[j] = 1.0 + 0.5 * dt * H.diag[j] - l * upper[j - 1];
        }
        if (!std::isfinite(pivot[j]) || std::abs(pivot[j]) < 1e-300) {
            throw NumericalError("crank_nicolson_evolve: zero pivot in tridiagonal solve at row " +
                                 std::to_string(j));
        }
        if (j + 1 < n) {
            upper[j] = 0.5 * dt * H.super[j] / pivot[j];
        }
    }

    EvolveResult result{psi0, {psi0}, false};
    std::vector<double> psi = psi0.values;
    std::vector<double> rhs(n);
    for (int step = 1; step <= n_time_steps; ++step) {
        // rhs = (I - dt/2 H) psi
        const std::vector<double> hpsi = H.apply(psi);
        for (std::size_t j = 0; j < n; ++j) {
            rhs[j] = psi[j] - 0.5 * dt * hpsi[j];
        }
        // forward elimination + back substitution
        psi[0] = rhs[0] / pivot[0];
        for (std::size_t j = 1; j < n; ++j) {
            psi[j] = (rhs[j] - 0.5 * dt * H.sub[j - 1] * psi[j - 1]) / pivot[j];
        }
        for (std::size_t j = n - 1; j-- > 0;) {
            psi[j] -= upper[j] * psi[j + 1];
        }
        if (edge_of(psi) > 1e-8 * peak_of(psi)) {
            result.boundary_warning = true;
        }
        if (snapshot_every > 0 && step % snapshot_every == 0 && step != n_time_steps) {
            result.snapshots.push_back(Field{psi});
        }
    }
    result.psi = Field{std::move(psi)};
    result.snapshots.push_back(result.psi);
    return result;
}

std::vector<NormSample> norm_flow(std::span<const Field> fields, const Grid& grid) {
    if (fields.size() < 2) {
        throw DomainError("norm_flow: need at least two snapshots");
    }
    const double h = grid.spacing();
    std::vector<NormSample> out;
    out.reserve(fields.size());
    for (const Field& f : fields) {
        double mass = 0.0;
        double l2 = 0.0;
        for (double v : f.values) {
            mass += v;
            l2 += v * v;
        }
        out.push_back(NormSample{h * mass, h * l2});
    }
    return out;
}

double evolved_gaussian(double x, double mean0, double sd0, double tau,
                        const MarketParams& params) {
    const double mean = mean0 - tau * params.log_drift();
    const double var = sd0 * sd0 + tau * params.variance_rate();
    const double u = x - mean;
    return std::exp(-params.r * tau) * std::exp(-u * u / (2.0 * var)) /
           std::sqrt(2.0 * std::numbers::pi * var);
}

} // namespace weakslit::oracles
