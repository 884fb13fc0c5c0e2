#include "cli.hpp"

#include "weakslit/core_types.hpp"
#include "weakslit/kernel.hpp"
#include "weakslit/market.hpp"
#include "weakslit/oracles.hpp"
#include "weakslit/qm_reference.hpp"
#include "weakslit/weak_value.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace weakslit::cli {
namespace {

/// Raised for flag combinations CLI11 cannot express; maps to kUsageError.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_cell(const Table::Cell& cell) {
    if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        return std::to_string(*i);
    }
    return format_double(std::get<double>(cell));
}

struct OutputOptions {
    std::string path;
    std::string format = "csv";
};

void emit(const Table& table, const OutputOptions& opts, std::ostream& out) {
    auto write = [&](std::ostream& os) {
        if (opts.format == "json") {
            write_json(table, os);
        } else {
            write_csv(table, os);
        }
    };
    if (opts.path.empty()) {
        write(out);
        return;
    }
    std::ofstream file(opts.path, std::ios::binary);
    if (!file) {
        throw DomainError("cannot open output file " + opts.path);
    }
    write(file);
    if (!file) {
        throw DomainError("failed writing output file " + opts.path);
    }
}

void add_output_flags(CLI::App& cmd, OutputOptions& opts) {
    cmd.add_option("--out", opts.path, "Output file (default: stdout)");
    cmd.add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

// ---------------------------------------------------------------------------
// trajectory
// ---------------------------------------------------------------------------

struct TrajectoryConfig {
    std::string mode = "forward";
    double r = 0.0;
    double sigma = 0.0;
    double T = 0.0;
    std::optional<double> xi;
    std::optional<double> xf;
    std::optional<double> final_price;
    std::vector<double> slits;
    std::vector<double> weights;
    std::string side = "pre";
    int steps = 101;
    double shift_c = 0.0;
    OutputOptions output;
};

bool is_symmetric_equal_pair(const SlitConfig& s) {
    return s.positions.size() == 2 && s.positions[0] == -s.positions[1] &&
           s.weights[0] == s.weights[1];
}

Table run_trajectory(const TrajectoryConfig& cfg) {
    const MarketParams params = MarketParams::make(cfg.r, cfg.sigma, cfg.T);
    const LogPriceFrame frame = LogPriceFrame::make(cfg.shift_c);

    if (cfg.xf && cfg.final_price) {
        throw UsageError("--xf and --final-price are mutually exclusive");
    }
    std::optional<double> xf = cfg.xf;
    if (cfg.final_price) {
        xf = to_centered(*cfg.final_price, frame);
    }

    TrajectoryRequest request{SlitConfig{}, params, frame, cfg.steps, TrajectoryMethod::closed_form};
    if (cfg.mode == "forward") {
        if (!cfg.xi || !xf) {
            throw UsageError("forward mode requires --xi and --xf (or --final-price)");
        }
        if (*cfg.xi < 0.0) {
            throw DomainError("--xi is a slit half-separation and must be nonnegative");
        }
        request.slits = SlitConfig::symmetric_pair(*cfg.xi, *xf, SlitSide::pre);
    } else if (cfg.mode == "inverse") {
        if (!cfg.xi || !xf) {
            throw UsageError("inverse mode requires --xi and --xf (or --final-price)");
        }
        if (*xf < 0.0) {
            throw DomainError("in inverse mode --xf is a slit half-separation and must be nonnegative");
        }
        request.slits = SlitConfig::symmetric_pair(*xf, *cfg.xi, SlitSide::post);
    } else {
        if (cfg.slits.empty()) {
            throw UsageError("nslit mode requires --slits");
        }
        const SlitSide side = cfg.side == "post" ? SlitSide::post : SlitSide::pre;
        const std::optional<double> endpoint = side == SlitSide::pre ? xf : cfg.xi;
        if (!endpoint) {
            throw UsageError(side == SlitSide::pre ? "nslit with --side pre requires --xf"
                                                   : "nslit with --side post requires --xi");
        }
        request.slits = SlitConfig::make(cfg.slits, *endpoint, side, cfg.weights);
        // An equal-weight +/-a pair is exactly the two-slit closed form.
        request.method = is_symmetric_equal_pair(request.slits) ? TrajectoryMethod::closed_form
                                                                 : TrajectoryMethod::n_slit;
    }

    Table table{{"t", "tau", "x_w", "band_low", "band_high", "S_w"}, {}};
    for (const WeakTrajectorySample& s : sample_trajectory(request)) {
        table.rows.push_back({s.t, s.tau, s.x_w, s.band_low, s.band_high, from_centered(s.x_w, frame)});
    }
    return table;
}

// ---------------------------------------------------------------------------
// kernel
// ---------------------------------------------------------------------------

struct KernelEvalConfig {
    double r = 0.0;
    double sigma = 0.0;
    double x = 0.0;
    double tau = 0.0;
    double x_prime = 0.0;
    OutputOptions output;
};

Table run_kernel_eval(const KernelEvalConfig& cfg) {
    // point evaluation uses tau directly; the horizon field is irrelevant here
    const MarketParams params = MarketParams::make(cfg.r, cfg.sigma, 1.0);
    const double value = bs_kernel(cfg.x, cfg.tau, cfg.x_prime, params);
    return Table{{"x", "tau", "x_prime", "value"}, {{cfg.x, cfg.tau, cfg.x_prime, value}}};
}

struct KernelValidateConfig {
    double r = 0.05;
    double sigma = 0.2;
    double tau = 1.0;
    std::int64_t paths = 10'000'000;
    int grid_n = 4000;
    int time_steps = 2000;
    int bins = 50;
    std::uint64_t seed = 42;
    OutputOptions output;
};

constexpr double kPdeTolerance = 1e-3;     // L-infinity error relative to the peak
constexpr double kChiSquareLevel = 1e-3;   // minimum p-value
constexpr double kMassTolerance = 1e-4;    // |mass ratio - e^{-r tau}|
constexpr double kInitialSd = 0.05;

Table run_kernel_validate(const KernelValidateConfig& cfg, std::ostream& err) {
    if (cfg.paths < 100) {
        throw DomainError("--paths must be at least 100");
    }
    const MarketParams params = MarketParams::make(cfg.r, cfg.sigma, cfg.tau);
    const auto grid = oracles::Grid::make(-3.0, 3.0, cfg.grid_n);

    std::vector<double> psi0(static_cast<std::size_t>(grid.n));
    for (int j = 0; j < grid.n; ++j) {
        const double z = grid.node(j) / kInitialSd;
        psi0[j] = std::exp(-0.5 * z * z) / (kInitialSd * std::sqrt(2.0 * std::numbers::pi));
    }
    const auto evolved = oracles::crank_nicolson_evolve(oracles::Field::make(grid, psi0), cfg.tau,
                                                        params, grid, cfg.time_steps);
    double err_max = 0.0;
    double peak = 0.0;
    for (int j = 0; j < grid.n; ++j) {
        const double exact = oracles::evolved_gaussian(grid.node(j), 0.0, kInitialSd, cfg.tau, params);
        err_max = std::max(err_max, std::abs(evolved.psi.values[j] - exact));
        peak = std::max(peak, exact);
    }
    const double linf_rel = err_max / peak;
    const auto flow = oracles::norm_flow(evolved.snapshots, grid);
    const double mass_ratio = flow.back().mass / flow.front().mass;
    const double expected_ratio = std::exp(-cfg.r * cfg.tau);

    const auto hist = oracles::mc_kernel_density(0.0, cfg.tau, params,
                                                 static_cast<std::size_t>(cfg.paths),
                                                 static_cast<std::size_t>(cfg.bins), cfg.seed);
    const auto chi = oracles::chi_square_vs_kernel(hist, 0.0, cfg.tau, params);

    const bool pde_ok = linf_rel <= kPdeTolerance;
    const bool chi_ok = chi.p_value > kChiSquareLevel;
    const bool mass_ok = std::abs(mass_ratio - expected_ratio) <= kMassTolerance;
    const bool pass = pde_ok && chi_ok && mass_ok;

    Table table{{"pde_linf_rel", "chi2_statistic", "chi2_dof", "chi2_p_value", "mass_ratio",
                 "expected_mass_ratio", "boundary_warning", "seed", "pass"},
                {{linf_rel, chi.statistic, std::int64_t{chi.dof}, chi.p_value, mass_ratio,
                  expected_ratio, std::int64_t{evolved.boundary_warning},
                  static_cast<std::int64_t>(cfg.seed), std::int64_t{pass}}}};
    if (!pde_ok) {
        err << "validation failed: pde_linf_rel " << format_double(linf_rel) << " > "
            << kPdeTolerance << "\n";
    }
    if (!chi_ok) {
        err << "validation failed: chi2_p_value " << format_double(chi.p_value)
            << " <= " << kChiSquareLevel << "\n";
    }
    if (!mass_ok) {
        err << "validation failed: mass_ratio " << format_double(mass_ratio) << " differs from "
            << format_double(expected_ratio) << " by more than " << kMassTolerance << "\n";
    }
    return table;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

struct ScanConfig {
    std::string csv;
    double threshold = 2.0;
    int window = 20;
    int merge_gap = 0;
    OutputOptions output;
};

Table run_scan(const ScanConfig& cfg) {
    const auto bars = market::load_bars(std::filesystem::path(cfg.csv));
    Table table{{"t_start", "t_end", "t_mean", "O1", "O2", "c", "x_i", "peak_rvol"}, {}};
    if (bars.empty()) {
        return table;
    }
    const auto rvol = market::relative_volume(bars, cfg.window);
    for (const auto& ev : market::detect_events(bars, rvol, cfg.threshold, cfg.merge_gap)) {
        table.rows.push_back({ev.t_start, ev.t_end, ev.t_mean, ev.O1, ev.O2, ev.c, ev.x_i, ev.peak_rvol});
    }
    return table;
}

// ---------------------------------------------------------------------------
// qm
// ---------------------------------------------------------------------------

struct QmConfig {
    double m = 1.0;
    double hbar = 1.0;
    double T = 1.0;
    double xi = 0.0;
    double d = 1.0;
    // pattern
    double x_min = -5.0;
    double x_max = 5.0;
    int points = 1001;
    // trajectory
    double xf = 0.0;
    int steps = 101;
    OutputOptions output;
};

Table run_qm_pattern(const QmConfig& cfg) {
    const auto qm = qm::QmParams::make(cfg.m, cfg.hbar, cfg.T, cfg.xi, cfg.d);
    if (cfg.points < 2 || !(cfg.x_min < cfg.x_max)) {
        throw DomainError("pattern needs --points >= 2 and --x-min < --x-max");
    }
    Table table{{"x_f", "intensity"}, {}};
    for (int k = 0; k < cfg.points; ++k) {
        const double x = k + 1 == cfg.points
                             ? cfg.x_max
                             : cfg.x_min + (cfg.x_max - cfg.x_min) * k / (cfg.points - 1);
        table.rows.push_back({x, qm::interference_pattern(x, qm)});
    }
    return table;
}

Table run_qm_trajectory(const QmConfig& cfg) {
    const auto qm = qm::QmParams::make(cfg.m, cfg.hbar, cfg.T, cfg.xi, cfg.d);
    if (cfg.steps < 2) {
        throw DomainError("--steps must be at least 2");
    }
    Table table{{"t", "re", "im", "divergent"}, {}};
    for (int k = 0; k < cfg.steps; ++k) {
        const double t = k + 1 == cfg.steps ? cfg.T : cfg.T * k / (cfg.steps - 1);
        const auto w = qm::qm_weak_trajectory(t, cfg.xf, qm);
        table.rows.push_back({t, w.value.real(), w.value.imag(), std::int64_t{w.divergent}});
    }
    return table;
}

} // namespace

void write_csv(const Table& table, std::ostream& out) {
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
        out << (k ? "," : "") << table.columns[k];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            out << (k ? "," : "") << format_cell(row[k]);
        }
        out << '\n';
    }
}

void write_json(const Table& table, std::ostream& out) {
    out << "{\"columns\":[";
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
        out << (k ? "," : "") << '"' << table.columns[k] << '"';
    }
    out << "],\"rows\":[";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << (r ? "," : "") << '{';
        const auto& row = table.rows[r];
        for (std::size_t k = 0; k < row.size(); ++k) {
            out << (k ? "," : "") << '"' << table.columns[k] << "\":";
            const auto* d = std::get_if<double>(&row[k]);
            out << (d && !std::isfinite(*d) ? std::string("null") : format_cell(row[k]));
        }
        out << '}';
    }
    out << "]}\n";
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("WEAKSLIT_SEED")) {
        std::uint64_t seed = 0;
        const std::string_view text(env);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
        if (ec == std::errc{} && ptr == text.data() + text.size() && !text.empty()) {
            return seed;
        }
    }
    return 42;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weak-value trajectories for option prices under drift-diffusion pricing kernels",
                 "weakslit"};
    app.require_subcommand(1);

    TrajectoryConfig traj;
    auto* traj_cmd = app.add_subcommand("trajectory", "Sample a weak-value price trajectory");
    traj_cmd->add_option("--mode", traj.mode, "forward | inverse | nslit")
        ->check(CLI::IsMember({"forward", "inverse", "nslit"}))
        ->default_str("forward");
    traj_cmd->add_option("--r", traj.r, "Spot interest rate")->required();
    traj_cmd->add_option("--sigma", traj.sigma, "Volatility")->required();
    traj_cmd->add_option("--T", traj.T, "Horizon")->required();
    traj_cmd->add_option("--xi", traj.xi,
                         "forward: slit half-separation; inverse / nslit post: initial log-price");
    traj_cmd->add_option("--xf", traj.xf,
                         "forward / nslit pre: final log-price; inverse: slit half-separation");
    traj_cmd->add_option("--final-price", traj.final_price,
                         "Final price S; sets x_f = ln(S) - shift-c");
    traj_cmd->add_option("--slits", traj.slits, "nslit: comma-separated slit log-prices")
        ->delimiter(',');
    traj_cmd->add_option("--weights", traj.weights, "nslit: comma-separated slit weights")
        ->delimiter(',');
    traj_cmd->add_option("--side", traj.side, "nslit: slits at the pre (initial) or post (final) side")
        ->check(CLI::IsMember({"pre", "post"}))
        ->default_str("pre");
    traj_cmd->add_option("--steps", traj.steps, "Number of samples")->default_val(101);
    traj_cmd->add_option("--shift-c", traj.shift_c, "Log-price shift c")->default_val(0.0);
    add_output_flags(*traj_cmd, traj.output);

    auto* kernel_cmd = app.add_subcommand("kernel", "Black-Scholes pricing kernel");
    kernel_cmd->require_subcommand(1);
    KernelEvalConfig keval;
    auto* eval_cmd = kernel_cmd->add_subcommand("eval", "Evaluate p(x, tau; x')");
    eval_cmd->add_option("--r", keval.r, "Spot interest rate")->required();
    eval_cmd->add_option("--sigma", keval.sigma, "Volatility")->required();
    eval_cmd->add_option("--tau", keval.tau, "Backward time")->required();
    eval_cmd->add_option("--x", keval.x, "Present log-price")->default_val(0.0);
    eval_cmd->add_option("--x-prime", keval.x_prime, "Log-price at expiry")->default_val(0.0);
    add_output_flags(*eval_cmd, keval.output);

    KernelValidateConfig kval;
    kval.seed = default_seed();
    auto* validate_cmd =
        kernel_cmd->add_subcommand("validate", "Check the kernel against PDE and Monte Carlo oracles");
    validate_cmd->add_option("--r", kval.r, "Spot interest rate")->capture_default_str();
    validate_cmd->add_option("--sigma", kval.sigma, "Volatility")->capture_default_str();
    validate_cmd->add_option("--tau", kval.tau, "Backward time")->capture_default_str();
    validate_cmd->add_option("--paths", kval.paths, "Monte Carlo paths")->capture_default_str();
    validate_cmd->add_option("--grid-n", kval.grid_n, "PDE interior grid nodes on [-3, 3]")
        ->capture_default_str();
    validate_cmd->add_option("--time-steps", kval.time_steps, "Crank-Nicolson steps")
        ->capture_default_str();
    validate_cmd->add_option("--bins", kval.bins, "Histogram bins")->capture_default_str();
    validate_cmd->add_option("--seed", kval.seed, "RNG seed (default $WEAKSLIT_SEED or 42)")
        ->capture_default_str();
    add_output_flags(*validate_cmd, kval.output);

    ScanConfig scan;
    auto* scan_cmd = app.add_subcommand("scan", "Detect high relative-volume intervals in OHLCV data");
    scan_cmd->add_option("--csv", scan.csv, "Input CSV")->required();
    scan_cmd->add_option("--rvol-threshold", scan.threshold, "RVOL threshold")->default_val(2.0);
    scan_cmd->add_option("--window", scan.window, "Trailing volume window (bars)")->default_val(20);
    scan_cmd->add_option("--merge-gap", scan.merge_gap, "Merge runs separated by <= this many bars")
        ->default_val(0);
    add_output_flags(*scan_cmd, scan.output);

    QmConfig qmc;
    auto* qm_cmd = app.add_subcommand("qm", "Free-particle double-slit reference");
    qm_cmd->require_subcommand(1);
    auto add_qm_common = [&qmc](CLI::App& cmd) {
        cmd.add_option("--m", qmc.m, "Mass")->capture_default_str();
        cmd.add_option("--hbar", qmc.hbar, "Reduced Planck constant")->capture_default_str();
        cmd.add_option("--T", qmc.T, "Transit time")->capture_default_str();
        cmd.add_option("--xi", qmc.xi, "Slit half-separation")->required();
        cmd.add_option("--d", qmc.d, "Slit-to-screen distance")->capture_default_str();
    };
    auto* pattern_cmd = qm_cmd->add_subcommand("pattern", "Screen intensity 1 + cos(...)");
    add_qm_common(*pattern_cmd);
    pattern_cmd->add_option("--x-min", qmc.x_min, "First screen point")->capture_default_str();
    pattern_cmd->add_option("--x-max", qmc.x_max, "Last screen point")->capture_default_str();
    pattern_cmd->add_option("--points", qmc.points, "Screen points")->capture_default_str();
    add_output_flags(*pattern_cmd, qmc.output);
    auto* qtraj_cmd = qm_cmd->add_subcommand("trajectory", "Complex weak trajectory");
    add_qm_common(*qtraj_cmd);
    qtraj_cmd->add_option("--xf", qmc.xf, "Screen position")->required();
    qtraj_cmd->add_option("--steps", qmc.steps, "Number of samples")->capture_default_str();
    add_output_flags(*qtraj_cmd, qmc.output);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kUsageError;
    }

    try {
        if (*traj_cmd) {
            emit(run_trajectory(traj), traj.output, out);
        } else if (*eval_cmd) {
            emit(run_kernel_eval(keval), keval.output, out);
        } else if (*validate_cmd) {
            const Table report = run_kernel_validate(kval, err);
            emit(report, kval.output, out);
            if (std::get<std::int64_t>(report.rows.front().back()) == 0) {
                return kValidationFailure;
            }
        } else if (*scan_cmd) {
            emit(run_scan(scan), scan.output, out);
        } else if (*pattern_cmd) {
            emit(run_qm_pattern(qmc), qmc.output, out);
        } else if (*qtraj_cmd) {
            emit(run_qm_trajectory(qmc), qmc.output, out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const market::DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kDataError;
    }
    return kOk;
}

} // namespace weakslit::cli
