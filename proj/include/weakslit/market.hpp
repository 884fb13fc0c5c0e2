#pragma once

#include "weakslit/core_types.hpp"
#include "weakslit/weak_value.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace weakslit::market {

struct PriceBar {
    std::int64_t timestamp; // epoch seconds
    double open;
    double high;
    double low;
    double close;
    double volume;

    bool operator==(const PriceBar&) const = default;
};

struct RowIssue {
    std::size_t row; // 1-based data row (the header is not counted)
    std::string message;
};

/// Input data could not be used. what() lists every offending row.
class DataError : public std::runtime_error {
public:
    DataError(const std::string& summary, std::vector<RowIssue> issues);

    [[nodiscard]] const std::vector<RowIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<RowIssue> issues_;
};

/// Malformed header or unparsable row.
class ParseError : public DataError {
public:
    using DataError::DataError;
};

/// Well-formed rows that break an OHLCV invariant or timestamp ordering.
class ValidationError : public DataError {
public:
    using DataError::DataError;
};

/// Exact header required on the first line.
inline constexpr std::string_view kCsvHeader = "timestamp,open,high,low,close,volume";

/// Reads UTF-8 CSV with header `timestamp,open,high,low,close,volume`.
/// Prices must be positive, volume nonnegative,
/// low <= min(open, close) <= max(open, close) <= high, and timestamps strictly
/// increasing. Blank lines are ignored.
[[nodiscard]] std::vector<PriceBar> load_bars(std::istream& in);
[[nodiscard]] std::vector<PriceBar> load_bars(const std::filesystem::path& path);

/// RVOL_k = volume_k / mean(volume_{k-window} .. volume_{k-1}).
/// Entries without a full trailing window, or with a zero trailing mean, are empty.
/// Throws DomainError for window < 2 or fewer bars than `window`.
[[nodiscard]] std::vector<std::optional<double>> relative_volume(std::span<const PriceBar> bars,
                                                                 int window);

struct IntervalEvent {
    std::int64_t t_start;
    std::int64_t t_end;
    double t_mean;
    double O1; // max ln(high)
    double O2; // min ln(low)
    double c;  // (O1 + O2) / 2
    double x_i; // (O1 - O2) / 2
    double peak_rvol = 0.0;

    [[nodiscard]] LogPriceFrame frame() const { return LogPriceFrame{c}; }
};

/// Reduces a window of bars to a double slit: slits at +/-x_i around shift c,
/// time = arithmetic mean of the bar timestamps. Throws DomainError on an empty window.
[[nodiscard]] IntervalEvent interval_to_slits(std::span<const PriceBar> window);

/// Maximal runs of bars with RVOL >= threshold; runs separated by at most
/// `merge_gap` non-qualifying bars are merged (gap bars included in the event).
/// Throws DomainError unless threshold > 1 and rvol matches bars in length.
[[nodiscard]] std::vector<IntervalEvent> detect_events(std::span<const PriceBar> bars,
                                                       std::span<const std::optional<double>> rvol,
                                                       double threshold, int merge_gap = 0);

/// Forward double-slit request for an event: slits at +/-x_i, final price
/// x_f = ln(S_final) - c in the event's frame.
[[nodiscard]] TrajectoryRequest event_trajectory_request(const IntervalEvent& event,
                                                         double S_final,
                                                         const MarketParams& params, int steps);

// ---------------------------------------------------------------------------
// Risk and return
// ---------------------------------------------------------------------------

struct Scenario {
    double probability;
    double ret;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;

    /// Throws DomainError for an empty set, a negative probability, or
    /// probabilities not summing to 1 within 1e-9.
    static ScenarioSet make(std::vector<Scenario> scenarios);
};

[[nodiscard]] double expected_return(const ScenarioSet& s) noexcept;

/// sum p_s (R_s - E)^2, two passes.
[[nodiscard]] double return_variance(const ScenarioSet& s) noexcept;

/// (expected - r) / sigma. Throws DomainError for sigma <= 0.
[[nodiscard]] double risk_premium(double expected, double r, double sigma);

/// (S_tT + dividends - S_t) / S_t. Throws DomainError for S_t <= 0.
[[nodiscard]] double fractional_return(double S_t, double S_tT, double dividends);

} // namespace weakslit::market
