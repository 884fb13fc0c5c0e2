#include "weakslit/market.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace weakslit::market {
namespace {

std::string summarize(const std::string& summary, const std::vector<RowIssue>& issues) {
    std::ostringstream out;
    out << summary;
    constexpr std::size_t kShown = 20;
    for (std::size_t k = 0; k < std::min(issues.size(), kShown); ++k) {
        out << "\n  row " << issues[k].row << ": " << issues[k].message;
    }
    if (issues.size() > kShown) {
        out << "\n  ... and " << issues.size() - kShown << " more";
    }
    return out.str();
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && first != last;
}

std::optional<std::string> check_bar(const PriceBar& b) {
    for (double p : {b.open, b.high, b.low, b.close}) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            return "prices must be positive and finite";
        }
    }
    if (!(b.volume >= 0.0) || !std::isfinite(b.volume)) {
        return "volume must be nonnegative and finite";
    }
    if (b.high < b.low) {
        return "high is below low";
    }
    if (b.low > std::min(b.open, b.close) || std::max(b.open, b.close) > b.high) {
        return "open/close outside [low, high]";
    }
    return std::nullopt;
}

} // namespace

DataError::DataError(const std::string& summary, std::vector<RowIssue> issues)
    : std::runtime_error(summarize(summary, issues)), issues_(std::move(issues)) {}

std::vector<PriceBar> load_bars(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("missing CSV header", {});
    }
    if (line.starts_with("\xEF\xBB\xBF")) {
        line.erase(0, 3);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kCsvHeader) {
        throw ParseError("CSV header must be exactly `" + std::string(kCsvHeader) + "`, got `" +
                             line + "`",
                         {});
    }

    std::vector<PriceBar> bars;
    std::vector<RowIssue> parse_issues;
    std::vector<RowIssue> invalid;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != 6) {
            parse_issues.push_back({row, "expected 6 fields, found " + std::to_string(fields.size())});
            continue;
        }
        PriceBar bar{};
        if (!parse_number(fields[0], bar.timestamp)) {
            parse_issues.push_back({row, "timestamp is not an integer: `" + std::string(fields[0]) + "`"});
            continue;
        }
        double* slots[] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.volume};
        static constexpr const char* kNames[] = {"open", "high", "low", "close", "volume"};
        bool ok = true;
        for (std::size_t k = 0; k < 5 && ok; ++k) {
            if (!parse_number(fields[k + 1], *slots[k])) {
                parse_issues.push_back(
                    {row, std::string(kNames[k]) + " is not a number: `" + std::string(fields[k + 1]) + "`"});
                ok = false;
            }
        }
        if (!ok) {
            continue;
        }
        if (auto problem = check_bar(bar)) {
            invalid.push_back({row, *problem});
            continue;
        }
        if (!bars.empty() && bar.timestamp <= bars.back().timestamp) {
            invalid.push_back({row, "timestamp " + std::to_string(bar.timestamp) +
                                        " does not increase"});
            continue;
        }
        bars.push_back(bar);
    }
    if (!parse_issues.empty()) {
        throw ParseError("malformed CSV rows", std::move(parse_issues));
    }
    if (!invalid.empty()) {
        throw ValidationError("invalid CSV rows", std::move(invalid));
    }
    return bars;
}

std::vector<PriceBar> load_bars(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string(), {});
    }
    return load_bars(in);
}

std::vector<std::optional<double>> relative_volume(std::span<const PriceBar> bars, int window) {
    if (window < 2) {
        throw DomainError("relative_volume: window must be at least 2");
    }
    const auto w = static_cast<std::size_t>(window);
    if (bars.size() < w) {
        throw DomainError("relative_volume: fewer bars than the window");
    }
    std::vector<std::optional<double>> out(bars.size());
    for (std::size_t k = w; k < bars.size(); ++k) {
        double sum = 0.0;
        for (std::size_t j = k - w; j < k; ++j) {
            sum += bars[j].volume;
        }
        const double mean = sum / static_cast<double>(w);
        if (mean > 0.0) {
            out[k] = bars[k].volume / mean;
        }
    }
    return out;
}

IntervalEvent interval_to_slits(std::span<const PriceBar> window) {
    if (window.empty()) {
        throw DomainError("interval_to_slits: empty window");
    }
    double hi = window.front().high;
    double lo = window.front().low;
    std::int64_t t_start = window.front().timestamp;
    std::int64_t t_end = window.front().timestamp;
    double t_sum = 0.0;
    for (const PriceBar& b : window) {
        hi = std::max(hi, b.high);
        lo = std::min(lo, b.low);
        t_start = std::min(t_start, b.timestamp);
        t_end = std::max(t_end, b.timestamp);
    }
    // offsets from the earliest bar keep the sum exact for epoch-sized values
    for (const PriceBar& b : window) {
        t_sum += static_cast<double>(b.timestamp - t_start);
    }
    const double O1 = std::log(hi);
    const double O2 = std::log(lo);
    IntervalEvent ev{};
    ev.t_start = t_start;
    ev.t_end = t_end;
    ev.t_mean = static_cast<double>(t_start) + t_sum / static_cast<double>(window.size());
    ev.O1 = O1;
    ev.O2 = O2;
    ev.c = 0.5 * (O1 + O2);
    ev.x_i = 0.5 * (O1 - O2);
    return ev;
}

std::vector<IntervalEvent> detect_events(std::span<const PriceBar> bars,
                                         std::span<const std::optional<double>> rvol,
                                         double threshold, int merge_gap) {
    if (!(threshold > 1.0)) {
        throw DomainError("detect_events: threshold must exceed 1");
    }
    if (rvol.size() != bars.size()) {
        throw DomainError("detect_events: rvol and bars differ in length");
    }
    if (merge_gap < 0) {
        throw DomainError("detect_events: merge_gap must be nonnegative");
    }
    auto hot = [&](std::size_t k) { return rvol[k].has_value() && *rvol[k] >= threshold; };

    // [first, last] index spans, already merged across short gaps.
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (std::size_t k = 0; k < bars.size(); ++k) {
        if (!hot(k)) {
            continue;
        }
        if (!spans.empty() && k - spans.back().second - 1 <= static_cast<std::size_t>(merge_gap)) {
            spans.back().second = k;
        } else {
            spans.emplace_back(k, k);
        }
    }

    std::vector<IntervalEvent> events;
    events.reserve(spans.size());
    for (const auto& [first, last] : spans) {
        IntervalEvent ev = interval_to_slits(bars.subspan(first, last - first + 1));
        for (std::size_t k = first; k <= last; ++k) {
            if (rvol[k]) {
                ev.peak_rvol = std::max(ev.peak_rvol, *rvol[k]);
            }
        }
        events.push_back(ev);
    }
    return events;
}

TrajectoryRequest event_trajectory_request(const IntervalEvent& event, double S_final,
                                           const MarketParams& params, int steps) {
    const LogPriceFrame frame = event.frame();
    const double x_f = to_centered(S_final, frame);
    return TrajectoryRequest{SlitConfig::symmetric_pair(event.x_i, x_f, SlitSide::pre), params,
                             frame, steps, TrajectoryMethod::closed_form};
}

ScenarioSet ScenarioSet::make(std::vector<Scenario> scenarios) {
    if (scenarios.empty()) {
        throw DomainError("ScenarioSet: no scenarios");
    }
    double total = 0.0;
    for (const Scenario& s : scenarios) {
        if (!(s.probability >= 0.0) || !std::isfinite(s.ret)) {
            throw DomainError("ScenarioSet: probabilities must be nonnegative, returns finite");
        }
        total += s.probability;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw DomainError("ScenarioSet: probabilities must sum to 1");
    }
    return ScenarioSet{std::move(scenarios)};
}

double expected_return(const ScenarioSet& s) noexcept {
    double e = 0.0;
    for (const Scenario& sc : s.scenarios) {
        e += sc.probability * sc.ret;
    }
    return e;
}

double return_variance(const ScenarioSet& s) noexcept {
    const double e = expected_return(s);
    double v = 0.0;
    for (const Scenario& sc : s.scenarios) {
        const double d = sc.ret - e;
        v += sc.probability * d * d;
    }
    return v;
}

double risk_premium(double expected, double r, double sigma) {
    if (!(sigma > 0.0)) {
        throw DomainError("risk_premium: sigma must be positive");
    }
    return (expected - r) / sigma;
}

double fractional_return(double S_t, double S_tT, double dividends) {
    if (!(S_t > 0.0)) {
        throw DomainError("fractional_return: S_t must be positive");
    }
    return (S_tT + dividends - S_t) / S_t;
}

} // namespace weakslit::market
