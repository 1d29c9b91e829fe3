#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ientropy/numeric.hpp"
#include "ientropy/series.hpp"
#include "ientropy/trade.hpp"

namespace ientropy {

// Exit comparison against the running vwap. ProseAboveVwap closes a position
// once the price prints above the vwap; LiteralPseudocode closes it below,
// mirroring the buy comparison instead.
enum class SellRule { ProseAboveVwap, LiteralPseudocode };

struct StrategyParams {
    std::int64_t warmup_trades = 10;  // trades observed before any order is allowed
    std::int64_t order_quantity = 1;  // shares per order
    SellRule sell_rule = SellRule::ProseAboveVwap;
};

// One completed buy/sell pair for a symbol. At most one exists per day.
struct RoundTrip {
    std::string symbol;
    std::int64_t buy_ordinal = 0;
    double buy_price = 0.0;
    double buy_vwap = 0.0;
    std::int64_t sell_ordinal = 0;
    double sell_price = 0.0;
    double sell_vwap = 0.0;
    double return_pct = 0.0;

    bool operator==(const RoundTrip&) const = default;
};

inline double round_trip_return(double buy_price, double sell_price) noexcept {
    return (sell_price / buy_price - 1.0) * 100.0;
}

// Plain arithmetic sum of per-symbol returns; positions are unit-sized and
// independent, so nothing compounds.
inline double cumulate_returns(std::span<const double> returns) noexcept {
    CompensatedSum sum;
    for (const double r : returns) sum.add(r);
    return sum.value();
}

namespace detail {

inline bool sell_price_condition(SellRule rule, double price, double vwap) noexcept {
    return rule == SellRule::ProseAboveVwap ? price > vwap : price < vwap;
}

// Single pass, single shot. Buys at the first ordinal (>= warmup) where the
// entry condition holds, then sells at the first later ordinal where an exit
// condition holds; reaching the second-to-last trade without an exit closes
// the position at the final trade's price. The last trade of the day is
// never bought: no later ordinal could close it.
inline std::optional<RoundTrip> run_single_shot(std::string_view symbol,
                                                std::span<const EntropySeriesPoint> series,
                                                const StrategyParams& params,
                                                bool require_entropy_signal) {
    const std::int64_t n = static_cast<std::int64_t>(series.size());
    if (n < params.warmup_trades) return std::nullopt;

    RoundTrip trip;
    trip.symbol = std::string(symbol);
    bool bought = false;

    for (std::int64_t i = params.warmup_trades; i <= n; ++i) {
        const EntropySeriesPoint& point = series[static_cast<std::size_t>(i - 1)];
        if (!bought) {
            const bool entropy_entry = !require_entropy_signal
                || point.h_open > 0.0 || point.h_prev > 0.0 || point.h_vwap > 0.0;
            if (entropy_entry && point.price < point.vwap && i < n) {
                bought = true;
                trip.buy_ordinal = i;
                trip.buy_price = point.price;
                trip.buy_vwap = point.vwap;
            }
            continue;
        }

        const bool entropy_exit = require_entropy_signal
            && point.h_open < 0.0 && point.h_prev < 0.0 && point.h_vwap < 0.0;
        if (entropy_exit || sell_price_condition(params.sell_rule, point.price, point.vwap)) {
            trip.sell_ordinal = i;
            trip.sell_price = point.price;
            trip.sell_vwap = point.vwap;
        } else if (i >= n - 1) {
            const EntropySeriesPoint& last = series.back();
            trip.sell_ordinal = n;
            trip.sell_price = last.price;
            trip.sell_vwap = last.vwap;
        } else {
            continue;
        }
        trip.return_pct = round_trip_return(trip.buy_price, trip.sell_price);
        return trip;
    }
    return std::nullopt;
}

} // namespace detail

// Entry requires at least one of the three entropy readings positive while
// the price prints under the running vwap; exit on all three negative, on
// the price-side rule, or at end of day.
inline std::optional<RoundTrip> run_entropy_strategy(std::string_view symbol,
                                                     std::span<const EntropySeriesPoint> series,
                                                     const StrategyParams& params = {}) {
    return detail::run_single_shot(symbol, series, params, true);
}

inline std::optional<RoundTrip> run_entropy_strategy(const TradingDayStream& stream,
                                                     const StrategyParams& params = {}) {
    const auto series = compute_series(stream);
    return run_entropy_strategy(stream.symbol, series, params);
}

// Baseline: same mechanics with the entropy conditions dropped.
inline std::optional<RoundTrip> run_vwap_strategy(std::string_view symbol,
                                                  std::span<const EntropySeriesPoint> series,
                                                  const StrategyParams& params = {}) {
    return detail::run_single_shot(symbol, series, params, false);
}

inline std::optional<RoundTrip> run_vwap_strategy(const TradingDayStream& stream,
                                                  const StrategyParams& params = {}) {
    const auto series = compute_series(stream);
    return run_vwap_strategy(stream.symbol, series, params);
}

// Per-symbol outcome; symbols that never traded keep an empty round trip.
struct SymbolResult {
    std::string symbol;
    std::optional<RoundTrip> round_trip;
};

struct BacktestReport {
    std::vector<SymbolResult> rows;   // sorted by symbol
    double cumulated_return = 0.0;
    std::int64_t traded_count = 0;
    std::int64_t considered_count = 0;
};

inline BacktestReport make_report(std::vector<SymbolResult> rows) {
    std::sort(rows.begin(), rows.end(),
              [](const SymbolResult& a, const SymbolResult& b) { return a.symbol < b.symbol; });
    BacktestReport report;
    std::vector<double> returns;
    for (const SymbolResult& row : rows) {
        if (row.round_trip) returns.push_back(row.round_trip->return_pct);
    }
    report.cumulated_return = cumulate_returns(returns);
    report.traded_count = static_cast<std::int64_t>(returns.size());
    report.considered_count = static_cast<std::int64_t>(rows.size());
    report.rows = std::move(rows);
    return report;
}

// Head-to-head comparison on the symbols both strategies actually traded,
// so the two totals cover the same set of round trips.
struct StrategyComparison {
    double cumulated_a = 0.0;          // A's summed return over the common set
    double cumulated_b = 0.0;          // B's summed return over the common set
    double average_a = 0.0;            // cumulated_a / common_traded
    double average_b = 0.0;
    std::optional<double> ratio;       // cumulated_a / cumulated_b; empty when undefined
    std::int64_t common_traded = 0;
    std::int64_t traded_a = 0;
    std::int64_t traded_b = 0;
};

inline StrategyComparison compare_strategies(const BacktestReport& a, const BacktestReport& b) {
    std::map<std::string, double> b_returns;
    for (const SymbolResult& row : b.rows) {
        if (row.round_trip) b_returns.emplace(row.symbol, row.round_trip->return_pct);
    }

    std::vector<double> common_a, common_b;
    for (const SymbolResult& row : a.rows) {
        if (!row.round_trip) continue;
        const auto it = b_returns.find(row.symbol);
        if (it == b_returns.end()) continue;
        common_a.push_back(row.round_trip->return_pct);
        common_b.push_back(it->second);
    }

    StrategyComparison comparison;
    comparison.common_traded = static_cast<std::int64_t>(common_a.size());
    comparison.traded_a = a.traded_count;
    comparison.traded_b = b.traded_count;
    comparison.cumulated_a = cumulate_returns(common_a);
    comparison.cumulated_b = cumulate_returns(common_b);
    if (comparison.common_traded > 0) {
        const double count = static_cast<double>(comparison.common_traded);
        comparison.average_a = comparison.cumulated_a / count;
        comparison.average_b = comparison.cumulated_b / count;
        if (comparison.cumulated_b != 0.0) {
            comparison.ratio = comparison.cumulated_a / comparison.cumulated_b;
        }
    }
    return comparison;
}

inline constexpr std::string_view kReportCsvHeader =
    "no,symbol,buy_trade_no,buy_price,buy_vwap,sell_trade_no,sell_price,sell_vwap,return_pct";

// One row per considered symbol in report order; symbols that never traded
// keep their trade fields empty. The final line restates the cumulated
// return in the return_pct column.
inline void write_report_csv(std::ostream& out, const BacktestReport& report) {
    out << kReportCsvHeader << '\n';
    std::int64_t row_number = 0;
    for (const SymbolResult& row : report.rows) {
        ++row_number;
        out << row_number << ',' << row.symbol << ',';
        if (row.round_trip) {
            const RoundTrip& trip = *row.round_trip;
            out << trip.buy_ordinal << ',' << to_decimal_string(trip.buy_price) << ','
                << to_decimal_string(trip.buy_vwap) << ',' << trip.sell_ordinal << ','
                << to_decimal_string(trip.sell_price) << ',' << to_decimal_string(trip.sell_vwap)
                << ',' << to_decimal_string(trip.return_pct);
        } else {
            out << ",,,,,,";
        }
        out << '\n';
    }
    out << "cumulated_return,,,,,,,," << to_decimal_string(report.cumulated_return) << '\n';
}

} // namespace ientropy
