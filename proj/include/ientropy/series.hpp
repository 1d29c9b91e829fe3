#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "ientropy/entropy.hpp"
#include "ientropy/numeric.hpp"
#include "ientropy/trade.hpp"
#include "ientropy/vwap.hpp"

namespace ientropy {

// Per-trade snapshot of the indicator state after the trade was absorbed.
// vwap includes the trade itself; the entropy references stay lagged.
struct EntropySeriesPoint {
    std::int64_t ordinal = 0;    // 1-based position within the day
    Timestamp timestamp;
    double price = 0.0;
    double vwap = 0.0;
    double h_open = 0.0;
    double h_prev = 0.0;
    double h_vwap = 0.0;
};

// Single pass over a day: all three reference modes plus the running vwap
// advance in lockstep, one point per trade.
inline std::vector<EntropySeriesPoint> compute_series(const TradingDayStream& stream) {
    std::vector<EntropySeriesPoint> series;
    series.reserve(stream.trades.size());

    EntropyAccumulator h_open(ReferenceMode::OpenPrice);
    EntropyAccumulator h_prev(ReferenceMode::PrecedingTrade);
    EntropyAccumulator h_vwap(ReferenceMode::MovingVwap);
    VwapState vwap;

    std::int64_t ordinal = 0;
    for (const Trade& trade : stream.trades) {
        ++ordinal;
        h_open.add(trade);
        h_prev.add(trade);
        h_vwap.add(trade);
        vwap.add(trade.price, trade.quantity);
        series.push_back({ordinal, trade.timestamp, trade.price, vwap.vwap(),
                          h_open.value(), h_prev.value(), h_vwap.value()});
    }
    return series;
}

inline constexpr std::string_view kSeriesCsvHeader =
    "ordinal,timestamp,price,vwap,h_open,h_prev,h_vwap";

// Values are written with shortest round-trip formatting, so every double
// survives a parse back bit for bit.
inline void write_series_csv(std::ostream& out, std::span<const EntropySeriesPoint> series) {
    out << kSeriesCsvHeader << '\n';
    for (const EntropySeriesPoint& point : series) {
        out << point.ordinal << ',' << point.timestamp.to_string() << ','
            << to_decimal_string(point.price) << ',' << to_decimal_string(point.vwap) << ','
            << to_decimal_string(point.h_open) << ',' << to_decimal_string(point.h_prev) << ','
            << to_decimal_string(point.h_vwap) << '\n';
    }
}

} // namespace ientropy
