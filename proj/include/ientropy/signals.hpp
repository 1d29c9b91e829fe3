#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "ientropy/error.hpp"

namespace ientropy {

// Reading of a single entropy value against a dead band of width epsilon.
enum class Direction { BuyInclined, SellInclined, Indeterminate };

inline Direction classify_direction(double entropy, double epsilon) noexcept {
    if (entropy > epsilon) return Direction::BuyInclined;
    if (entropy < -epsilon) return Direction::SellInclined;
    return Direction::Indeterminate;
}

enum class CrossingDirection { IntoNegative, IntoPositive };

// Which per-trade series an event was detected on.
enum class SeriesKind { EntropyOpen, EntropyPreceding, EntropyVwap, PriceMinusVwap };

inline std::string_view series_kind_name(SeriesKind kind) noexcept {
    switch (kind) {
        case SeriesKind::EntropyOpen: return "h_open";
        case SeriesKind::EntropyPreceding: return "h_prev";
        case SeriesKind::EntropyVwap: return "h_vwap";
        case SeriesKind::PriceMinusVwap: return "price_minus_vwap";
    }
    return "";
}

struct SeriesPoint {
    std::int64_t ordinal = 0;
    double value = 0.0;
};

struct CrossingEvent {
    std::int64_t ordinal = 0;
    CrossingDirection direction = CrossingDirection::IntoNegative;
    SeriesKind series = SeriesKind::EntropyOpen;
};

// Emits one event per strict sign change between the most recent nonzero
// value and the current one. Exact zeros neither emit nor clear the running
// sign, so a series that touches zero and returns to the same side stays
// quiet, while one that crosses through zero still fires.
inline std::vector<CrossingEvent> detect_crossings(std::span<const SeriesPoint> series,
                                                   SeriesKind kind) {
    std::vector<CrossingEvent> events;
    int last_sign = 0;
    for (const SeriesPoint& point : series) {
        const int sign = point.value > 0.0 ? 1 : (point.value < 0.0 ? -1 : 0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) {
            events.push_back({point.ordinal,
                              sign < 0 ? CrossingDirection::IntoNegative
                                       : CrossingDirection::IntoPositive,
                              kind});
        }
        last_sign = sign;
    }
    return events;
}

// Ordinal gap between the first sustained dip of the entropy series into
// negative territory and the first trade printing strictly below the running
// vwap. "Sustained" means the entropy stays strictly negative for at least
// sustain_window consecutive points starting at the crossing itself. Either
// event missing means there is nothing to measure. A negative result is
// meaningful: the price broke the vwap before the entropy turned.
inline std::optional<std::int64_t> lead_time(std::span<const SeriesPoint> entropy,
                                             std::span<const SeriesPoint> price,
                                             std::span<const SeriesPoint> vwap,
                                             std::int64_t sustain_window = 3) {
    if (price.size() != vwap.size() || price.size() != entropy.size()) {
        throw ValidationError("lead_time requires series aligned on the same ordinals");
    }
    if (sustain_window < 1) {
        throw ValidationError("sustain window must be >= 1");
    }

    std::optional<std::int64_t> price_cross;
    for (std::size_t i = 0; i < price.size(); ++i) {
        if (price[i].value < vwap[i].value) {
            price_cross = price[i].ordinal;
            break;
        }
    }

    std::optional<std::int64_t> entropy_cross;
    int last_sign = 0;
    for (std::size_t i = 0; i < entropy.size() && !entropy_cross; ++i) {
        const double value = entropy[i].value;
        const int sign = value > 0.0 ? 1 : (value < 0.0 ? -1 : 0);
        if (sign == 0) continue;
        if (last_sign > 0 && sign < 0) {
            const std::size_t window = static_cast<std::size_t>(sustain_window);
            bool sustained = i + window <= entropy.size();
            for (std::size_t k = 0; sustained && k < window; ++k) {
                sustained = entropy[i + k].value < 0.0;
            }
            if (sustained) entropy_cross = entropy[i].ordinal;
        }
        last_sign = sign;
    }

    if (!price_cross || !entropy_cross) return std::nullopt;
    return *price_cross - *entropy_cross;
}

inline constexpr std::string_view kSignalsCsvHeader = "ordinal,series,direction";

// Events are written in the order given; callers sort by whatever key suits
// the report.
inline void write_signals_csv(std::ostream& out, std::span<const CrossingEvent> events) {
    out << kSignalsCsvHeader << '\n';
    for (const CrossingEvent& event : events) {
        out << event.ordinal << ',' << series_kind_name(event.series) << ','
            << (event.direction == CrossingDirection::IntoNegative ? "into_negative"
                                                                   : "into_positive")
            << '\n';
    }
}

} // namespace ientropy
