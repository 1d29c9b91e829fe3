#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ientropy/error.hpp"

namespace ientropy {

// Calendar timestamp at minute or second resolution. Member order gives
// chronological ordering through the defaulted comparison.
struct Timestamp {
    std::int16_t year = 0;
    std::uint8_t month = 1;
    std::uint8_t day = 1;
    std::uint8_t hour = 0;
    std::uint8_t minute = 0;
    std::uint8_t second = 0;

    auto operator<=>(const Timestamp&) const = default;

    // Accepts "YYYY-MM-DDTHH:MM" and "YYYY-MM-DDTHH:MM:SS".
    static std::optional<Timestamp> parse(std::string_view text);

    // ISO 8601; the seconds field is emitted only when nonzero.
    std::string to_string() const;
};

// One executed transaction.
struct Trade {
    Timestamp timestamp;
    std::string symbol;          // non-empty, uppercase alphanumeric
    std::int64_t quantity = 0;   // shares, >= 1
    double price = 0.0;          // > 0

    bool operator==(const Trade&) const = default;
};

// All trades of one symbol for one session, in execution order.
// Trade ordinals are 1-based: ordinal i is trades[i - 1].
struct TradingDayStream {
    std::string symbol;
    std::vector<Trade> trades;

    std::size_t size() const noexcept { return trades.size(); }

    const Trade& at_ordinal(std::int64_t ordinal) const {
        return trades.at(static_cast<std::size_t>(ordinal - 1));
    }
};

namespace detail {

inline bool parse_fixed_uint(std::string_view text, std::size_t offset,
                             std::size_t digits, unsigned& out) {
    if (offset + digits > text.size()) return false;
    unsigned value = 0;
    for (std::size_t i = 0; i < digits; ++i) {
        const char c = text[offset + i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + static_cast<unsigned>(c - '0');
    }
    out = value;
    return true;
}

} // namespace detail

inline std::optional<Timestamp> Timestamp::parse(std::string_view text) {
    if (text.size() != 16 && text.size() != 19) return std::nullopt;
    if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':') return std::nullopt;
    unsigned year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!detail::parse_fixed_uint(text, 0, 4, year)) return std::nullopt;
    if (!detail::parse_fixed_uint(text, 5, 2, month)) return std::nullopt;
    if (!detail::parse_fixed_uint(text, 8, 2, day)) return std::nullopt;
    if (!detail::parse_fixed_uint(text, 11, 2, hour)) return std::nullopt;
    if (!detail::parse_fixed_uint(text, 14, 2, minute)) return std::nullopt;
    if (text.size() == 19) {
        if (text[16] != ':') return std::nullopt;
        if (!detail::parse_fixed_uint(text, 17, 2, second)) return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
    Timestamp ts;
    ts.year = static_cast<std::int16_t>(year);
    ts.month = static_cast<std::uint8_t>(month);
    ts.day = static_cast<std::uint8_t>(day);
    ts.hour = static_cast<std::uint8_t>(hour);
    ts.minute = static_cast<std::uint8_t>(minute);
    ts.second = static_cast<std::uint8_t>(second);
    return ts;
}

inline std::string Timestamp::to_string() const {
    char buffer[24];
    int written = 0;
    if (second != 0) {
        written = std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02uT%02u:%02u:%02u",
                                static_cast<int>(year), static_cast<unsigned>(month),
                                static_cast<unsigned>(day), static_cast<unsigned>(hour),
                                static_cast<unsigned>(minute), static_cast<unsigned>(second));
    } else {
        written = std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02uT%02u:%02u",
                                static_cast<int>(year), static_cast<unsigned>(month),
                                static_cast<unsigned>(day), static_cast<unsigned>(hour),
                                static_cast<unsigned>(minute));
    }
    return std::string(buffer, static_cast<std::size_t>(written));
}

// Splits a mixed-symbol sequence into per-symbol streams. Relative order
// within each symbol is preserved exactly as received; a timestamp that
// moves backwards inside a symbol is rejected.
inline std::map<std::string, TradingDayStream> partition_by_symbol(std::span<const Trade> trades) {
    std::map<std::string, TradingDayStream> streams;
    for (const Trade& trade : trades) {
        auto [it, inserted] = streams.try_emplace(trade.symbol);
        TradingDayStream& stream = it->second;
        if (inserted) stream.symbol = trade.symbol;
        if (!stream.trades.empty() && trade.timestamp < stream.trades.back().timestamp) {
            throw ValidationError("timestamp regression at ordinal "
                                  + std::to_string(stream.trades.size() + 1)
                                  + " for symbol " + trade.symbol);
        }
        stream.trades.push_back(trade);
    }
    return streams;
}

} // namespace ientropy
