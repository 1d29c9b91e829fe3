#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ientropy/error.hpp"
#include "ientropy/numeric.hpp"
#include "ientropy/trade.hpp"

namespace ientropy {

inline constexpr std::string_view kTradeCsvHeader = "timestamp,symbol,quantity,price";

namespace detail {

inline void strip_carriage_return(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::string line_tag(std::size_t line_number) {
    return " (line " + std::to_string(line_number) + ")";
}

inline bool is_valid_symbol(std::string_view symbol) {
    if (symbol.empty()) return false;
    for (const char c : symbol) {
        const bool upper = c >= 'A' && c <= 'Z';
        const bool digit = c >= '0' && c <= '9';
        if (!upper && !digit) return false;
    }
    return true;
}

} // namespace detail

// Reads the tick file format: a fixed four-column header followed by one
// trade per line, comma separated, no quoting. Errors carry the 1-based
// line number of the offending row.
inline std::vector<Trade> parse_trades(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: missing header row");
    detail::strip_carriage_return(line);
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line != kTradeCsvHeader) {
        throw ParseError("unexpected header \"" + line + "\", expected \""
                         + std::string(kTradeCsvHeader) + "\"");
    }

    std::vector<Trade> trades;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        detail::strip_carriage_return(line);
        if (line.empty()) continue;

        std::array<std::string_view, 4> fields;
        std::size_t field_count = 0;
        std::size_t start = 0;
        const std::string_view view(line);
        while (true) {
            const std::size_t comma = view.find(',', start);
            const std::string_view field = comma == std::string_view::npos
                ? view.substr(start) : view.substr(start, comma - start);
            if (field_count < fields.size()) fields[field_count] = field;
            ++field_count;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (field_count != 4) {
            throw ParseError("expected 4 fields, got " + std::to_string(field_count)
                             + detail::line_tag(line_number));
        }

        Trade trade;
        const auto timestamp = Timestamp::parse(fields[0]);
        if (!timestamp) {
            throw ParseError("invalid timestamp \"" + std::string(fields[0]) + "\""
                             + detail::line_tag(line_number));
        }
        trade.timestamp = *timestamp;

        if (!detail::is_valid_symbol(fields[1])) {
            throw ParseError("invalid symbol \"" + std::string(fields[1]) + "\""
                             + detail::line_tag(line_number));
        }
        trade.symbol = std::string(fields[1]);

        {
            const std::string_view f = fields[2];
            const auto result = std::from_chars(f.data(), f.data() + f.size(), trade.quantity);
            if (result.ec != std::errc() || result.ptr != f.data() + f.size()) {
                throw ParseError("invalid quantity \"" + std::string(f) + "\""
                                 + detail::line_tag(line_number));
            }
            if (trade.quantity < 1) {
                throw ValidationError("quantity must be ≥ 1" + detail::line_tag(line_number));
            }
        }

        {
            const std::string_view f = fields[3];
            const auto result = std::from_chars(f.data(), f.data() + f.size(), trade.price);
            if (result.ec != std::errc() || result.ptr != f.data() + f.size()) {
                throw ParseError("invalid price \"" + std::string(f) + "\""
                                 + detail::line_tag(line_number));
            }
            if (!(trade.price > 0.0)) {
                throw ValidationError("price must be > 0" + detail::line_tag(line_number));
            }
        }

        trades.push_back(std::move(trade));
    }
    return trades;
}

// Inverse of parse_trades. Prices are written with just enough digits to
// round-trip exactly.
inline void write_trades_csv(std::ostream& out, std::span<const Trade> trades) {
    out << kTradeCsvHeader << '\n';
    for (const Trade& trade : trades) {
        out << trade.timestamp.to_string() << ',' << trade.symbol << ','
            << trade.quantity << ',' << to_decimal_string(trade.price) << '\n';
    }
}

} // namespace ientropy
