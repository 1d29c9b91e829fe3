#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ientropy/error.hpp"
#include "ientropy/numeric.hpp"

#include <nlohmann/json.hpp>

namespace ientropy {

struct Rgb {
    std::uint8_t red = 0;
    std::uint8_t green = 0;
    std::uint8_t blue = 0;

    bool operator==(const Rgb&) const = default;

    std::string to_hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string hex = "#......";
        hex[1] = digits[red >> 4];
        hex[2] = digits[red & 0xf];
        hex[3] = digits[green >> 4];
        hex[4] = digits[green & 0xf];
        hex[5] = digits[blue >> 4];
        hex[6] = digits[blue & 0xf];
        return hex;
    }
};

// Diverging ramp centred on black: positive entropy shades green, negative
// shades red. Saturation grows linearly from the edge of the epsilon dead
// band and clamps at saturation_scale beyond it; channel values round half
// away from zero.
inline Rgb entropy_color(double entropy, double epsilon, double saturation_scale) {
    if (epsilon < 0.0) throw ValidationError("epsilon must be >= 0");
    if (!(saturation_scale > 0.0)) throw ValidationError("saturation scale must be > 0");
    const auto ramp = [&](double magnitude) {
        const double level = std::min(1.0, (magnitude - epsilon) / saturation_scale);
        return static_cast<std::uint8_t>(std::floor(255.0 * level + 0.5));
    };
    if (entropy > epsilon) return {0, ramp(entropy), 0};
    if (entropy < -epsilon) return {ramp(-entropy), 0, 0};
    return {0, 0, 0};
}

// One laid-out tile. Weight fractions are of the total weight; coordinates
// are in canvas units with the origin at the top left.
struct TreemapNode {
    std::string symbol;
    double weight_fraction = 0.0;
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;
    double entropy = 0.0;
    Rgb color;

    bool operator==(const TreemapNode&) const = default;
};

namespace detail {

// Worst aspect ratio a row would have when laid against a side of the given
// length. Only the extreme areas matter.
inline double worst_aspect(double row_sum, double min_area, double max_area, double side) {
    const double s2 = row_sum * row_sum;
    const double w2 = side * side;
    return std::max(w2 * max_area / s2, s2 / (w2 * min_area));
}

} // namespace detail

// Squarified layout: items are placed in rows against the shorter side of
// the remaining rectangle, each row grown greedily while the worst aspect
// ratio keeps improving. Input order does not matter; items are laid out in
// descending weight order with ties broken by symbol.
inline std::vector<TreemapNode> layout_treemap(std::vector<std::pair<std::string, double>> weights,
                                               double canvas_width, double canvas_height) {
    if (weights.empty()) throw ValidationError("treemap requires at least one symbol");
    if (!(canvas_width > 0.0) || !(canvas_height > 0.0)) {
        throw ValidationError("canvas dimensions must be positive");
    }

    std::sort(weights.begin(), weights.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i].second > 0.0)) {
            throw ValidationError("non-positive weight for symbol " + weights[i].first);
        }
        if (i > 0 && weights[i].first == weights[i - 1].first) {
            throw ValidationError("duplicate symbol " + weights[i].first);
        }
        total += weights[i].second;
    }

    std::vector<double> areas(weights.size());
    const double canvas_area = canvas_width * canvas_height;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        areas[i] = weights[i].second / total * canvas_area;
    }

    std::vector<TreemapNode> nodes;
    nodes.reserve(weights.size());
    double x = 0.0, y = 0.0, w = canvas_width, h = canvas_height;

    std::size_t i = 0;
    while (i < weights.size()) {
        const double side = std::min(w, h);
        std::size_t row_end = i + 1;
        double row_sum = areas[i];
        double row_min = areas[i];
        double row_max = areas[i];
        double worst = detail::worst_aspect(row_sum, row_min, row_max, side);
        while (row_end < weights.size()) {
            const double next = areas[row_end];
            const double new_worst = detail::worst_aspect(row_sum + next,
                                                          std::min(row_min, next),
                                                          std::max(row_max, next), side);
            if (new_worst > worst) break;
            row_sum += next;
            row_min = std::min(row_min, next);
            row_max = std::max(row_max, next);
            worst = new_worst;
            ++row_end;
        }

        const double thickness = row_sum / side;
        double offset = 0.0;
        for (std::size_t k = i; k < row_end; ++k) {
            const double length = areas[k] / thickness;
            TreemapNode node;
            node.symbol = weights[k].first;
            node.weight_fraction = weights[k].second / total;
            if (w >= h) {
                node.x = x;
                node.y = y + offset;
                node.width = thickness;
                node.height = length;
            } else {
                node.x = x + offset;
                node.y = y;
                node.width = length;
                node.height = thickness;
            }
            nodes.push_back(std::move(node));
            offset += length;
        }
        if (w >= h) {
            x += thickness;
            w = std::max(0.0, w - thickness);
        } else {
            y += thickness;
            h = std::max(0.0, h - thickness);
        }
        i = row_end;
    }
    return nodes;
}

// Weight and end-of-day entropy for one mapped symbol.
struct MapInput {
    std::string symbol;
    double weight = 0.0;
    double entropy = 0.0;
};

// 95th percentile (nearest rank) of |entropy| across the inputs; falls back
// to 1 when every reading is zero so the ramp stays defined.
inline double default_saturation_scale(std::span<const MapInput> inputs) {
    std::vector<double> magnitudes;
    magnitudes.reserve(inputs.size());
    for (const MapInput& input : inputs) magnitudes.push_back(std::abs(input.entropy));
    std::sort(magnitudes.begin(), magnitudes.end());
    if (magnitudes.empty()) return 1.0;
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(magnitudes.size())));
    const double scale = magnitudes[std::max<std::size_t>(rank, 1) - 1];
    return scale > 0.0 ? scale : 1.0;
}

// Full map construction: layout by weight, then colour each tile by its
// entropy reading.
inline std::vector<TreemapNode> build_market_map(std::span<const MapInput> inputs,
                                                 double canvas_width, double canvas_height,
                                                 double epsilon,
                                                 std::optional<double> saturation_scale = {}) {
    std::vector<std::pair<std::string, double>> weights;
    std::map<std::string, double> entropies;
    weights.reserve(inputs.size());
    for (const MapInput& input : inputs) {
        weights.emplace_back(input.symbol, input.weight);
        entropies[input.symbol] = input.entropy;
    }
    auto nodes = layout_treemap(std::move(weights), canvas_width, canvas_height);
    const double scale = saturation_scale ? *saturation_scale : default_saturation_scale(inputs);
    for (TreemapNode& node : nodes) {
        node.entropy = entropies.at(node.symbol);
        node.color = entropy_color(node.entropy, epsilon, scale);
    }
    return nodes;
}

inline std::string emit_map_svg(std::span<const TreemapNode> nodes,
                                double canvas_width, double canvas_height) {
    if (nodes.empty()) throw ValidationError("cannot render an empty map");
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << to_decimal_string(canvas_width)
        << "\" height=\"" << to_decimal_string(canvas_height) << "\" viewBox=\"0 0 "
        << to_decimal_string(canvas_width) << ' ' << to_decimal_string(canvas_height) << "\">\n";
    for (const TreemapNode& node : nodes) {
        out << "  <rect x=\"" << to_decimal_string(node.x) << "\" y=\"" << to_decimal_string(node.y)
            << "\" width=\"" << to_decimal_string(node.width) << "\" height=\""
            << to_decimal_string(node.height) << "\" fill=\"" << node.color.to_hex()
            << "\" stroke=\"#ffffff\" stroke-width=\"1\"/>\n";
    }
    for (const TreemapNode& node : nodes) {
        const double font_size = std::max(8.0, std::min({node.width, node.height}) * 0.22);
        out << "  <text x=\"" << to_decimal_string(node.x + node.width / 2.0) << "\" y=\""
            << to_decimal_string(node.y + node.height / 2.0)
            << "\" text-anchor=\"middle\" dominant-baseline=\"central\" font-family=\"sans-serif\""
            << " font-size=\"" << to_decimal_string(font_size) << "\" fill=\"#ffffff\">"
            << node.symbol << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

inline std::string emit_map_json(std::span<const TreemapNode> nodes) {
    if (nodes.empty()) throw ValidationError("cannot render an empty map");
    nlohmann::json tiles = nlohmann::json::array();
    for (const TreemapNode& node : nodes) {
        tiles.push_back({
            {"symbol", node.symbol},
            {"x", node.x},
            {"y", node.y},
            {"w", node.width},
            {"h", node.height},
            {"weight_fraction", node.weight_fraction},
            {"entropy", node.entropy},
            {"color", {node.color.red, node.color.green, node.color.blue}},
        });
    }
    return tiles.dump(2) + "\n";
}

inline std::vector<TreemapNode> parse_map_json(const std::string& text) {
    const nlohmann::json tiles = nlohmann::json::parse(text);
    std::vector<TreemapNode> nodes;
    nodes.reserve(tiles.size());
    for (const nlohmann::json& tile : tiles) {
        TreemapNode node;
        node.symbol = tile.at("symbol").get<std::string>();
        node.x = tile.at("x").get<double>();
        node.y = tile.at("y").get<double>();
        node.width = tile.at("w").get<double>();
        node.height = tile.at("h").get<double>();
        node.weight_fraction = tile.at("weight_fraction").get<double>();
        node.entropy = tile.at("entropy").get<double>();
        const auto& color = tile.at("color");
        node.color = {color.at(0).get<std::uint8_t>(), color.at(1).get<std::uint8_t>(),
                      color.at(2).get<std::uint8_t>()};
        nodes.push_back(std::move(node));
    }
    return nodes;
}

// Sidecar file assigning each symbol a capitalisation weight. Header is
// fixed; every cap must be strictly positive.
inline std::map<std::string, double> parse_market_caps(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line != "symbol,market_cap") {
        throw ParseError("unexpected header \"" + line + "\", expected \"symbol,market_cap\"");
    }
    std::map<std::string, double> caps;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError("expected 2 fields (line " + std::to_string(line_number) + ")");
        }
        const std::string symbol = line.substr(0, comma);
        const std::string cap_text = line.substr(comma + 1);
        double cap = 0.0;
        const auto result = std::from_chars(cap_text.data(), cap_text.data() + cap_text.size(), cap);
        if (result.ec != std::errc() || result.ptr != cap_text.data() + cap_text.size()) {
            throw ParseError("invalid market cap \"" + cap_text + "\" (line "
                             + std::to_string(line_number) + ")");
        }
        if (!(cap > 0.0)) {
            throw ValidationError("market cap must be > 0 (line "
                                  + std::to_string(line_number) + ")");
        }
        if (!caps.emplace(symbol, cap).second) {
            throw ValidationError("duplicate symbol " + symbol + " (line "
                                  + std::to_string(line_number) + ")");
        }
    }
    return caps;
}

} // namespace ientropy
