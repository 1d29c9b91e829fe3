#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ientropy/error.hpp"
#include "ientropy/numeric.hpp"
#include "ientropy/trade.hpp"
#include "ientropy/vwap.hpp"

namespace ientropy {

// How the reference price for an incoming trade is chosen.
enum class ReferenceMode {
    OpenPrice,        // the session's first traded price
    PrecedingTrade,   // the immediately preceding trade's price
    MovingVwap,       // vwap over all trades before the incoming one
};

// Signed entropy over weighted trade quantities:
//
//     H = -sum_i w_i * (q_i / Q) * ln(q_i / Q),   Q = sum_i q_i
//
// maintained in O(1) per trade through the identity
//
//     H = -(A - B * ln Q) / Q,   A = sum_i w_i q_i ln q_i,   B = sum_i w_i q_i.
//
// Every fraction q_i/Q changes whenever Q grows, but A and B depend only on
// the individual trades, so they can be accumulated once and never revised.
// Both running sums are compensated; state is a handful of scalars, so a
// stream of any length runs in constant memory.
class WeightedEntropySum {
public:
    void add(double weight, std::int64_t quantity) noexcept {
        const double q = static_cast<double>(quantity);
        weighted_qlq_sum_.add(weight * q * std::log(q));
        weighted_q_sum_.add(weight * q);
        total_quantity_ += quantity;
        ++trade_count_;
    }

    // 0 before any trade; otherwise the closed form above. The trailing
    // + 0.0 folds the -0.0 a single zero-weight trade produces into +0.0.
    double value() const noexcept {
        if (trade_count_ == 0) return 0.0;
        const double total = static_cast<double>(total_quantity_);
        return -(weighted_qlq_sum_.value() - weighted_q_sum_.value() * std::log(total)) / total
               + 0.0;
    }

    std::int64_t trade_count() const noexcept { return trade_count_; }
    std::int64_t total_quantity() const noexcept { return total_quantity_; }

private:
    CompensatedSum weighted_qlq_sum_;
    CompensatedSum weighted_q_sum_;
    std::int64_t total_quantity_ = 0;
    std::int64_t trade_count_ = 0;
};

// Mode-aware entropy accumulator. Each trade's weight (price/reference - 1)
// is frozen against the reference available at ingestion time and never
// recomputed, even though later trades keep shifting the quantity fractions.
class EntropyAccumulator {
public:
    explicit EntropyAccumulator(ReferenceMode mode) noexcept : mode_(mode) {}

    // Reference price the next incoming trade will be weighted against.
    // Empty until the first trade has been absorbed: no mode has a reference
    // before any data, which is why the first trade always gets weight zero.
    std::optional<double> reference_price() const noexcept {
        if (sum_.trade_count() == 0) return std::nullopt;
        switch (mode_) {
            case ReferenceMode::OpenPrice: return open_price_;
            case ReferenceMode::PrecedingTrade: return last_price_;
            case ReferenceMode::MovingVwap: return prior_vwap_.vwap();
        }
        return std::nullopt;
    }

    void add(double price, std::int64_t quantity) noexcept {
        double weight = 0.0;
        if (const auto reference = reference_price()) weight = price / *reference - 1.0;
        sum_.add(weight, quantity);
        if (sum_.trade_count() == 1) open_price_ = price;
        last_price_ = price;
        prior_vwap_.add(price, quantity);  // becomes the lagged reference for the next trade
    }

    void add(const Trade& trade) noexcept { add(trade.price, trade.quantity); }

    double value() const noexcept { return sum_.value(); }
    ReferenceMode mode() const noexcept { return mode_; }
    std::int64_t trade_count() const noexcept { return sum_.trade_count(); }
    std::int64_t total_quantity() const noexcept { return sum_.total_quantity(); }

private:
    ReferenceMode mode_;
    WeightedEntropySum sum_;
    VwapState prior_vwap_;
    double open_price_ = 0.0;
    double last_price_ = 0.0;
};

// Direct re-summation of the definition over a full prefix, with weights
// frozen per trade exactly as the incremental path freezes them. O(n) per
// call and deliberately independent of the accumulator classes; exists for
// differential testing.
inline double entropy_naive(std::span<const Trade> trades, ReferenceMode mode) {
    const std::size_t n = trades.size();
    if (n == 0) return 0.0;

    std::vector<double> weights(n, 0.0);
    const double open_price = trades[0].price;
    double priced_quantity_sum = 0.0;
    double quantity_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            double reference = 0.0;
            switch (mode) {
                case ReferenceMode::OpenPrice: reference = open_price; break;
                case ReferenceMode::PrecedingTrade: reference = trades[i - 1].price; break;
                case ReferenceMode::MovingVwap: reference = priced_quantity_sum / quantity_sum; break;
            }
            weights[i] = trades[i].price / reference - 1.0;
        }
        priced_quantity_sum += trades[i].price * static_cast<double>(trades[i].quantity);
        quantity_sum += static_cast<double>(trades[i].quantity);
    }

    double entropy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fraction = static_cast<double>(trades[i].quantity) / quantity_sum;
        entropy -= weights[i] * fraction * std::log(fraction);
    }
    return entropy;
}

// Classic unsigned entropy of a discrete distribution, in units of the given
// logarithm base. Terms with probability zero contribute nothing.
inline double shannon_entropy(std::span<const double> probabilities, double base) {
    if (!(base > 0.0) || base == 1.0) {
        throw ValidationError("entropy base must be positive and not 1");
    }
    double total = 0.0;
    for (const double p : probabilities) {
        if (p < 0.0) {
            throw ValidationError("negative probability " + to_decimal_string(p));
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("probabilities sum to " + to_decimal_string(total) + ", expected 1");
    }
    double entropy = 0.0;
    for (const double p : probabilities) {
        if (p > 0.0) entropy -= p * std::log(p);
    }
    return entropy / std::log(base);
}

} // namespace ientropy
