#pragma once

#include <cstdint>

#include "ientropy/numeric.hpp"

namespace ientropy {

// Running volume weighted average price over the trades fed so far.
class VwapState {
public:
    void add(double price, std::int64_t quantity) noexcept {
        weighted_price_sum_.add(price * static_cast<double>(quantity));
        quantity_sum_ += quantity;
        ++trade_count_;
    }

    // Defined only after at least one trade has been added.
    double vwap() const noexcept {
        return weighted_price_sum_.value() / static_cast<double>(quantity_sum_);
    }

    std::int64_t trade_count() const noexcept { return trade_count_; }
    std::int64_t quantity_sum() const noexcept { return quantity_sum_; }
    double weighted_price_sum() const noexcept { return weighted_price_sum_.value(); }

private:
    CompensatedSum weighted_price_sum_;
    std::int64_t quantity_sum_ = 0;
    std::int64_t trade_count_ = 0;
};

} // namespace ientropy
