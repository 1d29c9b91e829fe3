#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace ientropy {

// Neumaier's variant of Kahan summation. The compensation term also absorbs
// the case where the incoming value is larger than the running sum, so the
// accumulator stays accurate for long alternating-sign streams.
class CompensatedSum {
public:
    void add(double value) noexcept {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + compensation_; }

    void reset() noexcept { sum_ = 0.0; compensation_ = 0.0; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

// Shortest decimal string that round-trips back to the same double.
inline std::string to_decimal_string(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

} // namespace ientropy
