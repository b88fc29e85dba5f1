#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace pfdr {

// A probability carried as its natural log.  Tail probabilities in this
// library routinely reach magnitudes like e^{-1000}, far below the smallest
// normal double, so everything downstream of the special functions works on
// log values and converts to linear space only for display.
struct LogProb {
    // ln p; -inf encodes p = 0.
    double log_value = -std::numeric_limits<double>::infinity();

    static LogProb from_log(double lv) { return LogProb{lv}; }
    static LogProb from_linear(double p) { return LogProb{std::log(p)}; }
    static LogProb zero() { return LogProb{}; }
    static LogProb one() { return LogProb{0.0}; }

    double linear() const { return std::exp(log_value); }
    bool is_zero() const { return std::isinf(log_value) && log_value < 0; }
};

// log(e^x + e^y) without overflow; exact when one side is -inf.
inline double log_sum_exp(double x, double y) {
    if (std::isinf(x) && x < 0) return y;
    if (std::isinf(y) && y < 0) return x;
    double m = std::max(x, y);
    return m + std::log(std::exp(x - m) + std::exp(y - m));
}

inline LogProb log_add(LogProb a, LogProb b) {
    return LogProb::from_log(log_sum_exp(a.log_value, b.log_value));
}

// log(1 - e^x) for x <= 0.  Split at ln(1/2) to stay accurate on both ends.
inline double log1m_exp(double x) {
    if (x >= 0.0) return -std::numeric_limits<double>::infinity();
    if (x > -0.6931471805599453) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

}  // namespace pfdr
