#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pfdr/log_prob.hpp"

namespace pfdr {

enum class Provenance {
    exact,
    asymptotic_thm1,
    asymptotic_cor1,
    asymptotic_normal,
    asymptotic_gamma,
};

std::string provenance_name(Provenance p);

// Counts like N* overflow any integer type in the small-effect regimes
// (think 1/p with p = e^{-1000}); carry the log alongside the exact value
// whenever the latter is representable.
struct ExtendedCount {
    std::optional<std::uint64_t> exact;  // set when < 2^63
    double log_value;                    // ln of the count, always set
};

struct ExtendedReal {
    std::optional<double> value;  // set when exp(log_value) is a finite double
    double log_value;
};

struct VolumeResult {
    LogProb p_event;   // p_{k,delta} at the configured level
    ExtendedReal n_star;  // minimum number of nulls (real-valued for asymptotics)
    std::optional<std::uint64_t> n_star_int;  // ceiling integer, exact provenance only
    ExtendedReal v_star;  // minimum data volume, k * n_star
    std::int64_t k;
    Provenance provenance;
};

}  // namespace pfdr
