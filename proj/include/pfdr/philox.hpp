#pragma once

#include <cstdint>

namespace pfdr {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).  Stateless:
// every 128-bit output block is a pure function of (counter, key), which is
// what makes the simulator's work partitioning reproducible — any unit of
// work can regenerate exactly its own stream regardless of scheduling.
//
// Stream layout used by the simulator (documented contract, recorded in
// every report as "philox4x32-10"):
//   key     = (seed_lo, seed_hi)
//   counter = (rep_index, unit_lo, unit_hi, draw_index)
// Each logical draw consumes one block and keeps the first 64 bits (x1:x0).
// Draw 0 of a unit is its mixture-label uniform; draws 1.. feed sampling.

struct PhiloxBlock {
    std::uint32_t x0, x1, x2, x3;
};

PhiloxBlock philox4x32_10(PhiloxBlock ctr, std::uint32_t k0, std::uint32_t k1);

// Canonical u64 -> (0,1) mapping, shared verbatim by the scalar and SIMD
// paths: u = (double(bits >> 12) + 0.5) * 2^-52.  Strictly inside (0,1),
// so ln(u) is always finite.
inline double u64_to_unit_double(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52;
}

// One unit's private stream: random access by draw index.
class UnitStream {
public:
    UnitStream(std::uint64_t seed, std::uint32_t rep, std::uint64_t unit,
               std::uint32_t first_draw = 0)
        : k0_(static_cast<std::uint32_t>(seed)),
          k1_(static_cast<std::uint32_t>(seed >> 32)),
          rep_(rep),
          unit_lo_(static_cast<std::uint32_t>(unit)),
          unit_hi_(static_cast<std::uint32_t>(unit >> 32)),
          draw_(first_draw) {}

    std::uint64_t next_u64() {
        PhiloxBlock out = philox4x32_10({rep_, unit_lo_, unit_hi_, draw_++}, k0_, k1_);
        return (static_cast<std::uint64_t>(out.x1) << 32) | out.x0;
    }

    double next_uniform() { return u64_to_unit_double(next_u64()); }

    // Box-Muller, cosine branch; consumes exactly two draws.
    double next_normal();

    // Gamma(shape, 1) via Marsaglia-Tsang, boosted below shape 1.
    double next_gamma(double shape);

    std::uint32_t draws_used() const { return draw_; }

private:
    std::uint32_t k0_, k1_, rep_, unit_lo_, unit_hi_, draw_;
};

inline constexpr const char* kRngName = "philox4x32-10";

}  // namespace pfdr
