#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace pfdr::kernels {

// Batch kernels for the simulator's inner loops.  Each kernel has a scalar
// reference implementation and an AVX2 variant selected at runtime; the two
// are bit-identical by construction (integer ops, exact IEEE add/mul/fma and
// compares only), which the kernel tests assert outright.

// out[i] = canonical uniform of philox block
//   key=(seed), counter=(rep, unit_base+i, draw) for i in [0, n)
void uniform_batch(std::uint64_t seed, std::uint32_t rep, std::uint64_t unit_base,
                   std::uint32_t draw, std::size_t n, double* out);

// out[i] = fma(x[i], scale, shift)
void affine_batch(const double* x, std::size_t n, double scale, double shift,
                  double* out);

struct EventStats {
    std::uint64_t count = 0;       // #{ x[i] >= threshold }
    double max_value;              // max x[i]; -inf when n == 0
};

EventStats count_and_max(const double* x, std::size_t n, double threshold);

// ------------------------------------------------------------ dispatch
enum class Isa { scalar, avx2 };

Isa active_isa();                 // what the dispatcher picked
void force_isa(Isa isa);          // tests / PFDR_SIMD=scalar override
std::string_view isa_name(Isa isa);

namespace scalar_ref {
void uniform_batch(std::uint64_t seed, std::uint32_t rep, std::uint64_t unit_base,
                   std::uint32_t draw, std::size_t n, double* out);
void affine_batch(const double* x, std::size_t n, double scale, double shift,
                  double* out);
EventStats count_and_max(const double* x, std::size_t n, double threshold);
}  // namespace scalar_ref

}  // namespace pfdr::kernels
