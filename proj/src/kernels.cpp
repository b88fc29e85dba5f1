#include "pfdr/kernels.hpp"

#include <immintrin.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

#include "pfdr/philox.hpp"

namespace pfdr::kernels {

// ------------------------------------------------------------- scalar

namespace scalar_ref {

void uniform_batch(std::uint64_t seed, std::uint32_t rep, std::uint64_t unit_base,
                   std::uint32_t draw, std::size_t n, double* out) {
    auto k0 = static_cast<std::uint32_t>(seed);
    auto k1 = static_cast<std::uint32_t>(seed >> 32);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t unit = unit_base + i;
        PhiloxBlock b = philox4x32_10({rep, static_cast<std::uint32_t>(unit),
                                       static_cast<std::uint32_t>(unit >> 32), draw},
                                      k0, k1);
        std::uint64_t bits = (static_cast<std::uint64_t>(b.x1) << 32) | b.x0;
        out[i] = u64_to_unit_double(bits);
    }
}

void affine_batch(const double* x, std::size_t n, double scale, double shift,
                  double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(x[i], scale, shift);
}

EventStats count_and_max(const double* x, std::size_t n, double threshold) {
    EventStats s;
    s.max_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] >= threshold) ++s.count;
        if (x[i] > s.max_value) s.max_value = x[i];
    }
    return s;
}

}  // namespace scalar_ref

// --------------------------------------------------------------- avx2

namespace avx2 {

// 8 independent philox4x32 streams, one per 32-bit lane (SoA layout).
// _mm256_mul_epu32 multiplies the even lanes of each 64-bit element, so a
// full 8-lane 32x32->64 multiply takes an even and an odd (shifted) pass.

__attribute__((target("avx2"))) inline void mul_full(__m256i a, std::uint32_t m,
                                                     __m256i& hi, __m256i& lo) {
    const __m256i mult = _mm256_set1_epi32(static_cast<int>(m));
    __m256i even = _mm256_mul_epu32(a, mult);                       // lanes 0,2,4,6
    __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), mult); // lanes 1,3,5,7
    // interleave back: even lanes carry (hi:lo) of even sources, etc.
    __m256i lo_even = _mm256_and_si256(even, _mm256_set1_epi64x(0xFFFFFFFFll));
    __m256i lo_odd = _mm256_slli_epi64(_mm256_and_si256(odd, _mm256_set1_epi64x(0xFFFFFFFFll)), 32);
    lo = _mm256_or_si256(lo_even, lo_odd);
    __m256i hi_even = _mm256_srli_epi64(even, 32);
    __m256i hi_odd = _mm256_andnot_si256(_mm256_set1_epi64x(0xFFFFFFFFll), odd);
    hi = _mm256_or_si256(hi_even, hi_odd);
}

__attribute__((target("avx2"))) void uniform_batch(std::uint64_t seed, std::uint32_t rep,
                                                   std::uint64_t unit_base,
                                                   std::uint32_t draw, std::size_t n,
                                                   double* out) {
    auto k0_init = static_cast<std::uint32_t>(seed);
    auto k1_init = static_cast<std::uint32_t>(seed >> 32);
    const __m256i weyl0 = _mm256_set1_epi32(static_cast<int>(0x9E3779B9u));
    const __m256i weyl1 = _mm256_set1_epi32(static_cast<int>(0xBB67AE85u));

    std::size_t i = 0;
    alignas(32) std::uint32_t lane_lo[8], lane_hi[8];
    for (; i + 8 <= n; i += 8) {
        for (int l = 0; l < 8; ++l) {
            std::uint64_t unit = unit_base + i + l;
            lane_lo[l] = static_cast<std::uint32_t>(unit);
            lane_hi[l] = static_cast<std::uint32_t>(unit >> 32);
        }
        __m256i x0 = _mm256_set1_epi32(static_cast<int>(rep));
        __m256i x1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lane_lo));
        __m256i x2 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lane_hi));
        __m256i x3 = _mm256_set1_epi32(static_cast<int>(draw));
        __m256i k0 = _mm256_set1_epi32(static_cast<int>(k0_init));
        __m256i k1 = _mm256_set1_epi32(static_cast<int>(k1_init));
        for (int round = 0; round < 10; ++round) {
            __m256i hi0, lo0, hi1, lo1;
            mul_full(x0, 0xD2511F53u, hi0, lo0);
            mul_full(x2, 0xCD9E8D57u, hi1, lo1);
            __m256i nx0 = _mm256_xor_si256(_mm256_xor_si256(hi1, x1), k0);
            __m256i nx2 = _mm256_xor_si256(_mm256_xor_si256(hi0, x3), k1);
            x0 = nx0;
            x1 = lo1;
            x2 = nx2;
            x3 = lo0;
            k0 = _mm256_add_epi32(k0, weyl0);
            k1 = _mm256_add_epi32(k1, weyl1);
        }
        // bits = (x1 << 32) | x0 per lane; build both 64-bit halves
        __m256i lo_bits = _mm256_unpacklo_epi32(x0, x1);  // lanes 0,1 | 4,5
        __m256i hi_bits = _mm256_unpackhi_epi32(x0, x1);  // lanes 2,3 | 6,7
        alignas(32) std::uint64_t bits[8];
        _mm256_store_si256(reinterpret_cast<__m256i*>(bits + 0), lo_bits);
        _mm256_store_si256(reinterpret_cast<__m256i*>(bits + 4), hi_bits);
        // store order after unpack: lo_bits = b0 b1 b4 b5, hi_bits = b2 b3 b6 b7
        static constexpr int remap[8] = {0, 1, 4, 5, 2, 3, 6, 7};
        alignas(32) std::uint64_t shifted[8];
        for (int l = 0; l < 8; ++l) shifted[remap[l]] = bits[l] >> 12;
        // exact u64->double for m < 2^52: (m | 2^52 bit pattern) - 2^52
        const __m256i exp_bits = _mm256_set1_epi64x(0x4330000000000000ll);
        const __m256d two52 = _mm256_set1_pd(0x1p52);
        const __m256d half = _mm256_set1_pd(0.5);
        const __m256d scale = _mm256_set1_pd(0x1p-52);
        for (int half_idx = 0; half_idx < 2; ++half_idx) {
            __m256i m = _mm256_load_si256(reinterpret_cast<const __m256i*>(shifted + 4 * half_idx));
            __m256d d = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(m, exp_bits)), two52);
            __m256d u = _mm256_mul_pd(_mm256_add_pd(d, half), scale);
            _mm256_storeu_pd(out + i + 4 * half_idx, u);
        }
    }
    if (i < n) scalar_ref::uniform_batch(seed, rep, unit_base + i, draw, n - i, out + i);
}

__attribute__((target("avx2,fma"))) void affine_batch(const double* x, std::size_t n,
                                                      double scale, double shift,
                                                      double* out) {
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d vb = _mm256_set1_pd(shift);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(v, vs, vb));
    }
    for (; i < n; ++i) out[i] = std::fma(x[i], scale, shift);
}

__attribute__((target("avx2"))) EventStats count_and_max(const double* x, std::size_t n,
                                                         double threshold) {
    EventStats s;
    s.max_value = -std::numeric_limits<double>::infinity();
    const __m256d vt = _mm256_set1_pd(threshold);
    __m256d vmax = _mm256_set1_pd(s.max_value);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d ge = _mm256_cmp_pd(v, vt, _CMP_GE_OQ);
        s.count += static_cast<unsigned>(__builtin_popcount(
            static_cast<unsigned>(_mm256_movemask_pd(ge))));
        vmax = _mm256_max_pd(vmax, v);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vmax);
    for (double lane : lanes)
        if (lane > s.max_value) s.max_value = lane;
    for (; i < n; ++i) {
        if (x[i] >= threshold) ++s.count;
        if (x[i] > s.max_value) s.max_value = x[i];
    }
    return s;
}

}  // namespace avx2

// ------------------------------------------------------------ dispatch

namespace {

Isa detect_isa() {
    if (const char* env = std::getenv("PFDR_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0) return Isa::avx2;
    }
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return Isa::avx2;
    return Isa::scalar;
}

std::atomic<Isa> g_isa{detect_isa()};

}  // namespace

Isa active_isa() { return g_isa.load(std::memory_order_relaxed); }
void force_isa(Isa isa) { g_isa.store(isa, std::memory_order_relaxed); }
std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void uniform_batch(std::uint64_t seed, std::uint32_t rep, std::uint64_t unit_base,
                   std::uint32_t draw, std::size_t n, double* out) {
    if (active_isa() == Isa::avx2)
        avx2::uniform_batch(seed, rep, unit_base, draw, n, out);
    else
        scalar_ref::uniform_batch(seed, rep, unit_base, draw, n, out);
}

void affine_batch(const double* x, std::size_t n, double scale, double shift,
                  double* out) {
    if (active_isa() == Isa::avx2)
        avx2::affine_batch(x, n, scale, shift, out);
    else
        scalar_ref::affine_batch(x, n, scale, shift, out);
}

EventStats count_and_max(const double* x, std::size_t n, double threshold) {
    if (active_isa() == Isa::avx2) return avx2::count_and_max(x, n, threshold);
    return scalar_ref::count_and_max(x, n, threshold);
}

}  // namespace pfdr::kernels
