#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "pfdr/kernels.hpp"
#include "pfdr/philox.hpp"

using namespace pfdr;

TEST_CASE("philox4x32-10 reproduces the published test vectors") {
    // known-answer vectors from the Random123 reference distribution
    PhiloxBlock z = philox4x32_10({0, 0, 0, 0}, 0, 0);
    CHECK(z.x0 == 0x6627e8d5u);
    CHECK(z.x1 == 0xe169c58du);
    CHECK(z.x2 == 0xbc57ac4cu);
    CHECK(z.x3 == 0x9b00dbd8u);

    PhiloxBlock f = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                  0xffffffffu, 0xffffffffu);
    CHECK(f.x0 == 0x408f276du);
    CHECK(f.x1 == 0x41c83b0eu);
    CHECK(f.x2 == 0xa20bc7c6u);
    CHECK(f.x3 == 0x6d5451fdu);

    PhiloxBlock pi = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                   0xa4093822u, 0x299f31d0u);
    CHECK(pi.x0 == 0xd16cfe09u);
    CHECK(pi.x1 == 0x94fdccebu);
    CHECK(pi.x2 == 0x5001e420u);
    CHECK(pi.x3 == 0x24126ea1u);
}

TEST_CASE("canonical uniforms lie strictly inside (0,1)") {
    CHECK(u64_to_unit_double(0) > 0.0);
    CHECK(u64_to_unit_double(~0ull) < 1.0);
    UnitStream s(123, 0, 0);
    for (int i = 0; i < 1000; ++i) {
        double u = s.next_uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

namespace {

struct IsaGuard {
    kernels::Isa saved = kernels::active_isa();
    ~IsaGuard() { kernels::force_isa(saved); }
};

}  // namespace

TEST_CASE("scalar and avx2 kernel variants are bit-identical") {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) {
        MESSAGE("avx2 unavailable on this host; dispatch stays scalar");
        return;
    }
    IsaGuard guard;
    std::mt19937_64 rng(7);

    SUBCASE("uniform_batch (including a unit range straddling 2^32)") {
        for (std::uint64_t base : {0ull, 17ull, (1ull << 32) - 5}) {
            for (std::size_t n : {1u, 7u, 8u, 65u, 1000u}) {
                std::vector<double> a(n), b(n);
                kernels::force_isa(kernels::Isa::avx2);
                kernels::uniform_batch(0xDEADBEEFCAFEull, 3, base, 1, n, a.data());
                kernels::scalar_ref::uniform_batch(0xDEADBEEFCAFEull, 3, base, 1, n,
                                                   b.data());
                CHECK(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);
            }
        }
    }

    SUBCASE("affine_batch and count_and_max") {
        for (std::size_t n : {0u, 1u, 5u, 64u, 1003u}) {
            std::vector<double> x(n), a(n), b(n);
            for (auto& v : x) v = std::uniform_real_distribution<double>(-4, 4)(rng);
            kernels::force_isa(kernels::Isa::avx2);
            kernels::affine_batch(x.data(), n, 1.7, -0.3, a.data());
            kernels::scalar_ref::affine_batch(x.data(), n, 1.7, -0.3, b.data());
            if (n)
                CHECK(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);
            kernels::EventStats sa = kernels::count_and_max(x.data(), n, 0.25);
            kernels::EventStats sb = kernels::scalar_ref::count_and_max(x.data(), n, 0.25);
            CHECK(sa.count == sb.count);
            CHECK(std::memcmp(&sa.max_value, &sb.max_value, sizeof(double)) == 0);
        }
    }
}

TEST_CASE("uniform_batch agrees with UnitStream draw indexing") {
    // draw 0 of unit u must equal the batch kernel's output for that unit
    const std::uint64_t seed = 99;
    std::vector<double> out(33);
    kernels::uniform_batch(seed, 5, 100, 0, out.size(), out.data());
    for (std::size_t i = 0; i < out.size(); ++i) {
        UnitStream s(seed, 5, 100 + i, 0);
        CHECK(out[i] == s.next_uniform());
    }
}
