#include <doctest.h>

#include <cmath>

#include "wavelab/numerics.hpp"
#include "wavelab/rng.hpp"

using namespace wavelab;

namespace {
ComplexVec random_complex(SeededRng& rng, std::size_t n) {
    ComplexVec v(n);
    for (auto& x : v) x = {rng.normal(), rng.normal()};
    return v;
}
}  // namespace

TEST_CASE("qpsk gray map corners") {
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(qam_modulate({0, 0}, 4)[0] == cplx(s, s));
    CHECK(qam_modulate({0, 1}, 4)[0] == cplx(s, -s));
    CHECK(qam_modulate({1, 0}, 4)[0] == cplx(-s, s));
    CHECK(qam_modulate({1, 1}, 4)[0] == cplx(-s, -s));
}

TEST_CASE("16qam levels and energy by enumeration") {
    const BitStream bits = {0, 0, 1, 1, 0, 1, 1, 0};
    const ComplexVec syms = qam_modulate(bits, 16);
    REQUIRE(syms.size() == 2);
    const double lo = 1.0 / std::sqrt(10.0), hi = 3.0 / std::sqrt(10.0);
    for (const auto& s : syms) {
        const double re = std::abs(s.real()), im = std::abs(s.imag());
        CHECK((std::abs(re - lo) < 1e-12 || std::abs(re - hi) < 1e-12));
        CHECK((std::abs(im - lo) < 1e-12 || std::abs(im - hi) < 1e-12));
    }
    // brute-force average over the full table
    for (const int order : {4, 16, 64}) {
        double e = 0.0;
        const ComplexVec pts = qam_constellation(order);
        for (const auto& p : pts) e += std::norm(p);
        CHECK(std::abs(e / static_cast<double>(order) - 1.0) < 1e-12);
    }
}

TEST_CASE("gray property: axis neighbours differ in one bit") {
    for (const int order : {4, 16, 64}) {
        const int k = qam_bits_per_symbol(order);
        const ComplexVec pts = qam_constellation(order);
        const int n = order;
        // exhaustive pairwise scan for nearest in-phase / quadrature neighbours
        double min_dist = 1e300;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                min_dist = std::min(min_dist, std::abs(pts[a] - pts[b]));
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                if (std::abs(pts[a] - pts[b]) > min_dist * 1.0001) continue;
                int diff = 0;
                for (int j = 0; j < k; ++j) {
                    const int ba = (a >> (k - 1 - j)) & 1;
                    const int bb = (b >> (k - 1 - j)) & 1;
                    diff += ba != bb;
                }
                CHECK(diff == 1);
            }
        }
    }
}

TEST_CASE("modulate energy is unit on random streams") {
    for (const int order : {4, 16, 64}) {
        SeededRng rng(42);
        const int k = qam_bits_per_symbol(order);
        const ComplexVec syms = qam_modulate(rng.bits(100000 * static_cast<std::size_t>(k)), order);
        CHECK(std::abs(mean_power(syms) - 1.0) < 1e-2);
    }
}

TEST_CASE("hard demod inverts modulate, with margin") {
    CHECK(qam_hard_demod({cplx(0.9, 1.1) / std::sqrt(2.0)}, 4) == BitStream{0, 0});
    for (const int order : {4, 16, 64}) {
        SeededRng rng(7);
        const int k = qam_bits_per_symbol(order);
        const BitStream bits = rng.bits(1000 * static_cast<std::size_t>(k));
        CHECK(qam_hard_demod(qam_modulate(bits, order), order) == bits);
    }
    // small perturbations do not flip QPSK decisions
    SeededRng rng(3);
    const BitStream bits = rng.bits(20000);
    ComplexVec syms = qam_modulate(bits, 4);
    for (auto& s : syms) {
        s += cplx(0.09 * (rng.uniform01() - 0.5), 0.09 * (rng.uniform01() - 0.5));
    }
    CHECK(qam_hard_demod(syms, 4) == bits);
}

TEST_CASE("modulate input validation") {
    CHECK_THROWS_AS(qam_modulate({0, 1, 0}, 4), InvalidInput);
    CHECK_THROWS_AS(qam_modulate({0, 1}, 8), ConfigError);
}

TEST_CASE("pack/unpack definitions and round trips") {
    CHECK(pack_complex_to_real({{1, 2}, {3, 4}}) == RealVec{1, 3, 2, 4});
    CHECK(pack_complex_to_real({{0, 0}, {0, 0}}) == RealVec{0, 0, 0, 0});
    CHECK(unpack_real_to_complex({1, 3, 2, 4}) == ComplexVec{{1, 2}, {3, 4}});
    CHECK(unpack_real_to_complex({5, 0}) == ComplexVec{{5, 0}});
    CHECK_THROWS_AS(unpack_real_to_complex({1, 2, 3}), InvalidInput);

    SeededRng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % 64);
        const ComplexVec v = random_complex(rng, n);
        CHECK(unpack_real_to_complex(pack_complex_to_real(v)) == v);  // bit identical
        const RealVec r = pack_complex_to_real(v);
        CHECK(pack_complex_to_real(unpack_real_to_complex(r)) == r);
    }
}

TEST_CASE("hard slice idempotence") {
    SeededRng rng(5);
    const ComplexVec x = random_complex(rng, 500);
    const ComplexVec once = hard_slice(x, 16);
    CHECK(hard_slice(once, 16) == once);
}

TEST_CASE("seeded rng reproducibility and derivation") {
    SeededRng a(123), b(123);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(SeededRng::derive(1, 0) != SeededRng::derive(1, 1));
    CHECK(SeededRng::derive(1, 0) != SeededRng::derive(2, 0));
    // normal moments
    SeededRng c(77);
    double m1 = 0, m2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = c.normal();
        m1 += x;
        m2 += x * x;
    }
    CHECK(std::abs(m1 / n) < 0.01);
    CHECK(std::abs(m2 / n - 1.0) < 0.02);
}
