#include <doctest.h>

#include <cmath>
#include <limits>

#include "wavelab/channel.hpp"
#include "wavelab/numerics.hpp"

using namespace wavelab;

TEST_CASE("fir identity and hand convolution") {
    const ComplexVec x{{1, 0}, {0, 0}, {0, 0}};
    CHECK(apply_fir(x, TapRealization{{0, {1, 0}}}) == x);
    const ComplexVec y = apply_fir(x, TapRealization{{0, {1, 0}}, {1, {-0.5, 0}}});
    CHECK(y == ComplexVec{{1, 0}, {-0.5, 0}, {0, 0}});
    CHECK_THROWS_AS(apply_fir(x, TapRealization{}), InvalidInput);
}

TEST_CASE("channel spec validation") {
    ChannelSpec s;
    s.taps = {{3, {1, 0}}, {1, {0.5, 0}}};
    CHECK_THROWS_AS(s.validate(), InvalidInput);  // not increasing
    s.taps = {{-1, {1, 0}}};
    CHECK_THROWS_AS(s.validate(), InvalidInput);
    CHECK(ChannelSpec::profile_a().max_delay() == 7);
    CHECK(ChannelSpec::profile_b().max_delay() == 7);
    // total power of both published profiles is unity by construction
    CHECK(std::abs(ChannelSpec::profile_a().total_power() - 1.0) < 1e-3);
    CHECK(std::abs(ChannelSpec::profile_b().total_power() - 1.0) < 1e-3);
}

TEST_CASE("frequency response oracle") {
    CHECK(channel_freq_response(TapRealization{{0, {1, 0}}}, 8) == ComplexVec(8, cplx(1.0, 0.0)));
    const ComplexVec d = channel_freq_response(TapRealization{{0, {1, 0}}, {1, {1, 0}}}, 2);
    CHECK(std::abs(d[0] - cplx(2, 0)) < 1e-12);
    CHECK(std::abs(d[1]) < 1e-12);  // null at the Nyquist bin
    CHECK_THROWS_AS(channel_freq_response(TapRealization{{8, {1, 0}}}, 8), InvalidInput);

    // deep notches of the selective profile
    const ComplexVec db = channel_freq_response(ChannelSpec::profile_b(), 1024);
    double lo = 1e300, hi = 0;
    for (const auto& g : db) {
        lo = std::min(lo, std::abs(g));
        hi = std::max(hi, std::abs(g));
    }
    CHECK(lo / hi < 0.2);
}

TEST_CASE("awgn noise-free passthrough and calibrated variance") {
    SeededRng rng(5);
    ComplexVec x(1000, cplx(1.0, 0.0));
    AwgnSpec inf_spec;
    inf_spec.ebn0_db = std::numeric_limits<double>::infinity();
    CHECK(add_awgn(x, inf_spec, rng) == x);

    AwgnSpec spec;
    spec.ebn0_db = 4.0;
    spec.bits_per_symbol = 2;
    spec.alpha_rate = 0.5;
    spec.signal_power = 1.0;
    const double want = spec.noise_variance();
    ComplexVec z(1000000, cplx(0.0, 0.0));
    add_awgn_inplace(z, spec, rng);
    CHECK(std::abs(mean_power(z) / want - 1.0) < 0.01);
}

TEST_CASE("rayleigh block fading determinism and power") {
    ChannelSpec s = ChannelSpec::profile_a();
    s.fading = FadingMode::rayleigh_block;
    s.seed = 1234;
    const TapRealization a = draw_taps(s, 17);
    const TapRealization b = draw_taps(s, 17);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].gain == b[i].gain);
    CHECK(draw_taps(s, 18)[0].gain != a[0].gain);

    double total = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        double p = 0.0;
        for (const auto& t : draw_taps(s, static_cast<std::uint64_t>(i))) p += std::norm(t.gain);
        total += p;
    }
    CHECK(std::abs(total / draws - 1.0) < 0.02);
}
