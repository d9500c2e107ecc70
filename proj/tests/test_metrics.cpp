#include <doctest.h>

#include <cmath>

#include "wavelab/chains.hpp"
#include "wavelab/fft.hpp"
#include "wavelab/metrics.hpp"
#include "wavelab/rng.hpp"

using namespace wavelab;

TEST_CASE("bit error counting") {
    CHECK(ber({0, 1, 0, 1}, {0, 1, 0, 1}) == 0.0);
    CHECK(ber({0, 1, 0, 1}, {1, 0, 1, 0}) == 1.0);
    CHECK(ber({0, 0, 0, 0}, {0, 0, 0, 1}) == 0.25);
    CHECK_THROWS_AS(ber({0, 1}, {0, 1, 1}), InvalidInput);
    const auto ci = wilson_interval(10, 1000);
    CHECK(ci.first < 0.01);
    CHECK(ci.second > 0.01);
    CHECK(ci.first > 0.004);
    CHECK(ci.second < 0.02);
}

TEST_CASE("evm definition, floor, and error cases") {
    const ComplexVec ref{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    CHECK(evm_db(ref, ref) == kEvmFloorDb);
    ComplexVec scaled = ref;
    for (auto& x : scaled) x *= 1.1;
    CHECK(evm_db(scaled, ref) == doctest::Approx(20.0 * std::log10(0.1)).epsilon(1e-9));
    CHECK_THROWS_AS(evm_db(ref, ComplexVec(4, cplx(0, 0))), InvalidInput);
}

TEST_CASE("papr analytic extremes") {
    // constant-envelope tone: 0 dB regardless of oversampling
    const std::size_t n = 64;
    ComplexVec tone(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * 4.0 * static_cast<double>(i) / static_cast<double>(n);
        tone[i] = {std::cos(a), std::sin(a)};
    }
    CHECK(std::abs(block_papr_db(tone, 1)) < 1e-9);

    // impulse from an all-ones spectrum: PAPR = 10*log10(N)
    ComplexVec impulse(n, cplx(0, 0));
    impulse[0] = {std::sqrt(static_cast<double>(n)), 0};
    CHECK(block_papr_db(impulse, 1) == doctest::Approx(10.0 * std::log10(64.0)).epsilon(1e-9));
    CHECK_THROWS_AS(block_papr_db(ComplexVec{}, 4), InvalidInput);
}

TEST_CASE("ccdf is monotone with values in [0,1]") {
    SeededRng rng(3);
    std::vector<double> samples(20000);
    for (auto& s : samples) s = 6.0 + 2.0 * rng.normal();
    std::vector<double> thresholds;
    for (double t = 0.0; t <= 14.0; t += 0.5) thresholds.push_back(t);
    const auto curve = papr_ccdf(samples, thresholds);
    double prev = 1.0;
    for (const auto& [t, p] : curve) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(p <= prev + 1e-12);
        prev = p;
    }
    const double q = papr_at_ccdf(samples, 1e-2);
    std::size_t above = 0;
    for (const double s : samples) above += s > q;
    CHECK(static_cast<double>(above) / static_cast<double>(samples.size()) <= 1e-2 + 1e-3);
}

TEST_CASE("welch psd of a pure tone") {
    const std::size_t n = 8192;
    const double fs = 1.92e6;
    const double f0 = 10 * fs / 1024.0;  // bin 10 of a 1024 segment
    ComplexVec x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * f0 * static_cast<double>(i) / fs;
        x[i] = {std::cos(a), std::sin(a)};
    }
    const Psd psd = psd_welch(x, 1024, 0.5, fs);
    // single dominant peak at f0, sidelobes below -30 dB away from it
    double peak_freq = 0;
    for (std::size_t i = 0; i < psd.freq_hz.size(); ++i)
        if (psd.power_db[i] == 0.0) peak_freq = psd.freq_hz[i];
    CHECK(std::abs(peak_freq - f0) < fs / 1024.0);
    for (std::size_t i = 0; i < psd.freq_hz.size(); ++i)
        if (std::abs(psd.freq_hz[i] - f0) > 5.0 * fs / 1024.0) CHECK(psd.power_db[i] < -30.0);
    CHECK_THROWS_AS(psd_welch(x, 10000, 0.5, fs), InvalidInput);
}

TEST_CASE("real multiplication model") {
    WaveformConfig cfg;
    cfg.fft_size = 8;
    cfg.qam_order = 4;
    cfg.scheme = Scheme::sc_ofdm;
    cfg.data_symbols = 2;
    cfg.compressed_symbols = 2;
    CHECK(real_mult_count(cfg, 0.0) == 16 + 2 * 8 * 3);
    cfg.scheme = Scheme::sc_nofs;
    cfg.compressed_symbols = 1;
    CHECK(real_mult_count(cfg, 0.0) == 8 + 2 * 8 * 3);

    WaveformConfig big;
    big.scheme = Scheme::ofdm;
    big.data_symbols = 600;
    big.compressed_symbols = 600;
    big.fft_size = 1024;
    CHECK(real_mult_count(big, 0.0) == 20480);  // stage 2 alone

    // ordering and widening gap across the published configurations
    for (const auto& [m, q, n] :
         std::vector<std::tuple<int, int, int>>{{76, 64, 128}, {150, 125, 256}, {600, 492, 1024}}) {
        WaveformConfig a, b;
        a.scheme = Scheme::sc_ofdm;
        a.data_symbols = m;
        a.compressed_symbols = m;
        a.fft_size = n;
        b.scheme = Scheme::sc_nofs;
        b.data_symbols = m;
        b.compressed_symbols = q;
        b.fft_size = n;
        std::uint64_t prev_gap = 0;
        for (const double prune : {0.0, 0.2, 0.4}) {
            const std::uint64_t cost_ofdm = real_mult_count(a, 0.0);
            const std::uint64_t cost_nofs = real_mult_count(b, prune);
            CHECK(cost_nofs < cost_ofdm);
            const std::uint64_t gap = cost_ofdm - cost_nofs;
            CHECK(gap > prev_gap);
            prev_gap = gap;
        }
    }
    CHECK_THROWS_AS(real_mult_count(cfg, 1.0), InvalidInput);
}

TEST_CASE("link budget reproduces the deployment arithmetic") {
    WaveformConfig base;
    base.scheme = Scheme::sc_ofdm;
    base.data_symbols = 600;
    base.compressed_symbols = 600;
    base.fft_size = 1024;
    base.qam_order = 4;
    base.subcarrier_spacing_hz = 15000.0;
    base.sample_rate_hz = 15.36e6;
    base.cp = CpScheme::lte_like();
    FrameConfig frame;  // 10 ms

    const LinkRecord r0 = link_budget(base, frame);
    CHECK(r0.occupied_bw_hz == doctest::Approx(9.0e6).epsilon(1e-12));
    CHECK(r0.raw_rate_bps == doctest::Approx(18.0e6).epsilon(1e-12));
    CHECK(r0.cp_adjusted_rate_bps == doctest::Approx(18.0e6 * 7168.0 / 7680.0).epsilon(1e-9));

    WaveformConfig sa = base;
    sa.scheme = Scheme::sc_nofs;
    sa.compressed_symbols = 492;
    const LinkRecord ra = link_budget(sa, frame);
    CHECK(ra.occupied_bw_hz == doctest::Approx(7.38e6).epsilon(1e-12));
    CHECK(ra.raw_rate_bps == doctest::Approx(18.0e6).epsilon(1e-12));

    WaveformConfig sb = sa;
    const double alpha = sb.alpha();
    sb.subcarrier_spacing_hz /= alpha;
    sb.sample_rate_hz /= alpha;
    FrameConfig fb;
    fb.frame_duration_s = frame.frame_duration_s * alpha;
    fb.guard_gap_s = frame.frame_duration_s * (1.0 - alpha);
    const LinkRecord rb = link_budget(sb, fb);
    CHECK(rb.occupied_bw_hz == doctest::Approx(9.0e6).epsilon(1e-12));
    CHECK(rb.raw_rate_bps == doctest::Approx(18.0e6 / 0.82).epsilon(1e-12));
    CHECK(rb.frame_s == doctest::Approx(0.0082).epsilon(1e-12));
    CHECK(rb.guard_s == doctest::Approx(0.0018).epsilon(1e-12));
    // scenario-B frame time is exactly alpha times the reference frame
    CHECK(rb.frame_s == doctest::Approx(alpha * r0.frame_s).epsilon(1e-12));
}

TEST_CASE("qpsk theory helper") {
    // Q(sqrt(2*10^0.4)) = Q(2.2414) = 1.2501e-2
    CHECK(qpsk_awgn_ber(4.0) == doctest::Approx(1.2501e-2).epsilon(1e-3));
    // the classic 1e-3 anchor sits near 6.79 dB
    CHECK(qpsk_awgn_ber(6.79) == doctest::Approx(1.0e-3).epsilon(2e-2));
    CHECK(qpsk_awgn_ber(9.6) < 1.1e-5);
}
