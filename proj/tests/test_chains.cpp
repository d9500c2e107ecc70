#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "wavelab/chains.hpp"
#include "wavelab/fft.hpp"
#include "wavelab/metrics.hpp"
#include "wavelab/rng.hpp"

using namespace wavelab;

namespace {

WaveformConfig small_cfg(Scheme scheme, int m, int q, int n, int cp_len) {
    WaveformConfig wf;
    wf.scheme = scheme;
    wf.data_symbols = m;
    wf.compressed_symbols = q;
    wf.fft_size = n;
    wf.cp = cp_len > 0 ? CpScheme::fixed(cp_len) : CpScheme::none();
    wf.qam_order = 4;
    wf.sample_rate_hz = wf.subcarrier_spacing_hz * n;
    wf.pilot_period = 0;
    return wf;
}

ComplexVec random_complex(SeededRng& rng, std::size_t n) {
    ComplexVec v(n);
    for (auto& x : v) x = {rng.normal(), rng.normal()};
    return v;
}

}  // namespace

TEST_CASE("cyclic prefix add/remove") {
    const ComplexVec b{{1, 0}, {2, 0}, {3, 0}, {4, 0}};
    CHECK(add_cp(b, 0) == b);
    CHECK(add_cp(b, 2) == ComplexVec{{3, 0}, {4, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}});
    CHECK(remove_cp(add_cp(b, 3), 3) == b);
    CHECK_THROWS_AS(add_cp(b, 4), InvalidInput);
    CHECK_THROWS_AS(remove_cp(b, 4), InvalidInput);
}

TEST_CASE("cyclic prefix turns the channel into a circular convolution") {
    SeededRng rng(7);
    const std::size_t n = 16;
    const ComplexVec block = random_complex(rng, n);
    const TapRealization taps{{0, {0.9, 0.1}}, {1, {-0.4, 0}}, {2, {0.1, -0.2}}};
    const ComplexVec rx = remove_cp(apply_fir(add_cp(block, 4), taps), 4);
    // brute-force circular convolution oracle
    ComplexVec want(n, cplx(0, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& t : taps)
            want[i] += t.gain * block[(i + n - static_cast<std::size_t>(t.delay)) % n];
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(rx[i] - want[i]) < 1e-12);
}

TEST_CASE("per-bin diagonalization holds through the chain") {
    // with any FIR channel shorter than the CP, received frequency samples
    // equal the channel response times the transmitted frequency samples
    const WaveformConfig cfg = small_cfg(Scheme::sc_ofdm, 12, 12, 32, 8);
    const Chain chain(cfg, nullptr);
    SeededRng rng(3);
    const ComplexVec syms = qam_modulate(rng.bits(24), 4);
    ComplexVec grid;
    const ComplexVec time = chain.modulate_block(syms, &grid);
    const TapRealization taps = draw_taps(ChannelSpec::profile_a(), 0);
    const ComplexVec rx = remove_cp(apply_fir(add_cp(time, 8), taps), 8);
    const ComplexVec rx_freq = thread_fft(32).forward(rx);
    const ComplexVec d = channel_freq_response(taps, 32);
    for (std::size_t i = 0; i < 32; ++i)
        CHECK(std::abs(rx_freq[i] - d[i] * grid[i]) < 1e-9);
}

TEST_CASE("dft-spread block equals the direct matrix chain") {
    const WaveformConfig cfg = small_cfg(Scheme::sc_ofdm, 4, 4, 8, 0);
    const Chain chain(cfg, nullptr);
    SeededRng rng(11);
    const ComplexVec s = qam_modulate(rng.bits(8), 4);
    const ComplexVec got = chain.modulate_block(s);

    // oracle: g * IFFT8(ifftshift(pad(DFT4(s)))) with explicit matrices
    Eigen::Map<const Eigen::VectorXcd> se(s.data(), 4);
    const Eigen::VectorXcd precoded = dft_matrix(4, DftDirection::forward) * se;
    ComplexVec padded = zero_pad_symmetric(ComplexVec(precoded.data(), precoded.data() + 4), 8);
    padded = ifftshift(padded);
    Eigen::Map<const Eigen::VectorXcd> pe(padded.data(), 8);
    const Eigen::VectorXcd want = dft_matrix(8, DftDirection::inverse) * pe;
    const double g = chain.tx_scale();
    for (int i = 0; i < 8; ++i)
        CHECK(std::abs(got[static_cast<std::size_t>(i)] - g * want(i)) < 1e-12);
}

TEST_CASE("all-bins constant symbols produce a time impulse") {
    const WaveformConfig cfg = small_cfg(Scheme::ofdm, 16, 16, 16, 0);
    const Chain chain(cfg, nullptr);
    const cplx c{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    const ComplexVec time = chain.modulate_block(ComplexVec(16, c));
    double total = 0, peak = 0;
    for (const auto& x : time) {
        total += std::norm(x);
        peak = std::max(peak, std::norm(x));
    }
    CHECK(peak / total > 1.0 - 1e-12);  // all energy in one sample
}

TEST_CASE("compressed chain with the analytic orthogonal pair matches dft spreading") {
    const int m = 12, n = 32;
    const TransformPair pair = make_dft_precoder_pair(m);
    const WaveformConfig nofs = small_cfg(Scheme::sc_nofs, m, m, n, 4);
    const WaveformConfig ofdm = small_cfg(Scheme::sc_ofdm, m, m, n, 4);
    SeededRng rng(5);
    const BitStream bits = rng.bits(static_cast<std::size_t>(nofs.bits_per_block()) * 6);
    const TxBlockSet a = tx(nofs, bits, &pair);
    const TxBlockSet b = tx(ofdm, bits, nullptr);
    REQUIRE(a.time_samples.size() == b.time_samples.size());
    for (std::size_t i = 0; i < a.time_samples.size(); ++i)
        CHECK(std::abs(a.time_samples[i] - b.time_samples[i]) < 1e-6);
}

TEST_CASE("noise-free loopback recovers bits for every orthogonal scheme") {
    SeededRng rng(19);
    for (const Scheme scheme : {Scheme::ofdm, Scheme::sc_ofdm, Scheme::mc_nofs}) {
        WaveformConfig cfg = scheme == Scheme::mc_nofs ? small_cfg(scheme, 16, 16, 16, 4)
                                                       : small_cfg(scheme, 12, 12, 32, 4);
        cfg.pilot_period = 5;
        const BitStream bits = rng.bits(static_cast<std::size_t>(cfg.bits_per_block()) * 20);
        const TxBlockSet sent = tx(cfg, bits, nullptr);
        const auto got = rx(cfg, sent.time_samples, nullptr,
                            FreqResponse::flat(cfg.fft_size), DetectorConfig{});
        CHECK(got.bits == bits);
        for (const double e : got.diagnostics.block_evm_db) CHECK(e <= kEvmFloorDb + 1e-9);
    }
    // compressed chain with an alpha = 1 stage-1 style pair
    const TransformPair pair = make_dft_precoder_pair(12);
    WaveformConfig cfg = small_cfg(Scheme::sc_nofs, 12, 12, 32, 4);
    const BitStream bits = rng.bits(static_cast<std::size_t>(cfg.bits_per_block()) * 20);
    const TxBlockSet sent = tx(cfg, bits, &pair);
    const auto got =
        rx(cfg, sent.time_samples, &pair, FreqResponse::flat(32), DetectorConfig{});
    CHECK(got.bits == bits);
}

TEST_CASE("block boundaries partition the sample stream") {
    WaveformConfig cfg = small_cfg(Scheme::sc_ofdm, 8, 8, 16, 3);
    cfg.pilot_period = 4;
    SeededRng rng(23);
    const BitStream bits = rng.bits(static_cast<std::size_t>(cfg.bits_per_block()) * 9);
    const TxBlockSet sent = tx(cfg, bits, nullptr);
    REQUIRE(!sent.block_boundaries.empty());
    CHECK(sent.block_boundaries.front() == 0);
    for (std::size_t i = 1; i < sent.block_boundaries.size(); ++i)
        CHECK(sent.block_boundaries[i] - sent.block_boundaries[i - 1] ==
              static_cast<std::size_t>(16 + 3));
    CHECK(sent.time_samples.size() ==
          sent.block_boundaries.back() + static_cast<std::size_t>(16 + 3));
    // pilot cadence: one pilot block before every 4 data blocks
    std::size_t pilots = 0;
    for (const auto f : sent.pilot_flags) pilots += f;
    CHECK(pilots == 3);
}

TEST_CASE("transmit power is normalized across schemes") {
    SeededRng rng(29);
    const TransformPair sinc = make_sinc_truncated_pair(19, 16);
    for (const Scheme scheme : {Scheme::ofdm, Scheme::sc_ofdm, Scheme::sinc_truncated}) {
        WaveformConfig cfg = scheme == Scheme::sinc_truncated
                                 ? small_cfg(scheme, 19, 16, 32, 0)
                                 : small_cfg(scheme, 19, 19, 32, 0);
        const Chain chain(cfg, nullptr);
        double acc = 0;
        const int blocks = 400;
        for (int b = 0; b < blocks; ++b) {
            const ComplexVec s = qam_modulate(
                rng.bits(static_cast<std::size_t>(cfg.bits_per_block())), 4);
            acc += mean_power(chain.modulate_block(s));
        }
        CHECK(std::abs(acc / blocks - 1.0) < 0.01);
    }
}

TEST_CASE("truncation baseline leaves irrecoverable interference") {
    // noise-free compressed chain without training: matched-filter symbols
    // stay interference-limited
    WaveformConfig cfg = small_cfg(Scheme::sinc_truncated, 76, 64, 128, 16);
    SeededRng rng(31);
    const BitStream bits = rng.bits(static_cast<std::size_t>(cfg.bits_per_block()) * 20);
    const TxBlockSet sent = tx(cfg, bits, nullptr);
    DetectorConfig hard;
    hard.mode = DetectionMode::hard;
    const auto got = rx(cfg, sent.time_samples, nullptr, FreqResponse::flat(128), hard);
    const ComplexVec want = qam_modulate(bits, 4);
    const double evm = evm_db(got.diagnostics.soft_symbols, want);
    CHECK(evm > -15.0);  // pre-detection interference floor
}

TEST_CASE("synchronization finds the embedded sequence") {
    const ComplexVec sync = sync_sequence(64, 1);
    // constant amplitude
    for (const auto& s : sync) CHECK(std::abs(std::abs(s) - 1.0) < 1e-12);

    SeededRng rng(37);
    ComplexVec stream(50, cplx(0, 0));
    stream.insert(stream.end(), sync.begin(), sync.end());
    const ComplexVec payload = random_complex(rng, 100);
    stream.insert(stream.end(), payload.begin(), payload.end());
    CHECK(synchronize(stream, sync) == 50);

    // 5 dB SNR Monte Carlo
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        SeededRng trng(SeededRng::derive(1000, static_cast<std::uint64_t>(trial)));
        ComplexVec noisy = stream;
        for (auto& x : noisy) x += trng.normal_complex(std::pow(10.0, -0.5));
        try {
            hits += synchronize(noisy, sync) == 50;
        } catch (const SyncFailure&) {
        }
    }
    CHECK(hits >= 99);

    // pure noise has no credible peak
    ComplexVec noise = random_complex(rng, 400);
    for (auto& x : noise) x *= 0.5;
    CHECK_THROWS_AS(synchronize(noise, sync), SyncFailure);
}

TEST_CASE("frame assembly and timing arithmetic") {
    WaveformConfig cfg = small_cfg(Scheme::sc_ofdm, 600, 600, 1024, 0);
    cfg.cp = CpScheme::lte_like();
    cfg.sample_rate_hz = 15.36e6;
    cfg.subcarrier_spacing_hz = 15000.0;
    FrameConfig fcfg;  // 10 ms, 10 subframes
    const FrameOutput frame = build_frame(fcfg, cfg, {});
    CHECK(frame.samples.size() == 153600);
    CHECK(frame.schedule.subframe_offsets.size() == 10);
    CHECK(frame.schedule.subframe_offsets[1] == 15360);
    // zero payload: silence after the sync preamble
    for (std::size_t i = frame.schedule.payload_offset; i < frame.samples.size(); ++i)
        CHECK(frame.samples[i] == cplx(0, 0));

    // faster-transmission timing: guard rounded down to whole samples
    WaveformConfig fast = cfg;
    fast.sample_rate_hz = 15.36e6 / 0.82;
    fast.subcarrier_spacing_hz = 15000.0 / 0.82;
    FrameConfig ffast;
    ffast.frame_duration_s = 0.0082;
    ffast.guard_gap_s = 0.0018;
    const FrameOutput f2 = build_frame(ffast, fast, {});
    CHECK(f2.samples.size() == 153600);
    CHECK(f2.samples.size() - f2.schedule.guard_offset == 33717);

    // capacity error reports required versus available
    WaveformConfig tiny = small_cfg(Scheme::sc_ofdm, 8, 8, 16, 0);
    tiny.sync_len = 32;
    SeededRng rng(41);
    const TxBlockSet payload =
        tx(tiny, rng.bits(static_cast<std::size_t>(tiny.bits_per_block()) * 64), nullptr);
    FrameConfig small_frame;
    small_frame.frame_duration_s = 64.0 / tiny.sample_rate_hz;
    CHECK_THROWS_AS(build_frame(small_frame, tiny, {&payload}), FrameCapacityError);
}

TEST_CASE("waveform config diagnostics") {
    WaveformConfig cfg = small_cfg(Scheme::sc_nofs, 10, 12, 32, 4);
    const auto issues = cfg.diagnostics();
    bool found = false;
    for (const auto& i : issues) found |= i.find("compression factor exceeds 1") != std::string::npos;
    CHECK(found);
    WaveformConfig bad_rate = small_cfg(Scheme::sc_ofdm, 8, 8, 16, 0);
    bad_rate.sample_rate_hz = 12345.0;
    bool rate_flagged = false;
    for (const auto& i : bad_rate.diagnostics())
        rate_flagged |= i.find("sample_rate_hz") != std::string::npos;
    CHECK(rate_flagged);
    CHECK(small_cfg(Scheme::sc_ofdm, 76, 76, 128, 16).diagnostics().empty());
}
