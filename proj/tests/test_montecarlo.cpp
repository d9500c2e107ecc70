#include <doctest.h>

#include <cmath>

#include "wavelab/kernels.hpp"
#include "wavelab/metrics.hpp"
#include "wavelab/montecarlo.hpp"

using namespace wavelab;

namespace {
BerRunSpec awgn_spec(Scheme scheme, int m, int q, int n, double ebn0, std::uint64_t bits) {
    BerRunSpec spec;
    spec.wf.scheme = scheme;
    spec.wf.data_symbols = m;
    spec.wf.compressed_symbols = q;
    spec.wf.fft_size = n;
    spec.wf.cp = CpScheme::fixed(default_cp_len(n));
    spec.wf.sample_rate_hz = spec.wf.subcarrier_spacing_hz * n;
    spec.ebn0_db = ebn0;
    spec.target_bits = bits;
    spec.seed = 1;
    return spec;
}
}  // namespace

TEST_CASE("qpsk over awgn matches the closed-form error rate") {
    // the Eb/N0 bookkeeping anchor: plain OFDM at 4 dB
    BerRunSpec spec = awgn_spec(Scheme::ofdm, 76, 76, 128, 4.0, 400000);
    const BerPointResult r = run_ber_point(spec);
    const double theory = qpsk_awgn_ber(4.0);
    CHECK(std::abs(r.ber() / theory - 1.0) < 0.05);
    CHECK(r.ci_low <= theory);
    CHECK(r.ci_high >= theory);
}

TEST_CASE("parallel and serial drivers agree exactly") {
    BerRunSpec spec = awgn_spec(Scheme::sc_ofdm, 16, 16, 32, 3.0, 60000);
    const BerPointResult serial = run_ber_point_serial(spec);
    for (const int jobs : {1, 2, 4}) {
        const BerPointResult par = run_ber_point(spec, jobs);
        CHECK(par.errors == serial.errors);
        CHECK(par.bits == serial.bits);
    }
}

TEST_CASE("determinism under a fixed seed, sensitivity to the seed") {
    BerRunSpec spec = awgn_spec(Scheme::ofdm, 16, 16, 32, 2.0, 40000);
    const BerPointResult a = run_ber_point(spec);
    const BerPointResult b = run_ber_point(spec);
    CHECK(a.errors == b.errors);
    spec.seed = 2;
    const BerPointResult c = run_ber_point(spec);
    CHECK(a.errors != c.errors);
}

TEST_CASE("papr sampling is deterministic and matches the serial path") {
    WaveformConfig cfg;
    cfg.scheme = Scheme::ofdm;
    cfg.data_symbols = 64;
    cfg.compressed_symbols = 64;
    cfg.fft_size = 64;
    cfg.cp = CpScheme::none();
    cfg.sample_rate_hz = cfg.subcarrier_spacing_hz * 64;
    const auto par = papr_samples(cfg, nullptr, 500, 9, 4, 2);
    const auto ser = papr_samples_serial(cfg, nullptr, 500, 9, 4);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i] == ser[i]);
}

TEST_CASE("multicarrier grows a papr advantage for the spread chain") {
    WaveformConfig mc;
    mc.scheme = Scheme::ofdm;
    mc.data_symbols = 600;
    mc.compressed_symbols = 600;
    mc.fft_size = 1024;
    mc.cp = CpScheme::none();
    mc.sample_rate_hz = mc.subcarrier_spacing_hz * 1024;
    WaveformConfig sc = mc;
    sc.scheme = Scheme::sc_ofdm;
    const auto papr_mc = papr_samples(mc, nullptr, 2000, 5);
    const auto papr_sc = papr_samples(sc, nullptr, 2000, 5);
    const double q_mc = papr_at_ccdf(papr_mc, 1e-2);
    const double q_sc = papr_at_ccdf(papr_sc, 1e-2);
    CHECK(q_mc - q_sc >= 1.0);
}

TEST_CASE("hard detection never beats iterative detection on orthogonal chains") {
    BerRunSpec it = awgn_spec(Scheme::sc_ofdm, 16, 16, 32, 4.0, 100000);
    BerRunSpec hard = it;
    hard.det.mode = DetectionMode::hard;
    const auto a = run_ber_point(it);
    const auto b = run_ber_point(hard);
    CHECK(a.errors == b.errors);  // identical decisions when C = I
}

TEST_CASE("selective channel with ideal estimation stays unbiased") {
    BerRunSpec spec = awgn_spec(Scheme::sc_ofdm, 32, 32, 64, 30.0, 60000);
    spec.channel = ChannelSpec::profile_a();
    spec.est = EstimationMode::ideal;
    const auto r = run_ber_point(spec);
    CHECK(r.ber() < 1e-3);  // high SNR, exact equalization: nearly error-free
}

TEST_CASE("noise-free pilot estimation equals ideal estimation") {
    BerRunSpec a = awgn_spec(Scheme::sc_ofdm, 32, 32, 64, 12.0, 60000);
    a.channel = ChannelSpec::profile_b();
    a.est = EstimationMode::ideal;
    BerRunSpec b = a;
    b.est = EstimationMode::pilot_noise_free;
    const auto ra = run_ber_point(a);
    const auto rb = run_ber_point(b);
    CHECK(ra.errors == rb.errors);
}

TEST_CASE("block fading runs are deterministic and degrade gracefully") {
    BerRunSpec spec = awgn_spec(Scheme::sc_ofdm, 16, 16, 32, 14.0, 50000);
    spec.channel = ChannelSpec::profile_a();
    spec.channel.fading = FadingMode::rayleigh_block;
    spec.channel.seed = 5;
    spec.est = EstimationMode::pilot_noise_free;
    const auto a = run_ber_point(spec);
    const auto b = run_ber_point_serial(spec);
    CHECK(a.errors == b.errors);
    CHECK(a.ber() > 1e-4);  // fading floor at moderate SNR: nonzero errors
}

TEST_CASE("gemm kernels match eigen and their serial reference") {
    using kernels::Mat;
    Mat a = Mat::Random(37, 23), b = Mat::Random(23, 19), bt = Mat::Random(19, 23);
    Mat c1(37, 19), c2(37, 19);
    kernels::gemm_nn(a, b, c1);
    kernels::gemm_nn_serial(a, b, c2);
    CHECK(c1 == c2);  // bit identical by construction
    CHECK((c1 - Mat(a * b)).cwiseAbs().maxCoeff() < 1e-12);

    kernels::gemm_nt(a, bt, c1);
    kernels::gemm_nt_serial(a, bt, c2);
    CHECK(c1 == c2);
    CHECK((c1 - Mat(a * bt.transpose())).cwiseAbs().maxCoeff() < 1e-12);

    Mat at = Mat::Random(23, 37);
    Mat d1(37, 19), d2(37, 19);
    kernels::gemm_tn(at, b, d1);
    kernels::gemm_tn_serial(at, b, d2);
    CHECK(d1 == d2);
    CHECK((d1 - Mat(at.transpose() * b)).cwiseAbs().maxCoeff() < 1e-12);

    // accumulate mode
    Mat acc1 = Mat::Ones(37, 19), acc2 = Mat::Ones(37, 19);
    kernels::gemm_nn(a, b, acc1, 0.5, 1.0);
    kernels::gemm_nn_serial(a, b, acc2, 0.5, 1.0);
    CHECK(acc1 == acc2);
}
