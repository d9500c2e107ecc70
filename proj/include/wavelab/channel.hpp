#pragma once

#include "wavelab/rng.hpp"
#include "wavelab/types.hpp"

namespace wavelab {

struct ChannelTap {
    int delay = 0;  // samples
    cplx gain{1.0, 0.0};
};

enum class FadingMode { static_taps, rayleigh_block };

struct ChannelSpec {
    std::vector<ChannelTap> taps{{0, {1.0, 0.0}}};
    FadingMode fading = FadingMode::static_taps;
    int fading_block_len = 10;  // OFDM blocks per fading realization
    std::uint64_t seed = 0;
    bool normalize_power = true;

    int max_delay() const;
    double total_power() const;
    bool is_identity() const;
    void validate() const;

    /// Multipath tap profile for the indoor simulation channel:
    /// 0.8765 at 0, -0.2279 at Ts, 0.1315 at 4Ts, -0.4032j at 7Ts.
    static ChannelSpec profile_a();
    /// Deliberately frequency-selective profile with deep notches:
    /// 0.6965, -0.3279 at Ts, 0.1765 at 3Ts, 0.5991 at 5Ts, 0.1315 at 7Ts.
    static ChannelSpec profile_b();
};

/// One concrete tap realization (gains only, delays as in the spec).
using TapRealization = std::vector<ChannelTap>;

/// Taps for fading block `block_index`. Static mode returns the configured
/// gains (power-normalized if requested); rayleigh_block redraws each tap as
/// magnitude * complex standard normal / sqrt(2), so expected tap power
/// matches the static profile. Deterministic in (spec, block_index).
TapRealization draw_taps(const ChannelSpec& spec, std::uint64_t fading_block_index);

/// Linear convolution with the tap impulse response, output truncated to the
/// input length (the tail spills into the next block's prefix and is
/// discarded there).
ComplexVec apply_fir(const ComplexVec& samples, const TapRealization& taps);
ComplexVec apply_fir(const ComplexVec& samples, const ChannelSpec& spec);

struct AwgnSpec {
    double ebn0_db = 0.0;          // +infinity means noise-free
    int bits_per_symbol = 2;
    double alpha_rate = 1.0;       // information symbols per payload sample (M/N)
    bool include_cp_overhead = false;
    double cp_overhead_factor = 1.0;  // N/(N+L) when include_cp_overhead
    double signal_power = 1.0;     // mean |x|^2 over payload samples

    /// Per-complex-sample noise variance implied by the Eb/N0 bookkeeping.
    double noise_variance() const;
};

/// Adds circular complex Gaussian noise calibrated so that
/// sigma^2 = P / (10^(ebn0/10) * bits_per_symbol * alpha_rate), with the
/// optional cyclic-prefix overhead factor folded into alpha_rate.
ComplexVec add_awgn(const ComplexVec& samples, const AwgnSpec& spec, SeededRng& rng);
void add_awgn_inplace(ComplexVec& samples, const AwgnSpec& spec, SeededRng& rng);

/// N-point frequency response of the tap profile (raw DFT of the zero-padded
/// impulse response, natural bin order as used right after the receive FFT).
ComplexVec channel_freq_response(const TapRealization& taps, int n);
ComplexVec channel_freq_response(const ChannelSpec& spec, int n);

}  // namespace wavelab
