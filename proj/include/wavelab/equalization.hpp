#pragma once

#include "wavelab/transforms.hpp"
#include "wavelab/types.hpp"

namespace wavelab {

/// Per-subcarrier complex channel gains, natural bin order (same convention
/// as channel_freq_response and the receive FFT).
struct FreqResponse {
    ComplexVec d;

    static FreqResponse flat(int n) { return {ComplexVec(static_cast<std::size_t>(n), {1.0, 0.0})}; }
};

struct OneTapEstimate {
    FreqResponse response;
    std::vector<std::uint8_t> bin_valid;  // 0 where the estimate is unusable
};

/// Least-squares per-bin estimate d_i = rx_i / tx_i. Bins with a zero
/// transmit pilot are singular: they are linearly interpolated from the
/// nearest valid neighbours when possible and marked invalid when isolated.
OneTapEstimate estimate_one_tap(const ComplexVec& rx_pilot_freq, const ComplexVec& tx_pilot_freq);

/// Coherent accumulator over multiple pilot blocks; finalize() performs the
/// combined least-squares division.
class PilotAverager {
public:
    void accumulate(const ComplexVec& rx_pilot_freq, const ComplexVec& tx_pilot_freq);
    OneTapEstimate finalize() const;
    bool empty() const { return num_.empty(); }

private:
    ComplexVec num_;
    RealVec den_;
};

/// Zero-forcing one-tap equalizer: y_i = r_i / d_i. Bins with |d_i| < 1e-12
/// are erased (set to zero) and counted in *erased if given.
ComplexVec equalize_one_tap(const ComplexVec& r, const FreqResponse& d,
                            std::size_t* erased = nullptr);

/// Time-domain channel taps recovered from a pilot block.
struct TimeChannelEstimate {
    ComplexVec taps;
};

/// Time-domain least-squares channel estimation for the full-size
/// multicarrier chain. Builds the circulant pilot-waveform matrix P from the
/// transmit transform and pilot symbols (signal part plus circulant bias
/// part), then solves h = P^H (P P^H)^{-1} y_p, truncated to n_taps entries.
/// rx_pilot must have the cyclic prefix already removed.
TimeChannelEstimate mc_estimate_time_domain(const ComplexVec& rx_pilot,
                                            const ComplexVec& pilot_symbols,
                                            const LinearTransform& mc_tx, int n_taps);

/// Removes a circulant channel: per-bin division by the DFT of the estimated
/// taps (identical to inverting the circulant matrix in the time domain).
ComplexVec mc_equalize_time_domain(const ComplexVec& y, const TimeChannelEstimate& h,
                                   std::size_t* erased = nullptr);

}  // namespace wavelab
