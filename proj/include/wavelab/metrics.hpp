#pragma once

#include <utility>

#include "wavelab/types.hpp"

namespace wavelab {

struct WaveformConfig;
struct FrameConfig;

/// Bit error fraction; lengths must match.
double ber(const BitStream& tx_bits, const BitStream& rx_bits);
std::uint64_t count_bit_errors(const BitStream& tx_bits, const BitStream& rx_bits);

/// Wilson score interval for a binomial proportion (95% by default).
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials,
                                          double z = 1.959963984540054);

/// Uncoded Gray-QPSK bit error probability in AWGN: Q(sqrt(2*Eb/N0)).
double qpsk_awgn_ber(double ebn0_db);

/// 10*log10(mean|rx-ref|^2 / mean|ref|^2), floored at -100 dB so the exact
/// noise-free case stays finite.
double evm_db(const ComplexVec& rx, const ComplexVec& ref);
constexpr double kEvmFloorDb = -100.0;

/// Peak-to-average power ratio of one block in dB, measured on a
/// zero-stuffed IFFT oversampling of the block (CP excluded by the caller).
double block_papr_db(const ComplexVec& time_block, int oversample = 4);

/// CCDF(threshold) = fraction of blocks whose PAPR exceeds the threshold.
std::vector<std::pair<double, double>> papr_ccdf(const std::vector<double>& papr_db,
                                                 const std::vector<double>& thresholds_db);

/// PAPR value exceeded with probability `ccdf` (empirical quantile).
double papr_at_ccdf(std::vector<double> papr_db, double ccdf);

struct Psd {
    std::vector<double> freq_hz;   // centred (negative to positive)
    std::vector<double> power_db;  // normalized to 0 dB peak
};

/// Hann-windowed averaged periodogram.
Psd psd_welch(const ComplexVec& samples, int seg_len, double overlap, double sample_rate_hz);

/// Width of the band above `threshold_db` relative to the peak.
double occupied_bandwidth_hz(const Psd& psd, double threshold_db = -10.0);

/// Transmit-side real-multiplication count model. Stage 1: 4*M^2 for the
/// full DFT precoder, 4*Q*M*(1-prune_ratio) for the compressing transform,
/// 4*N^2 for the full-size multicarrier generator, 0 for plain OFDM.
/// Stage 2 (absent for mc): 2*N*log2(N), i.e. (N/2)*log2(N) complex
/// butterfly multiplications at 4 real multiplications each.
std::uint64_t real_mult_count(const WaveformConfig& cfg, double prune_ratio);

struct LinkRecord {
    double occupied_bw_hz = 0.0;
    double raw_rate_bps = 0.0;
    double cp_adjusted_rate_bps = 0.0;
    double frame_s = 0.0;
    double guard_s = 0.0;
};

/// Bandwidth / rate / frame-timing arithmetic for a configuration.
/// raw rate counts M information symbols per block regardless of Q.
LinkRecord link_budget(const WaveformConfig& cfg, const FrameConfig& fcfg);

}  // namespace wavelab
