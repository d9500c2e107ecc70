#pragma once

#include <memory>
#include <optional>
#include <string>

#include "wavelab/channel.hpp"
#include "wavelab/detection.hpp"
#include "wavelab/equalization.hpp"
#include "wavelab/transforms.hpp"

namespace wavelab {

enum class Scheme { ofdm, sc_ofdm, sc_nofs, mc_nofs, sinc_truncated };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct CpScheme {
    enum class Kind { none, fixed, lte_like };
    Kind kind = Kind::fixed;
    int length = 0;

    static CpScheme none() { return {Kind::none, 0}; }
    static CpScheme fixed(int len) { return {Kind::fixed, len}; }
    /// 80 samples on the first block of each 7-block slot, 72 on the rest;
    /// tiles a 0.5 ms slot exactly at N = 1024, 15.36 Msps.
    static CpScheme lte_like() { return {Kind::lte_like, 0}; }

    int len_for_block(std::size_t block_index) const;
    double average_len() const;
};

/// Fixed-length CP used for the simulation configurations.
int default_cp_len(int fft_size);

struct WaveformConfig {
    Scheme scheme = Scheme::sc_ofdm;
    int data_symbols = 0;        // information symbols per block (M)
    int compressed_symbols = 0;  // occupied stage-1 outputs (Q; Q = M when orthogonal)
    int fft_size = 0;            // N
    CpScheme cp = CpScheme::fixed(0);
    int qam_order = 4;
    double subcarrier_spacing_hz = 15000.0;
    double sample_rate_hz = 0.0;
    int pilot_period = 10;  // data blocks per pilot block; 0 disables pilots
    int sync_len = 256;

    double alpha() const {
        return static_cast<double>(compressed_symbols) / static_cast<double>(data_symbols);
    }
    int bits_per_block() const { return data_symbols * qam_bits_per_symbol(qam_order); }
    int active_bins() const;
    /// Information symbols per payload sample (M/N); the Eb/N0 rate factor.
    double rate_alpha() const {
        return static_cast<double>(data_symbols) / static_cast<double>(fft_size);
    }
    void validate() const;
    std::vector<std::string> diagnostics() const;
};

struct TxBlockSet {
    ComplexVec time_samples;
    BitStream tx_bits;  // data bits carried (pilot blocks excluded)
    std::vector<std::size_t> block_boundaries;  // start of each block, CP included
    std::vector<std::uint8_t> pilot_flags;
};

struct RxDiagnostics {
    std::vector<double> block_evm_db;  // per data block, against sliced decisions
    ComplexVec soft_symbols;           // post-detection
    std::size_t erased_bins = 0;
};

struct RxResult {
    BitStream bits;
    RxDiagnostics diagnostics;
};

/// Precomputed per-configuration machinery shared by tx/rx and the Monte
/// Carlo engine. Immutable after construction; one instance can be shared
/// across threads (FFT work areas are per-thread).
class Chain {
public:
    Chain(const WaveformConfig& cfg, const TransformPair* pair);

    const WaveformConfig& config() const { return cfg_; }
    const TransformPair& pair() const { return pair_; }
    /// Output amplitude scale making the average payload-sample power 1.
    double tx_scale() const { return tx_scale_; }
    /// Known bias contribution at the detector input (inverse*bias_tx + bias_rx).
    const Eigen::VectorXd& detector_bias() const { return detector_bias_; }

    /// One block: M (or N for the full-size multicarrier scheme) symbols to
    /// fft_size time samples, no CP. Optionally returns the natural-order
    /// frequency grid actually transmitted (scale included).
    ComplexVec modulate_block(const ComplexVec& symbols, ComplexVec* freq_grid = nullptr) const;

    struct BlockDecode {
        ComplexVec soft_symbols;
        double evm_db = 0.0;
        std::size_t erased_bins = 0;
    };
    /// One block: fft_size time samples (CP already removed) back to
    /// post-detection symbols.
    BlockDecode demodulate_block(const ComplexVec& time_payload, const FreqResponse& est,
                                 const IterativeDetector& detector) const;

    IterativeDetector make_detector(DetectorConfig det) const;

    /// Deterministic known pilot block (QPSK, fixed seed).
    const ComplexVec& pilot_symbols() const { return pilot_symbols_; }
    const ComplexVec& pilot_time() const { return pilot_time_; }      // no CP
    const ComplexVec& pilot_freq_grid() const { return pilot_grid_; } // as transmitted

private:
    WaveformConfig cfg_;
    TransformPair pair_;
    double tx_scale_;
    Eigen::VectorXd detector_bias_;
    ComplexVec pilot_symbols_;
    ComplexVec pilot_time_;
    ComplexVec pilot_grid_;
};

/// Default pair for schemes that have an analytic one; throws for sc_nofs.
TransformPair default_pair_for(const WaveformConfig& cfg);

/// Full transmit chain: QAM blocks, pilot insertion, CP. Bit count must be a
/// multiple of bits_per_block(). `pair` may be null except for sc_nofs.
TxBlockSet tx(const WaveformConfig& cfg, const BitStream& bits, const TransformPair* pair);

/// Full receive chain over a block-aligned sample stream produced by tx()
/// (post synchronization). Pilot blocks are skipped; `est` applies to every
/// data block.
RxResult rx(const WaveformConfig& cfg, const ComplexVec& samples, const TransformPair* pair,
            const FreqResponse& est, const DetectorConfig& det);

ComplexVec add_cp(const ComplexVec& block, int cp_len);
ComplexVec remove_cp(const ComplexVec& block, int cp_len);

/// Constant-amplitude zero-autocorrelation synchronization sequence.
ComplexVec sync_sequence(int length, std::uint64_t seed);

/// Index of the maximum normalized cross-correlation of sync_seq against the
/// stream; earliest index wins ties. Throws SyncFailure when the best metric
/// falls below `threshold`.
std::size_t synchronize(const ComplexVec& stream, const ComplexVec& sync_seq,
                        double threshold = 0.5);

struct FrameConfig {
    double frame_duration_s = 0.010;
    int subframes = 10;
    double guard_gap_s = 0.0;
    void validate() const;
};

struct FrameSchedule {
    std::vector<std::size_t> subframe_offsets;
    std::size_t payload_offset = 0;  // first payload sample (after sync)
    std::size_t guard_offset = 0;    // first guard sample
    double exact_guard_s = 0.0;      // before rounding to samples
};

struct FrameOutput {
    ComplexVec samples;
    FrameSchedule schedule;
};

/// Sync preamble + payload + trailing guard of silence, sized to the frame
/// duration at the configured sample rate (guard rounded down to samples).
FrameOutput build_frame(const FrameConfig& fcfg, const WaveformConfig& cfg,
                        const std::vector<const TxBlockSet*>& payload);

}  // namespace wavelab
