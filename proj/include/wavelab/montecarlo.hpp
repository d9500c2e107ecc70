#pragma once

#include "wavelab/chains.hpp"

namespace wavelab {

enum class EstimationMode { ideal, pilot, pilot_noise_free };

EstimationMode estimation_mode_from_name(const std::string& name);
const char* estimation_mode_name(EstimationMode m);

struct BerRunSpec {
    WaveformConfig wf;
    const TransformPair* pair = nullptr;
    ChannelSpec channel;  // single unit tap = AWGN only
    DetectorConfig det;
    EstimationMode est = EstimationMode::ideal;
    double ebn0_db = 0.0;
    std::uint64_t target_bits = 1000000;
    std::uint64_t seed = 1;
    bool collect_evm = false;
    bool include_cp_overhead = false;
};

struct BerPointResult {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    /// Post-detection EVM against the transmitted symbols (collect_evm only).
    double evm_db = 0.0;

    double ber() const {
        return bits > 0 ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0;
    }
};

/// Monte Carlo BER at one Eb/N0 point. Work is split into self-contained
/// superblocks (one fading realization + pilot + pilot_period data blocks),
/// each seeded by its index, so results are bit-identical for any worker
/// count. `jobs` <= 0 uses the OpenMP default.
BerPointResult run_ber_point(const BerRunSpec& spec, int jobs = 0);

/// Plain single-loop reference implementation; must produce exactly the same
/// counts as run_ber_point for the same spec.
BerPointResult run_ber_point_serial(const BerRunSpec& spec);

/// Per-block PAPR samples (dB, 4x oversampled), ordered by block index.
std::vector<double> papr_samples(const WaveformConfig& cfg, const TransformPair* pair,
                                 std::size_t n_blocks, std::uint64_t seed, int oversample = 4,
                                 int jobs = 0);
std::vector<double> papr_samples_serial(const WaveformConfig& cfg, const TransformPair* pair,
                                        std::size_t n_blocks, std::uint64_t seed,
                                        int oversample = 4);

/// Random-payload transmit stream (pilots included per config), for spectral
/// measurements.
ComplexVec generate_stream(const WaveformConfig& cfg, const TransformPair* pair,
                           std::size_t n_blocks, std::uint64_t seed);

}  // namespace wavelab
