#pragma once

#include "wavelab/chains.hpp"
#include "wavelab/detection.hpp"
#include "wavelab/transforms.hpp"

namespace wavelab {

enum class LossKind { mse, mse_detected };
enum class InitKind { legacy, random };

LossKind loss_kind_from_name(const std::string& name);
InitKind init_kind_from_name(const std::string& name);

struct TrainConfig {
    double learning_rate = 0.01;
    int iterations = 1000;
    long train_symbols = 600000;
    int batch_size = 512;
    std::uint64_t seed = 1;
    double train_ebn0_db = 10.0;
    double prune_threshold = 0.0;  // fraction of max |weight|
    /// mse: symbol MSE before the detector. mse_detected: symbol MSE at the
    /// output of the unrolled soft-limited cancellation detector (the Dec
    /// block sits inside the training loop).
    LossKind loss = LossKind::mse_detected;
    InitKind init = InitKind::legacy;  // stage-2 warm start from the stage-1 rows
    int checkpoint_interval = 50;
    int detector_iterations = 20;  // unroll depth when loss == mse_detected
    /// Extra weight on squared errors whose detected sign is wrong
    /// (0 = plain MSE). Sharpens the surrogate toward the bit-error
    /// objective the detector loop is there to minimize.
    double error_emphasis = 0.0;
    double stage1_tolerance = 1e-4;
    std::uint64_t validation_bits = 100000;

    void validate() const;
    std::uint64_t digest() const;
};

struct TrainReport {
    std::vector<double> loss_curve;  // per-iteration batch MSE (per element)
    double final_ber_gap = 0.0;
    double prune_ratio = 0.0;
    double wall_time_s = 0.0;
    std::uint64_t config_digest = 0;
    int iterations_run = 0;
    int best_iteration = 0;
    double best_validation_mse = 0.0;
    bool stopped_early = false;
};

/// Stage 1: emulate the legacy DFT precoding pair with a trainable affine
/// pair (Q = M). The legacy transform itself is the supervision target, so
/// the analytic initialization is already at the optimum.
TransformPair stage1_learn_legacy(int m, const TrainConfig& cfg);

/// Stage 2: truncate the stage-1 pair to Q < M and fine-tune through the
/// noise-free two-stage chain (stage 1, symmetric padding, IFFT, AWGN at the
/// training Eb/N0, FFT, truncation) by plain SGD. Checkpoints every
/// checkpoint_interval iterations evaluate a fixed validation stream; while
/// the evaluation MSE keeps shrinking training continues, otherwise it stops
/// and the best pair seen wins. A positive prune_threshold masks weak
/// connections afterwards and briefly re-tunes the survivors.
std::pair<TransformPair, TrainReport> stage2_compress(const TransformPair& stage1, int q,
                                                      const TrainConfig& cfg,
                                                      const WaveformConfig& wcfg);

/// BER(sc_nofs with pair) - BER(sc_ofdm) at one Eb/N0, identical seeds and
/// noise realizations for both chains.
double evaluate_ber_gap(const TransformPair& pair, const WaveformConfig& wcfg, double ebn0_db,
                        std::uint64_t n_bits, std::uint64_t seed = 7, int jobs = 0);

}  // namespace wavelab
