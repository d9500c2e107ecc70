#pragma once

#include <iosfwd>

#include "wavelab/montecarlo.hpp"
#include "wavelab/toml.hpp"
#include "wavelab/trainer.hpp"

namespace wavelab {

enum class ExperimentKind { train, ber_sweep, papr, psd, complexity, link, shape, all_figures };

ExperimentKind experiment_kind_from_name(const std::string& name);
const char* experiment_kind_name(ExperimentKind k);

struct ComplexityPoint {
    int data_symbols, compressed_symbols, fft_size;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::ber_sweep;
    std::string name;
    std::uint64_t seed = 1;
    int jobs = 0;  // 0 = hardware default
    std::string output_dir = "out";
    std::string transform_path;
    bool train_if_missing = false;

    WaveformConfig waveform;
    std::vector<Scheme> schemes;  // sweep/papr curve set; defaults to {waveform.scheme}

    ChannelSpec channel;  // identity = AWGN only
    EstimationMode est = EstimationMode::ideal;

    std::vector<double> sweep_ebn0_db;
    std::uint64_t bits_per_point = 1000000;

    DetectorConfig detector;
    TrainConfig train;

    std::size_t papr_blocks = 100000;
    std::vector<double> papr_thresholds_db;
    int papr_oversample = 4;

    int psd_segment = 4096;
    double psd_overlap = 0.5;
    std::size_t psd_blocks = 200;

    FrameConfig frame;

    std::vector<ComplexityPoint> complexity_points;
    std::vector<double> complexity_prune_grid;

    std::vector<int> shape_rows;
    int shape_oversample = 16;

    std::uint64_t config_digest = 0;  // over the config file bytes
};

/// Parse a config file. Throws ConfigError with file:line diagnostics.
ExperimentConfig load_experiment(const std::string& path);

/// All invariant violations, empty when the config is runnable.
std::vector<std::string> validate_experiment(const ExperimentConfig& cfg);

/// Runs the experiment, writing CSV/JSON artifacts under output_dir.
/// Progress goes to `log`. Returns the paths written.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// 64-bit FNV-1a of a file's bytes (config digests embedded in outputs).
std::uint64_t file_digest(const std::string& path);

}  // namespace wavelab
