#include "wavelab/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "wavelab/metrics.hpp"
#include "wavelab/transform_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace wavelab {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const ExperimentConfig& cfg, const std::string& header)
        : os_(path) {
        if (!os_) throw ConfigError("cannot open output file: " + path);
        os_ << "# config_digest=" << std::hex << std::setw(16) << std::setfill('0')
            << cfg.config_digest << std::dec << std::setfill(' ') << " seed=" << cfg.seed
            << "\n";
        os_ << header << "\n";
    }
    template <typename... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((os_ << (first ? "" : ","), first = false, write(fields)), ...);
        os_ << "\n";
    }

private:
    void write(double v) { os_ << fmt(v); }
    void write(const std::string& s) { os_ << s; }
    void write(const char* s) { os_ << s; }
    void write(std::uint64_t v) { os_ << v; }
    void write(int v) { os_ << v; }
    std::ofstream os_;
};

WaveformConfig scheme_config(const WaveformConfig& base, Scheme scheme) {
    WaveformConfig wf = base;
    wf.scheme = scheme;
    if (scheme == Scheme::ofdm || scheme == Scheme::sc_ofdm)
        wf.compressed_symbols = wf.data_symbols;
    if (scheme == Scheme::mc_nofs) {
        wf.data_symbols = wf.fft_size;
        wf.compressed_symbols = wf.fft_size;
    }
    return wf;
}

TransformPair resolve_pair(const ExperimentConfig& cfg, std::ostream& log,
                           std::vector<std::string>& written) {
    if (cfg.transform_path.empty())
        throw ConfigError("sc_nofs requires transform_path in the config");
    if (fs::exists(cfg.transform_path)) {
        log << "loading transform pair: " << cfg.transform_path << "\n";
        return load_pair(cfg.transform_path);
    }
    if (!cfg.train_if_missing)
        throw ConfigError("transform file not found: " + cfg.transform_path);
    log << "transform file not found, training: " << cfg.transform_path << "\n";
    TrainConfig tc = cfg.train;
    tc.seed = tc.seed != 0 ? tc.seed : cfg.seed;
    const TransformPair stage1 = stage1_learn_legacy(cfg.waveform.data_symbols, tc);
    auto [pair, report] = stage2_compress(stage1, cfg.waveform.compressed_symbols, tc,
                                          scheme_config(cfg.waveform, Scheme::sc_nofs));
    fs::create_directories(fs::path(cfg.transform_path).parent_path().empty()
                               ? "."
                               : fs::path(cfg.transform_path).parent_path().string());
    save_pair(cfg.transform_path, pair);
    written.push_back(cfg.transform_path);
    log << "trained in " << fmt(report.wall_time_s) << " s, " << report.iterations_run
        << " iterations, validation MSE " << fmt(report.best_validation_mse) << "\n";
    return pair;
}

void write_run_report(const ExperimentConfig& cfg, const std::string& path,
                      const json& results) {
    json j;
    j["experiment"] = experiment_kind_name(cfg.experiment);
    j["name"] = cfg.name;
    j["seed"] = cfg.seed;
    std::ostringstream dg;
    dg << std::hex << std::setw(16) << std::setfill('0') << cfg.config_digest;
    j["config_digest"] = dg.str();
    j["waveform"] = {{"scheme", scheme_name(cfg.waveform.scheme)},
                     {"data_symbols", cfg.waveform.data_symbols},
                     {"compressed_symbols", cfg.waveform.compressed_symbols},
                     {"fft_size", cfg.waveform.fft_size},
                     {"qam_order", cfg.waveform.qam_order},
                     {"subcarrier_spacing_hz", cfg.waveform.subcarrier_spacing_hz},
                     {"sample_rate_hz", cfg.waveform.sample_rate_hz}};
    j["results"] = results;
    std::ofstream os(path);
    os << j.dump(2) << "\n";
}

std::vector<std::string> run_train(const ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> run_ber_sweep(const ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> run_papr(const ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> run_psd(const ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> run_complexity(const ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> run_link(const ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> run_shape(const ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> run_all_figures(const ExperimentConfig& cfg, std::ostream& log);

std::vector<std::string> run_train(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::string> written;
    if (cfg.transform_path.empty()) throw ConfigError("train experiment needs transform_path");
    TrainConfig tc = cfg.train;
    tc.seed = tc.seed != 0 ? tc.seed : cfg.seed;
    log << "stage 1: emulating the legacy precoder (M=" << cfg.waveform.data_symbols << ")\n";
    const TransformPair stage1 = stage1_learn_legacy(cfg.waveform.data_symbols, tc);
    log << "stage 2: compressing to Q=" << cfg.waveform.compressed_symbols << "\n";
    auto [pair, report] = stage2_compress(stage1, cfg.waveform.compressed_symbols, tc,
                                          scheme_config(cfg.waveform, Scheme::sc_nofs));
    save_pair(cfg.transform_path, pair);
    written.push_back(cfg.transform_path);

    const fs::path out(cfg.output_dir);
    {
        CsvWriter csv((out / "loss_curve.csv").string(), cfg, "iteration,mse");
        for (std::size_t i = 0; i < report.loss_curve.size(); ++i)
            csv.row(static_cast<std::uint64_t>(i), report.loss_curve[i]);
        written.push_back((out / "loss_curve.csv").string());
    }
    json res{{"iterations_run", report.iterations_run},
             {"best_iteration", report.best_iteration},
             {"best_validation_mse", report.best_validation_mse},
             {"stopped_early", report.stopped_early},
             {"final_ber_gap", report.final_ber_gap},
             {"prune_ratio", report.prune_ratio},
             {"wall_time_s", report.wall_time_s}};
    write_run_report(cfg, (out / "train_report.json").string(), res);
    written.push_back((out / "train_report.json").string());
    log << "saved pair to " << cfg.transform_path << " (gap " << fmt(report.final_ber_gap)
        << " at " << fmt(cfg.train.train_ebn0_db) << " dB)\n";
    return written;
}

std::vector<std::string> run_ber_sweep(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::string> written;
    const fs::path out(cfg.output_dir);
    TransformPair trained = make_identity_pair(1);  // replaced on demand
    bool have_trained = false;

    CsvWriter csv((out / "ber_sweep.csv").string(), cfg,
                  "ebn0_db,scheme,ber,bits,ci_low,ci_high,seed");
    json res = json::array();
    for (const Scheme scheme : cfg.schemes) {
        const WaveformConfig wf = scheme_config(cfg.waveform, scheme);
        const TransformPair* pair = nullptr;
        if (scheme == Scheme::sc_nofs) {
            if (!have_trained) {
                trained = resolve_pair(cfg, log, written);
                have_trained = true;
            }
            pair = &trained;
        }
        for (const double ebn0 : cfg.sweep_ebn0_db) {
            BerRunSpec spec;
            spec.wf = wf;
            spec.pair = pair;
            spec.channel = cfg.channel;
            spec.det = cfg.detector;
            spec.est = cfg.est;
            spec.ebn0_db = ebn0;
            spec.target_bits = cfg.bits_per_point;
            spec.seed = cfg.seed;
            const BerPointResult r = run_ber_point(spec, cfg.jobs);
            csv.row(ebn0, scheme_name(scheme), r.ber(), r.bits, r.ci_low, r.ci_high, cfg.seed);
            res.push_back({{"scheme", scheme_name(scheme)},
                           {"ebn0_db", ebn0},
                           {"ber", r.ber()},
                           {"bits", r.bits},
                           {"errors", r.errors}});
            log << scheme_name(scheme) << " @ " << fmt(ebn0) << " dB: BER " << fmt(r.ber())
                << " (" << r.errors << "/" << r.bits << ")\n";
        }
    }
    written.push_back((out / "ber_sweep.csv").string());
    write_run_report(cfg, (out / "run_report.json").string(), res);
    written.push_back((out / "run_report.json").string());
    return written;
}

std::vector<std::string> run_papr(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::string> written;
    const fs::path out(cfg.output_dir);
    std::vector<double> thresholds = cfg.papr_thresholds_db;
    if (thresholds.empty())
        for (double t = 4.0; t <= 13.0; t += 0.25) thresholds.push_back(t);

    TransformPair trained = make_identity_pair(1);
    bool have_trained = false;

    CsvWriter csv((out / "papr.csv").string(), cfg, "threshold_db,scheme,ccdf");
    json res = json::array();
    for (const Scheme scheme : cfg.schemes) {
        const WaveformConfig wf = scheme_config(cfg.waveform, scheme);
        const TransformPair* pair = nullptr;
        if (scheme == Scheme::sc_nofs) {
            if (!have_trained) {
                trained = resolve_pair(cfg, log, written);
                have_trained = true;
            }
            pair = &trained;
        }
        const auto samples = papr_samples(wf, pair, cfg.papr_blocks,
                                          SeededRng::derive(cfg.seed, 0x9A92),
                                          cfg.papr_oversample, cfg.jobs);
        for (const auto& [t, p] : papr_ccdf(samples, thresholds))
            csv.row(t, scheme_name(scheme), p);
        const double p1e3 = papr_at_ccdf(samples, 1e-3);
        res.push_back({{"scheme", scheme_name(scheme)}, {"papr_db_at_ccdf_1e-3", p1e3}});
        log << scheme_name(scheme) << ": PAPR at CCDF 1e-3 = " << fmt(p1e3) << " dB\n";
    }
    written.push_back((out / "papr.csv").string());
    write_run_report(cfg, (out / "run_report.json").string(), res);
    written.push_back((out / "run_report.json").string());
    return written;
}

std::vector<std::string> run_psd(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::string> written;
    const fs::path out(cfg.output_dir);
    const WaveformConfig wf = scheme_config(cfg.waveform, cfg.waveform.scheme);
    TransformPair trained = make_identity_pair(1);
    const TransformPair* pair = nullptr;
    if (wf.scheme == Scheme::sc_nofs) {
        trained = resolve_pair(cfg, log, written);
        pair = &trained;
    }
    const ComplexVec stream =
        generate_stream(wf, pair, cfg.psd_blocks, SeededRng::derive(cfg.seed, 0x95D));
    const Psd psd = psd_welch(stream, cfg.psd_segment, cfg.psd_overlap, wf.sample_rate_hz);
    CsvWriter csv((out / "psd.csv").string(), cfg, "freq_hz,db");
    for (std::size_t i = 0; i < psd.freq_hz.size(); ++i) csv.row(psd.freq_hz[i], psd.power_db[i]);
    written.push_back((out / "psd.csv").string());
    const double bw = occupied_bandwidth_hz(psd, -10.0);
    log << scheme_name(wf.scheme) << ": -10 dB occupied bandwidth " << fmt(bw / 1e6) << " MHz\n";
    write_run_report(cfg, (out / "run_report.json").string(),
                     json{{"occupied_bw_hz", bw}});
    written.push_back((out / "run_report.json").string());
    return written;
}

std::vector<std::string> run_complexity(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::string> written;
    const fs::path out(cfg.output_dir);
    CsvWriter csv((out / "complexity.csv").string(), cfg, "scheme,N,M,Q,prune,real_mults");
    for (const auto& pt : cfg.complexity_points) {
        for (const Scheme scheme : cfg.schemes) {
            WaveformConfig wf;
            wf.scheme = scheme;
            wf.data_symbols = pt.data_symbols;
            wf.compressed_symbols =
                scheme == Scheme::sc_nofs || scheme == Scheme::sinc_truncated
                    ? pt.compressed_symbols
                    : pt.data_symbols;
            wf.fft_size = pt.fft_size;
            for (const double prune_ratio : cfg.complexity_prune_grid) {
                const std::uint64_t mults = real_mult_count(wf, prune_ratio);
                csv.row(scheme_name(scheme), pt.fft_size, wf.data_symbols, wf.compressed_symbols,
                        prune_ratio, mults);
            }
        }
    }
    written.push_back((out / "complexity.csv").string());
    log << "complexity table written for " << cfg.complexity_points.size() << " configurations\n";
    return written;
}

std::vector<std::string> run_link(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::string> written;
    const fs::path out(cfg.output_dir);
    CsvWriter csv((out / "link.csv").string(), cfg,
                  "scenario,occupied_bw_hz,raw_rate_bps,cp_adjusted_rate_bps,frame_s,guard_s");

    const WaveformConfig& base = cfg.waveform;
    const double alpha = base.alpha();

    // reference: full-bandwidth orthogonal chain, whole frame used
    WaveformConfig ref = scheme_config(base, Scheme::sc_ofdm);
    FrameConfig ref_frame = cfg.frame;
    ref_frame.guard_gap_s = 0.0;
    const LinkRecord r0 = link_budget(ref, ref_frame);
    csv.row("sc_ofdm", r0.occupied_bw_hz, r0.raw_rate_bps, r0.cp_adjusted_rate_bps, r0.frame_s,
            r0.guard_s);

    // scenario A: same rate in a narrower band (same sampling rate)
    WaveformConfig sa = scheme_config(base, Scheme::sc_nofs);
    const LinkRecord ra = link_budget(sa, ref_frame);
    csv.row("scenario_a_bandwidth_saving", ra.occupied_bw_hz, ra.raw_rate_bps,
            ra.cp_adjusted_rate_bps, ra.frame_s, ra.guard_s);

    // scenario B: sampling rate scaled by 1/alpha, frame shrinks to
    // alpha * duration and the rest becomes a protection gap
    WaveformConfig sb = sa;
    sb.subcarrier_spacing_hz = base.subcarrier_spacing_hz / alpha;
    sb.sample_rate_hz = base.sample_rate_hz / alpha;
    FrameConfig fb = cfg.frame;
    fb.frame_duration_s = cfg.frame.frame_duration_s * alpha;
    fb.guard_gap_s = cfg.frame.frame_duration_s * (1.0 - alpha);
    const LinkRecord rb = link_budget(sb, fb);
    csv.row("scenario_b_faster_transmission", rb.occupied_bw_hz, rb.raw_rate_bps,
            rb.cp_adjusted_rate_bps, rb.frame_s, rb.guard_s);

    written.push_back((out / "link.csv").string());
    json res{{"sc_ofdm", {{"bw_hz", r0.occupied_bw_hz}, {"rate_bps", r0.raw_rate_bps}}},
             {"scenario_a", {{"bw_hz", ra.occupied_bw_hz}, {"rate_bps", ra.raw_rate_bps}}},
             {"scenario_b",
              {{"bw_hz", rb.occupied_bw_hz},
               {"rate_bps", rb.raw_rate_bps},
               {"frame_s", rb.frame_s},
               {"guard_s", rb.guard_s}}}};
    write_run_report(cfg, (out / "run_report.json").string(), res);
    written.push_back((out / "run_report.json").string());
    log << "link table: " << fmt(r0.occupied_bw_hz / 1e6) << " MHz / "
        << fmt(ra.occupied_bw_hz / 1e6) << " MHz / " << fmt(rb.raw_rate_bps / 1e6)
        << " Mbit/s\n";
    return written;
}

std::vector<std::string> run_shape(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::string> written;
    const fs::path out(cfg.output_dir);
    if (cfg.transform_path.empty() || !fs::exists(cfg.transform_path))
        throw ConfigError("transform file not found: " + cfg.transform_path);
    const TransformPair pair = load_pair(cfg.transform_path);

    std::vector<int> rows = cfg.shape_rows;
    if (rows.empty()) {
        const int q = pair.compressed_symbols;
        for (int i = 0; i < std::min(q, 8); ++i) rows.push_back(i);
    }
    CsvWriter csv((out / "shape.csv").string(), cfg, "row,bin,magnitude");
    for (const int r : rows) {
        const auto resp = irsinc_response(pair.forward, r, cfg.shape_oversample);
        for (std::size_t b = 0; b < resp.magnitude.size(); ++b)
            csv.row(r, static_cast<std::uint64_t>(b), resp.magnitude[b]);
    }
    written.push_back((out / "shape.csv").string());
    log << "per-subcarrier shapes written for " << rows.size() << " rows\n";
    return written;
}

std::vector<std::string> run_all_figures(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::string> written;
    const fs::path out(cfg.output_dir);

    auto sub = [&](const std::string& name) {
        ExperimentConfig c = cfg;
        c.output_dir = (out / name).string();
        fs::create_directories(c.output_dir);
        return c;
    };

    struct FigureCase {
        const char* name;
        int m, q, n;
    };
    const FigureCase bers[] = {{"fig8_awgn_m76", 76, 64, 128}, {"fig9_awgn_m150", 150, 125, 256}};
    for (const auto& fc : bers) {
        ExperimentConfig c = sub(fc.name);
        c.experiment = ExperimentKind::ber_sweep;
        c.waveform.data_symbols = fc.m;
        c.waveform.compressed_symbols = fc.q;
        c.waveform.fft_size = fc.n;
        c.waveform.cp = CpScheme::fixed(default_cp_len(fc.n));
        c.waveform.sample_rate_hz = c.waveform.subcarrier_spacing_hz * fc.n;
        c.schemes = {Scheme::ofdm, Scheme::sc_ofdm, Scheme::sc_nofs, Scheme::sinc_truncated};
        c.channel = ChannelSpec{};
        c.transform_path = (out / fc.name / "sc_nofs.pair").string();
        c.train_if_missing = true;
        if (c.sweep_ebn0_db.empty())
            for (double e = 0.0; e <= 12.0; e += 1.0) c.sweep_ebn0_db.push_back(e);
        log << "[" << fc.name << "]\n";
        auto w = run_ber_sweep(c, log);
        written.insert(written.end(), w.begin(), w.end());
    }

    {
        ExperimentConfig c = sub("fig11_papr");
        c.experiment = ExperimentKind::papr;
        c.schemes = {Scheme::ofdm, Scheme::sc_ofdm, Scheme::sc_nofs};
        c.papr_blocks = std::min<std::size_t>(cfg.papr_blocks, 20000);
        c.transform_path = cfg.transform_path;
        c.train_if_missing = true;
        log << "[fig11_papr]\n";
        auto w = run_papr(c, log);
        written.insert(written.end(), w.begin(), w.end());
    }

    {
        // desk-scale selective-channel variant on the small configuration
        ExperimentConfig c = sub("fig12_channel");
        c.experiment = ExperimentKind::ber_sweep;
        c.waveform.data_symbols = 76;
        c.waveform.compressed_symbols = 64;
        c.waveform.fft_size = 128;
        c.waveform.cp = CpScheme::fixed(default_cp_len(128));
        c.waveform.sample_rate_hz = c.waveform.subcarrier_spacing_hz * 128;
        c.schemes = {Scheme::ofdm, Scheme::sc_ofdm, Scheme::sc_nofs, Scheme::sinc_truncated};
        c.channel = ChannelSpec::profile_a();
        c.est = EstimationMode::pilot_noise_free;
        c.transform_path = (out / "fig8_awgn_m76" / "sc_nofs.pair").string();
        c.train_if_missing = true;
        c.sweep_ebn0_db.clear();
        for (double e = 0.0; e <= 24.0; e += 4.0) c.sweep_ebn0_db.push_back(e);
        log << "[fig12_channel]\n";
        auto w = run_ber_sweep(c, log);
        written.insert(written.end(), w.begin(), w.end());
    }

    {
        ExperimentConfig c = sub("fig13_complexity");
        c.experiment = ExperimentKind::complexity;
        log << "[fig13_complexity]\n";
        auto w = run_complexity(c, log);
        written.insert(written.end(), w.begin(), w.end());
    }

    {
        ExperimentConfig c = sub("link_scenarios");
        c.experiment = ExperimentKind::link;
        c.waveform.data_symbols = 600;
        c.waveform.compressed_symbols = 492;
        c.waveform.fft_size = 1024;
        c.waveform.compressed_symbols = 492;
        c.waveform.cp = CpScheme::lte_like();
        c.waveform.sample_rate_hz = c.waveform.subcarrier_spacing_hz * 1024;
        log << "[link_scenarios]\n";
        auto w = run_link(c, log);
        written.insert(written.end(), w.begin(), w.end());
    }
    return written;
}

}  // namespace

ExperimentKind experiment_kind_from_name(const std::string& name) {
    if (name == "train") return ExperimentKind::train;
    if (name == "ber_sweep") return ExperimentKind::ber_sweep;
    if (name == "papr") return ExperimentKind::papr;
    if (name == "psd") return ExperimentKind::psd;
    if (name == "complexity") return ExperimentKind::complexity;
    if (name == "link") return ExperimentKind::link;
    if (name == "shape") return ExperimentKind::shape;
    if (name == "all_figures") return ExperimentKind::all_figures;
    throw ConfigError("unknown experiment: " + name);
}

const char* experiment_kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::train: return "train";
        case ExperimentKind::ber_sweep: return "ber_sweep";
        case ExperimentKind::papr: return "papr";
        case ExperimentKind::psd: return "psd";
        case ExperimentKind::complexity: return "complexity";
        case ExperimentKind::link: return "link";
        case ExperimentKind::shape: return "shape";
        case ExperimentKind::all_figures: return "all_figures";
    }
    return "?";
}

std::uint64_t file_digest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read file: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[4096];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
        const std::streamsize n = is.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
        if (!is) break;
    }
    return h;
}

ExperimentConfig load_experiment(const std::string& path) {
    const toml::Table t = toml::parse_file(path);
    ExperimentConfig cfg;
    cfg.config_digest = file_digest(path);
    cfg.experiment = experiment_kind_from_name(t.get_string("experiment", "ber_sweep"));
    cfg.name = t.get_string("name", fs::path(path).stem().string());
    cfg.seed = static_cast<std::uint64_t>(t.get_int("seed", 1));
    cfg.jobs = static_cast<int>(t.get_int("jobs", 0));
    cfg.output_dir = t.get_string("output_dir", "out");
    cfg.transform_path = t.get_string("transform_path", "");
    cfg.train_if_missing = t.get_bool("train_if_missing", false);

    WaveformConfig& wf = cfg.waveform;
    wf.scheme = scheme_from_name(t.get_string("waveform.scheme", "sc_ofdm"));
    wf.data_symbols = static_cast<int>(t.get_int("waveform.data_symbols", 0));
    wf.compressed_symbols =
        static_cast<int>(t.get_int("waveform.compressed_symbols", wf.data_symbols));
    wf.fft_size = static_cast<int>(t.get_int("waveform.fft_size", 0));
    wf.qam_order = static_cast<int>(t.get_int("waveform.qam_order", 4));
    wf.subcarrier_spacing_hz = t.get_double("waveform.subcarrier_spacing_hz", 15000.0);
    wf.sample_rate_hz = t.get_double("waveform.sample_rate_hz",
                                     wf.subcarrier_spacing_hz * wf.fft_size);
    const std::string cp_kind = t.get_string("waveform.cp", "fixed");
    if (cp_kind == "none")
        wf.cp = CpScheme::none();
    else if (cp_kind == "lte_like")
        wf.cp = CpScheme::lte_like();
    else if (cp_kind == "fixed")
        wf.cp = CpScheme::fixed(
            static_cast<int>(t.get_int("waveform.cp_len", default_cp_len(wf.fft_size))));
    else
        throw ConfigError("unknown cp scheme: " + cp_kind);
    wf.pilot_period = static_cast<int>(t.get_int("waveform.pilot_period", 10));
    wf.sync_len = static_cast<int>(t.get_int("waveform.sync_len", 256));

    for (const auto& s : t.get_string_array("waveform.schemes"))
        cfg.schemes.push_back(scheme_from_name(s));
    if (cfg.schemes.empty()) cfg.schemes = {wf.scheme};

    const std::string channel_type = t.get_string("channel.type", "awgn");
    if (channel_type == "awgn") {
        cfg.channel = ChannelSpec{};
    } else if (channel_type == "profile_a") {
        cfg.channel = ChannelSpec::profile_a();
    } else if (channel_type == "profile_b") {
        cfg.channel = ChannelSpec::profile_b();
    } else if (channel_type == "custom") {
        const toml::Value* taps = t.find("channel.taps");
        if (taps == nullptr) throw ConfigError("channel.type = custom requires channel.taps");
        cfg.channel.taps.clear();
        for (const auto& row : taps->as_array()) {
            const auto& triple = row.as_array();
            if (triple.size() != 3)
                throw ConfigError("channel taps must be [delay, re, im] triples");
            cfg.channel.taps.push_back(
                {static_cast<int>(triple[0].as_int()),
                 {triple[1].as_double(), triple[2].as_double()}});
        }
    } else {
        throw ConfigError("unknown channel type: " + channel_type);
    }
    const std::string fading = t.get_string("channel.fading", "static");
    if (fading == "static")
        cfg.channel.fading = FadingMode::static_taps;
    else if (fading == "rayleigh_block")
        cfg.channel.fading = FadingMode::rayleigh_block;
    else
        throw ConfigError("unknown fading mode: " + fading);
    cfg.channel.fading_block_len =
        static_cast<int>(t.get_int("channel.fading_block_len", wf.pilot_period));
    cfg.channel.seed = static_cast<std::uint64_t>(t.get_int("channel.seed", 99));
    cfg.channel.normalize_power = t.get_bool("channel.normalize_power", true);
    cfg.est = estimation_mode_from_name(t.get_string("channel.estimation", "ideal"));

    cfg.sweep_ebn0_db = t.get_double_array("sweep.ebn0_db");
    cfg.bits_per_point =
        static_cast<std::uint64_t>(t.get_int("sweep.bits_per_point", 1000000));

    cfg.detector.iterations = static_cast<int>(t.get_int("detector.iterations", 20));
    const std::string det_mode = t.get_string("detector.mode", "iterative");
    cfg.detector.mode =
        det_mode == "hard" ? DetectionMode::hard : DetectionMode::iterative;
    cfg.detector.clamp = t.get_double("detector.clamp", -1.0);
    cfg.detector.interim_hard = t.get_bool("detector.interim_hard", false);
    cfg.detector.qam_order = wf.qam_order;

    TrainConfig& tr = cfg.train;
    tr.learning_rate = t.get_double("train.learning_rate", tr.learning_rate);
    tr.iterations = static_cast<int>(t.get_int("train.iterations", tr.iterations));
    tr.train_symbols = t.get_int("train.train_symbols", tr.train_symbols);
    tr.batch_size = static_cast<int>(t.get_int("train.batch_size", tr.batch_size));
    tr.seed = static_cast<std::uint64_t>(t.get_int("train.seed", 0));
    tr.train_ebn0_db = t.get_double("train.train_ebn0_db", tr.train_ebn0_db);
    tr.prune_threshold = t.get_double("train.prune_threshold", tr.prune_threshold);
    tr.loss = loss_kind_from_name(t.get_string("train.loss", "mse_detected"));
    tr.init = init_kind_from_name(t.get_string("train.init", "legacy"));
    tr.checkpoint_interval =
        static_cast<int>(t.get_int("train.checkpoint_interval", tr.checkpoint_interval));
    tr.detector_iterations =
        static_cast<int>(t.get_int("train.detector_iterations", tr.detector_iterations));
    tr.validation_bits =
        static_cast<std::uint64_t>(t.get_int("train.validation_bits", 100000));

    cfg.papr_blocks = static_cast<std::size_t>(t.get_int("papr.blocks", 100000));
    cfg.papr_thresholds_db = t.get_double_array("papr.thresholds_db");
    cfg.papr_oversample = static_cast<int>(t.get_int("papr.oversample", 4));

    cfg.psd_segment = static_cast<int>(t.get_int("psd.segment", 4096));
    cfg.psd_overlap = t.get_double("psd.overlap", 0.5);
    cfg.psd_blocks = static_cast<std::size_t>(t.get_int("psd.blocks", 200));

    cfg.frame.frame_duration_s = t.get_double("frame.duration_s", 0.010);
    cfg.frame.subframes = static_cast<int>(t.get_int("frame.subframes", 10));
    cfg.frame.guard_gap_s = t.get_double("frame.guard_s", 0.0);

    if (const toml::Value* pts = t.find("complexity.configs")) {
        for (const auto& row : pts->as_array()) {
            const auto& triple = row.as_array();
            if (triple.size() != 3)
                throw ConfigError("complexity configs must be [M, Q, N] triples");
            cfg.complexity_points.push_back({static_cast<int>(triple[0].as_int()),
                                             static_cast<int>(triple[1].as_int()),
                                             static_cast<int>(triple[2].as_int())});
        }
    }
    if (cfg.complexity_points.empty())
        cfg.complexity_points = {{76, 64, 128}, {150, 125, 256}, {600, 492, 1024}};
    cfg.complexity_prune_grid = t.get_double_array("complexity.prune_grid");
    if (cfg.complexity_prune_grid.empty()) cfg.complexity_prune_grid = {0.0, 0.1, 0.2, 0.3};
    if (cfg.experiment == ExperimentKind::complexity && cfg.schemes.size() == 1)
        cfg.schemes = {Scheme::ofdm, Scheme::sc_ofdm, Scheme::sc_nofs, Scheme::sinc_truncated};

    if (const toml::Value* rows = t.find("shape.rows"))
        for (const auto& r : rows->as_array()) cfg.shape_rows.push_back(static_cast<int>(r.as_int()));
    cfg.shape_oversample = static_cast<int>(t.get_int("shape.oversample", 16));
    return cfg;
}

std::vector<std::string> validate_experiment(const ExperimentConfig& cfg) {
    std::vector<std::string> issues;
    if (cfg.experiment == ExperimentKind::link || cfg.experiment == ExperimentKind::complexity ||
        cfg.experiment == ExperimentKind::shape) {
        // these do not run the signal chain; waveform checks still apply for link
    }
    if (cfg.experiment != ExperimentKind::complexity && cfg.experiment != ExperimentKind::shape) {
        for (const auto& d : cfg.waveform.diagnostics()) issues.push_back("waveform: " + d);
    }
    try {
        cfg.channel.validate();
    } catch (const std::exception& e) {
        issues.push_back(std::string("channel: ") + e.what());
    }
    if (cfg.experiment == ExperimentKind::ber_sweep && cfg.sweep_ebn0_db.empty())
        issues.push_back("sweep: ebn0_db list is empty");
    const bool needs_pair =
        (cfg.experiment == ExperimentKind::ber_sweep || cfg.experiment == ExperimentKind::papr ||
         cfg.experiment == ExperimentKind::psd) &&
        std::count(cfg.schemes.begin(), cfg.schemes.end(), Scheme::sc_nofs) > 0;
    if (needs_pair && cfg.transform_path.empty())
        issues.push_back("transform_path required for sc_nofs experiments");
    if (needs_pair && !cfg.transform_path.empty() && !fs::exists(cfg.transform_path) &&
        !cfg.train_if_missing)
        issues.push_back("transform file not found: " + cfg.transform_path);
    if (cfg.experiment == ExperimentKind::train) {
        if (cfg.transform_path.empty()) issues.push_back("train: transform_path required");
        if (cfg.waveform.compressed_symbols >= cfg.waveform.data_symbols)
            issues.push_back("train: compression requires Q < M");
        try {
            cfg.train.validate();
        } catch (const std::exception& e) {
            issues.push_back(std::string("train: ") + e.what());
        }
    }
    const int max_delay = cfg.channel.max_delay();
    const int cp_len = cfg.waveform.cp.len_for_block(0);
    if (!cfg.channel.is_identity() && max_delay >= cp_len &&
        cfg.experiment == ExperimentKind::ber_sweep)
        issues.push_back("channel delay spread reaches beyond the cyclic prefix (one-tap "
                         "equalization will be biased)");
    return issues;
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    const auto issues = validate_experiment(cfg);
    if (!issues.empty()) {
        std::string all = "invalid experiment config:";
        for (const auto& i : issues) all += "\n  - " + i;
        throw ConfigError(all);
    }
    fs::create_directories(cfg.output_dir);
    switch (cfg.experiment) {
        case ExperimentKind::train: return run_train(cfg, log);
        case ExperimentKind::ber_sweep: return run_ber_sweep(cfg, log);
        case ExperimentKind::papr: return run_papr(cfg, log);
        case ExperimentKind::psd: return run_psd(cfg, log);
        case ExperimentKind::complexity: return run_complexity(cfg, log);
        case ExperimentKind::link: return run_link(cfg, log);
        case ExperimentKind::shape: return run_shape(cfg, log);
        case ExperimentKind::all_figures: return run_all_figures(cfg, log);
    }
    throw ConfigError("unknown experiment kind");
}

}  // namespace wavelab
