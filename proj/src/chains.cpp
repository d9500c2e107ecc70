#include "wavelab/chains.hpp"

#include <algorithm>
#include <cmath>

#include "wavelab/fft.hpp"
#include "wavelab/metrics.hpp"

namespace wavelab {

namespace {
constexpr std::uint64_t kPilotSeed = 0x50494C4F54ULL;
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::ofdm: return "ofdm";
        case Scheme::sc_ofdm: return "sc_ofdm";
        case Scheme::sc_nofs: return "sc_nofs";
        case Scheme::mc_nofs: return "mc_nofs";
        case Scheme::sinc_truncated: return "sinc_truncated";
    }
    return "?";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "ofdm") return Scheme::ofdm;
    if (name == "sc_ofdm") return Scheme::sc_ofdm;
    if (name == "sc_nofs") return Scheme::sc_nofs;
    if (name == "mc_nofs") return Scheme::mc_nofs;
    if (name == "sinc_truncated") return Scheme::sinc_truncated;
    throw ConfigError("unknown scheme: " + name);
}

int CpScheme::len_for_block(std::size_t block_index) const {
    switch (kind) {
        case Kind::none: return 0;
        case Kind::fixed: return length;
        case Kind::lte_like: return block_index % 7 == 0 ? 80 : 72;
    }
    return 0;
}

double CpScheme::average_len() const {
    switch (kind) {
        case Kind::none: return 0.0;
        case Kind::fixed: return length;
        case Kind::lte_like: return (80.0 + 6.0 * 72.0) / 7.0;
    }
    return 0.0;
}

int default_cp_len(int fft_size) {
    switch (fft_size) {
        case 128: return 16;
        case 256: return 32;
        case 1024: return 80;
        default: return fft_size / 8;
    }
}

int WaveformConfig::active_bins() const {
    switch (scheme) {
        case Scheme::ofdm:
        case Scheme::sc_ofdm: return data_symbols;
        case Scheme::sc_nofs:
        case Scheme::sinc_truncated: return compressed_symbols;
        case Scheme::mc_nofs: return fft_size;
    }
    return 0;
}

void WaveformConfig::validate() const {
    const auto issues = diagnostics();
    if (!issues.empty()) throw ConfigError("invalid waveform config: " + issues.front());
}

std::vector<std::string> WaveformConfig::diagnostics() const {
    std::vector<std::string> out;
    if (data_symbols < 1) out.push_back("data symbol count must be >= 1");
    if (compressed_symbols < 1) out.push_back("compressed symbol count must be >= 1");
    if (compressed_symbols > data_symbols)
        out.push_back("compression factor exceeds 1 (compressed_symbols > data_symbols)");
    if (data_symbols > fft_size) out.push_back("data symbols exceed the FFT size");
    if (scheme == Scheme::ofdm || scheme == Scheme::sc_ofdm) {
        if (compressed_symbols != data_symbols)
            out.push_back("orthogonal schemes require compressed_symbols == data_symbols");
    }
    if (scheme == Scheme::mc_nofs &&
        (data_symbols != fft_size || compressed_symbols != fft_size))
        out.push_back("full-size multicarrier scheme requires M == Q == fft_size");
    try {
        qam_bits_per_symbol(qam_order);
    } catch (const std::exception&) {
        out.push_back("unsupported QAM order " + std::to_string(qam_order));
    }
    if (sample_rate_hz > 0.0 && subcarrier_spacing_hz > 0.0) {
        const double expect = static_cast<double>(fft_size) * subcarrier_spacing_hz;
        if (std::abs(sample_rate_hz - expect) > 1e-6 * expect)
            out.push_back("sample_rate_hz != fft_size * subcarrier_spacing_hz");
    }
    if (cp.kind == CpScheme::Kind::fixed && (cp.length < 0 || cp.length >= fft_size))
        out.push_back("cyclic prefix length must satisfy 0 <= L < fft_size");
    if (cp.kind == CpScheme::Kind::lte_like && fft_size != 1024)
        out.push_back("lte_like cyclic prefix pattern is defined for fft_size 1024");
    if (pilot_period < 0) out.push_back("pilot period must be >= 0");
    return out;
}

TransformPair default_pair_for(const WaveformConfig& cfg) {
    switch (cfg.scheme) {
        case Scheme::ofdm: return make_identity_pair(cfg.data_symbols);
        case Scheme::sc_ofdm: return make_dft_precoder_pair(cfg.data_symbols);
        case Scheme::sinc_truncated:
            return make_sinc_truncated_pair(cfg.data_symbols, cfg.compressed_symbols);
        case Scheme::mc_nofs: return make_mc_pair(cfg.fft_size, 1.0);
        case Scheme::sc_nofs:
            throw ConfigError("sc_nofs requires a trained transform pair");
    }
    throw ConfigError("unknown scheme");
}

Chain::Chain(const WaveformConfig& cfg, const TransformPair* pair)
    : cfg_(cfg), pair_(pair != nullptr ? *pair : default_pair_for(cfg)) {
    cfg_.validate();
    pair_.validate();
    if (pair_.data_symbols != cfg.data_symbols ||
        pair_.compressed_symbols != cfg.compressed_symbols)
        throw ConfigError("transform pair dimensions do not match the waveform config");

    // Average block energy through a unitary stage 2 equals the expected
    // stage-1 output energy: 0.5*||W||_F^2 + ||bias||^2 for unit-energy QAM.
    const double e_block = 0.5 * pair_.forward.effective().squaredNorm() +
                           pair_.forward.bias().squaredNorm();
    tx_scale_ = e_block > 0.0 ? std::sqrt(static_cast<double>(cfg.fft_size) / e_block) : 1.0;

    detector_bias_ = pair_.inverse.effective() * pair_.forward.bias() + pair_.inverse.bias();

    SeededRng prng(kPilotSeed);
    const int npilot = cfg.scheme == Scheme::mc_nofs ? cfg.fft_size : cfg.data_symbols;
    pilot_symbols_ = qam_modulate(prng.bits(static_cast<std::size_t>(npilot) * 2), 4);
    pilot_time_ = modulate_block(pilot_symbols_, &pilot_grid_);
}

ComplexVec Chain::modulate_block(const ComplexVec& symbols, ComplexVec* freq_grid) const {
    const int n = cfg_.fft_size;
    RealVec packed = pack_complex_to_real(symbols);
    RealVec shaped = pair_.forward.apply(packed);
    ComplexVec xa = unpack_real_to_complex(shaped);

    if (cfg_.scheme == Scheme::mc_nofs) {
        // generator matrix already produces the time-domain block
        ComplexVec time(xa);
        for (auto& x : time) x *= tx_scale_;
        if (freq_grid != nullptr) *freq_grid = thread_fft(static_cast<std::size_t>(n)).forward(time);
        return time;
    }

    ComplexVec grid = ifftshift(zero_pad_symmetric(xa, n));
    for (auto& x : grid) x *= tx_scale_;
    if (freq_grid != nullptr) *freq_grid = grid;
    return thread_fft(static_cast<std::size_t>(n)).inverse(grid);
}

Chain::BlockDecode Chain::demodulate_block(const ComplexVec& time_payload, const FreqResponse& est,
                                           const IterativeDetector& detector) const {
    const int n = cfg_.fft_size;
    if (static_cast<int>(time_payload.size()) != n)
        throw InvalidInput("block length must equal the FFT size");
    BlockDecode out;

    Fft& fft = thread_fft(static_cast<std::size_t>(n));
    ComplexVec r = fft.forward(time_payload);
    ComplexVec eq = equalize_one_tap(r, est, &out.erased_bins);

    ComplexVec yq;
    if (cfg_.scheme == Scheme::mc_nofs) {
        yq = fft.inverse(eq);
    } else {
        yq = truncate_symmetric(fftshift(eq), cfg_.compressed_symbols);
    }
    const double inv_scale = 1.0 / tx_scale_;
    for (auto& x : yq) x *= inv_scale;

    RealVec soft = pair_.inverse.apply(pack_complex_to_real(yq));
    Eigen::Map<Eigen::VectorXd>(soft.data(), static_cast<Eigen::Index>(soft.size())) -=
        detector_bias_;

    RealVec detected(soft.size());
    detector.detect(soft.data(), detected.data());

    out.soft_symbols = unpack_real_to_complex(detected);
    const ComplexVec sliced = hard_slice(out.soft_symbols, cfg_.qam_order);
    out.evm_db = evm_db(out.soft_symbols, sliced);
    return out;
}

IterativeDetector Chain::make_detector(DetectorConfig det) const {
    det.qam_order = cfg_.qam_order;
    if (det.mode == DetectionMode::hard) det.iterations = 1;
    if (det.mode == DetectionMode::hard) {
        // hard mode slices the matched-filter output directly: cancel nothing
        TransformPair id = make_identity_pair(cfg_.data_symbols);
        return {id, det};
    }
    return {pair_, det};
}

TxBlockSet tx(const WaveformConfig& cfg, const BitStream& bits, const TransformPair* pair) {
    cfg.validate();
    const Chain chain(cfg, pair);
    const int bpb = cfg.bits_per_block();
    if (bits.size() % static_cast<std::size_t>(bpb) != 0)
        throw InvalidInput("bit count must be a multiple of bits per block");
    const std::size_t n_data = bits.size() / static_cast<std::size_t>(bpb);

    TxBlockSet out;
    out.tx_bits = bits;
    std::size_t bit_pos = 0;
    std::size_t block_index = 0;
    std::size_t data_done = 0;
    const bool pilots = cfg.pilot_period > 0;

    auto emit = [&](const ComplexVec& payload, bool is_pilot) {
        const int cp_len = cfg.cp.len_for_block(block_index);
        out.block_boundaries.push_back(out.time_samples.size());
        out.pilot_flags.push_back(is_pilot ? 1 : 0);
        ComplexVec blk = add_cp(payload, cp_len);
        out.time_samples.insert(out.time_samples.end(), blk.begin(), blk.end());
        ++block_index;
    };

    while (data_done < n_data) {
        if (pilots && (data_done % static_cast<std::size_t>(cfg.pilot_period) == 0))
            emit(chain.pilot_time(), true);
        BitStream blk_bits(bits.begin() + static_cast<std::ptrdiff_t>(bit_pos),
                           bits.begin() + static_cast<std::ptrdiff_t>(bit_pos + bpb));
        bit_pos += static_cast<std::size_t>(bpb);
        emit(chain.modulate_block(qam_modulate(blk_bits, cfg.qam_order)), false);
        ++data_done;
    }
    return out;
}

RxResult rx(const WaveformConfig& cfg, const ComplexVec& samples, const TransformPair* pair,
            const FreqResponse& est, const DetectorConfig& det) {
    cfg.validate();
    if (static_cast<int>(est.d.size()) != cfg.fft_size)
        throw InvalidInput("estimate length must equal the FFT size");
    const Chain chain(cfg, pair);
    const IterativeDetector detector = chain.make_detector(det);

    RxResult out;
    std::size_t pos = 0;
    std::size_t block_index = 0;
    std::size_t data_since_pilot = 0;
    const bool pilots = cfg.pilot_period > 0;
    bool expect_pilot = pilots;

    while (pos < samples.size()) {
        const int cp_len = cfg.cp.len_for_block(block_index);
        const std::size_t total = static_cast<std::size_t>(cp_len + cfg.fft_size);
        if (pos + total > samples.size())
            throw InvalidInput("sample stream does not align to block boundaries");
        ComplexVec blk(samples.begin() + static_cast<std::ptrdiff_t>(pos),
                       samples.begin() + static_cast<std::ptrdiff_t>(pos + total));
        pos += total;
        ++block_index;

        const bool is_pilot = expect_pilot;
        if (is_pilot) {
            expect_pilot = false;
            data_since_pilot = 0;
            continue;  // known block, nothing to recover
        }
        ComplexVec payload = remove_cp(blk, cp_len);
        auto dec = chain.demodulate_block(payload, est, detector);
        BitStream bits = qam_hard_demod(dec.soft_symbols, cfg.qam_order);
        out.bits.insert(out.bits.end(), bits.begin(), bits.end());
        out.diagnostics.block_evm_db.push_back(dec.evm_db);
        out.diagnostics.erased_bins += dec.erased_bins;
        out.diagnostics.soft_symbols.insert(out.diagnostics.soft_symbols.end(),
                                            dec.soft_symbols.begin(), dec.soft_symbols.end());
        ++data_since_pilot;
        if (pilots && data_since_pilot == static_cast<std::size_t>(cfg.pilot_period))
            expect_pilot = true;
    }
    return out;
}

ComplexVec add_cp(const ComplexVec& block, int cp_len) {
    if (cp_len < 0 || cp_len >= static_cast<int>(block.size()))
        throw InvalidInput("cyclic prefix must satisfy 0 <= L < block length");
    ComplexVec out;
    out.reserve(block.size() + static_cast<std::size_t>(cp_len));
    out.insert(out.end(), block.end() - cp_len, block.end());
    out.insert(out.end(), block.begin(), block.end());
    return out;
}

ComplexVec remove_cp(const ComplexVec& block, int cp_len) {
    if (cp_len < 0 || static_cast<std::size_t>(cp_len) >= block.size())
        throw InvalidInput("cyclic prefix longer than the block");
    return {block.begin() + cp_len, block.end()};
}

ComplexVec sync_sequence(int length, std::uint64_t seed) {
    if (length < 1) throw InvalidInput("sync length must be >= 1");
    // Even-length Zadoff-Chu style chirp; any odd root is coprime with an
    // even length, which keeps the zero-autocorrelation property.
    const std::uint64_t root = 2 * (seed % static_cast<std::uint64_t>(std::max(length / 2, 1))) + 1;
    ComplexVec out(static_cast<std::size_t>(length));
    for (int n = 0; n < length; ++n) {
        const double a = -kPi * static_cast<double>(root) * static_cast<double>(n) *
                         static_cast<double>(n) / static_cast<double>(length);
        out[static_cast<std::size_t>(n)] = {std::cos(a), std::sin(a)};
    }
    return out;
}

std::size_t synchronize(const ComplexVec& stream, const ComplexVec& sync_seq, double threshold) {
    if (stream.size() <= sync_seq.size())
        throw InvalidInput("stream must be longer than the sync sequence");
    const std::size_t l = sync_seq.size();
    double sync_energy = 0.0;
    for (const auto& x : sync_seq) sync_energy += std::norm(x);

    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i + l <= stream.size(); ++i) {
        cplx corr(0.0, 0.0);
        double window_energy = 0.0;
        for (std::size_t k = 0; k < l; ++k) {
            corr += std::conj(sync_seq[k]) * stream[i + k];
            window_energy += std::norm(stream[i + k]);
        }
        const double denom = std::sqrt(sync_energy * window_energy);
        const double metric = denom > 0.0 ? std::abs(corr) / denom : 0.0;
        if (metric > best) {
            best = metric;
            best_idx = i;
        }
    }
    if (best < threshold)
        throw SyncFailure("no synchronization peak above threshold", best);
    return best_idx;
}

void FrameConfig::validate() const {
    if (frame_duration_s <= 0.0) throw ConfigError("frame duration must be positive");
    if (guard_gap_s < 0.0) throw ConfigError("guard gap must be non-negative");
    if (subframes < 1) throw ConfigError("frame must contain at least one subframe");
}

FrameOutput build_frame(const FrameConfig& fcfg, const WaveformConfig& cfg,
                        const std::vector<const TxBlockSet*>& payload) {
    fcfg.validate();
    const double fs = cfg.sample_rate_hz;
    if (fs <= 0.0) throw ConfigError("sample rate must be positive");
    const auto frame_samples = static_cast<std::size_t>(std::llround(fcfg.frame_duration_s * fs));
    const auto guard_samples = static_cast<std::size_t>(std::floor(fcfg.guard_gap_s * fs));
    if (guard_samples >= frame_samples) throw ConfigError("guard gap exceeds the frame");

    std::size_t payload_samples = 0;
    for (const auto* p : payload) payload_samples += p->time_samples.size();
    const std::size_t sync_len = static_cast<std::size_t>(cfg.sync_len);
    const std::size_t available = frame_samples - guard_samples;
    if (sync_len + payload_samples > available)
        throw FrameCapacityError("payload does not fit in the frame",
                                 sync_len + payload_samples, available);

    FrameOutput out;
    out.samples.assign(frame_samples, cplx(0.0, 0.0));
    const ComplexVec sync = sync_sequence(cfg.sync_len, kPilotSeed);
    std::copy(sync.begin(), sync.end(), out.samples.begin());
    std::size_t pos = sync_len;
    out.schedule.payload_offset = pos;
    for (const auto* p : payload) {
        std::copy(p->time_samples.begin(), p->time_samples.end(),
                  out.samples.begin() + static_cast<std::ptrdiff_t>(pos));
        pos += p->time_samples.size();
    }
    out.schedule.guard_offset = frame_samples - guard_samples;
    out.schedule.exact_guard_s = fcfg.guard_gap_s;
    for (int i = 0; i < fcfg.subframes; ++i)
        out.schedule.subframe_offsets.push_back(frame_samples * static_cast<std::size_t>(i) /
                                                static_cast<std::size_t>(fcfg.subframes));
    return out;
}

}  // namespace wavelab
