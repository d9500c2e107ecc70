#include "wavelab/montecarlo.hpp"

#include <omp.h>

#include <cmath>

#include "wavelab/fft.hpp"
#include "wavelab/metrics.hpp"

namespace wavelab {

namespace {

struct SuperblockPartial {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double evm_err = 0.0;
    double evm_ref = 0.0;
};

struct RunContext {
    const BerRunSpec& spec;
    Chain chain;
    IterativeDetector detector;
    AwgnSpec awgn;
    int blocks_per_superblock;
    std::uint64_t n_superblocks;

    RunContext(const BerRunSpec& s)
        : spec(s), chain(s.wf, s.pair), detector(chain.make_detector(s.det)) {
        s.channel.validate();
        awgn.ebn0_db = s.ebn0_db;
        awgn.bits_per_symbol = qam_bits_per_symbol(s.wf.qam_order);
        awgn.alpha_rate = s.wf.rate_alpha();
        awgn.include_cp_overhead = s.include_cp_overhead;
        const double cp_avg = s.wf.cp.average_len();
        awgn.cp_overhead_factor =
            static_cast<double>(s.wf.fft_size) / (static_cast<double>(s.wf.fft_size) + cp_avg);
        awgn.signal_power = 1.0;  // chains normalize payload power

        blocks_per_superblock = s.wf.pilot_period > 0 ? s.wf.pilot_period : 16;
        const std::uint64_t bits_per_sb =
            static_cast<std::uint64_t>(s.wf.bits_per_block()) *
            static_cast<std::uint64_t>(blocks_per_superblock);
        n_superblocks = (s.target_bits + bits_per_sb - 1) / bits_per_sb;
    }

    SuperblockPartial process(std::uint64_t sb) const {
        SuperblockPartial part;
        SeededRng rng(SeededRng::derive(spec.seed, sb));
        const int n = spec.wf.fft_size;
        const bool channel_active = !spec.channel.is_identity();
        const TapRealization taps = draw_taps(spec.channel, sb);

        FreqResponse est = FreqResponse::flat(n);
        if (spec.est == EstimationMode::ideal) {
            if (channel_active) est.d = channel_freq_response(taps, n);
        } else {
            // one full pilot block per superblock
            const int cp_len = spec.wf.cp.len_for_block(0);
            ComplexVec p = add_cp(chain.pilot_time(), cp_len);
            if (channel_active) p = apply_fir(p, taps);
            if (spec.est == EstimationMode::pilot) add_awgn_inplace(p, awgn, rng);
            ComplexVec rx_grid =
                thread_fft(static_cast<std::size_t>(n)).forward(remove_cp(p, cp_len));
            est = estimate_one_tap(rx_grid, chain.pilot_freq_grid()).response;
        }

        const int bpb = spec.wf.bits_per_block();
        for (int b = 0; b < blocks_per_superblock; ++b) {
            const BitStream bits = rng.bits(static_cast<std::size_t>(bpb));
            const ComplexVec symbols = qam_modulate(bits, spec.wf.qam_order);
            const int cp_len = spec.wf.cp.len_for_block(static_cast<std::size_t>(b));
            ComplexVec blk = add_cp(chain.modulate_block(symbols), cp_len);
            if (channel_active) blk = apply_fir(blk, taps);
            add_awgn_inplace(blk, awgn, rng);
            const auto dec =
                chain.demodulate_block(remove_cp(blk, cp_len), est, detector);
            const BitStream rx_bits = qam_hard_demod(dec.soft_symbols, spec.wf.qam_order);
            part.errors += count_bit_errors(bits, rx_bits);
            part.bits += static_cast<std::uint64_t>(bpb);
            if (spec.collect_evm) {
                for (std::size_t i = 0; i < symbols.size(); ++i) {
                    part.evm_err += std::norm(dec.soft_symbols[i] - symbols[i]);
                    part.evm_ref += std::norm(symbols[i]);
                }
            }
        }
        return part;
    }
};

BerPointResult reduce(const RunContext& ctx, const std::vector<SuperblockPartial>& parts) {
    BerPointResult out;
    double evm_err = 0.0, evm_ref = 0.0;
    for (const auto& p : parts) {
        out.bits += p.bits;
        out.errors += p.errors;
        evm_err += p.evm_err;
        evm_ref += p.evm_ref;
    }
    const auto ci = wilson_interval(out.errors, out.bits);
    out.ci_low = ci.first;
    out.ci_high = ci.second;
    if (ctx.spec.collect_evm && evm_ref > 0.0) {
        const double ratio = evm_err / evm_ref;
        out.evm_db = ratio < std::pow(10.0, kEvmFloorDb / 10.0) ? kEvmFloorDb
                                                                : linear_to_db(ratio);
    }
    return out;
}

}  // namespace

EstimationMode estimation_mode_from_name(const std::string& name) {
    if (name == "ideal") return EstimationMode::ideal;
    if (name == "pilot") return EstimationMode::pilot;
    if (name == "pilot_noise_free") return EstimationMode::pilot_noise_free;
    throw ConfigError("unknown estimation mode: " + name);
}

const char* estimation_mode_name(EstimationMode m) {
    switch (m) {
        case EstimationMode::ideal: return "ideal";
        case EstimationMode::pilot: return "pilot";
        case EstimationMode::pilot_noise_free: return "pilot_noise_free";
    }
    return "?";
}

BerPointResult run_ber_point(const BerRunSpec& spec, int jobs) {
    RunContext ctx(spec);
    const auto n_sb = static_cast<std::int64_t>(ctx.n_superblocks);
    std::vector<SuperblockPartial> parts(ctx.n_superblocks);
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t sb = 0; sb < n_sb; ++sb)
        parts[static_cast<std::size_t>(sb)] = ctx.process(static_cast<std::uint64_t>(sb));
    return reduce(ctx, parts);
}

BerPointResult run_ber_point_serial(const BerRunSpec& spec) {
    RunContext ctx(spec);
    std::vector<SuperblockPartial> parts(ctx.n_superblocks);
    for (std::uint64_t sb = 0; sb < ctx.n_superblocks; ++sb)
        parts[static_cast<std::size_t>(sb)] = ctx.process(sb);
    return reduce(ctx, parts);
}

std::vector<double> papr_samples(const WaveformConfig& cfg, const TransformPair* pair,
                                 std::size_t n_blocks, std::uint64_t seed, int oversample,
                                 int jobs) {
    const Chain chain(cfg, pair);
    std::vector<double> out(n_blocks);
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
    const auto nb = static_cast<std::int64_t>(n_blocks);
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
    for (std::int64_t i = 0; i < nb; ++i) {
        SeededRng rng(SeededRng::derive(seed, static_cast<std::uint64_t>(i)));
        const BitStream bits = rng.bits(static_cast<std::size_t>(cfg.bits_per_block()));
        const ComplexVec block = chain.modulate_block(qam_modulate(bits, cfg.qam_order));
        out[static_cast<std::size_t>(i)] = block_papr_db(block, oversample);
    }
    return out;
}

std::vector<double> papr_samples_serial(const WaveformConfig& cfg, const TransformPair* pair,
                                        std::size_t n_blocks, std::uint64_t seed, int oversample) {
    const Chain chain(cfg, pair);
    std::vector<double> out(n_blocks);
    for (std::size_t i = 0; i < n_blocks; ++i) {
        SeededRng rng(SeededRng::derive(seed, i));
        const BitStream bits = rng.bits(static_cast<std::size_t>(cfg.bits_per_block()));
        const ComplexVec block = chain.modulate_block(qam_modulate(bits, cfg.qam_order));
        out[i] = block_papr_db(block, oversample);
    }
    return out;
}

ComplexVec generate_stream(const WaveformConfig& cfg, const TransformPair* pair,
                           std::size_t n_blocks, std::uint64_t seed) {
    SeededRng rng(seed);
    const BitStream bits =
        rng.bits(n_blocks * static_cast<std::size_t>(cfg.bits_per_block()));
    return tx(cfg, bits, pair).time_samples;
}

}  // namespace wavelab
