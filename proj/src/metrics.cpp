#include "wavelab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "wavelab/chains.hpp"
#include "wavelab/fft.hpp"
#include "wavelab/numerics.hpp"

namespace wavelab {

std::uint64_t count_bit_errors(const BitStream& tx_bits, const BitStream& rx_bits) {
    if (tx_bits.size() != rx_bits.size()) throw InvalidInput("bit stream length mismatch");
    std::uint64_t e = 0;
    for (std::size_t i = 0; i < tx_bits.size(); ++i) e += tx_bits[i] != rx_bits[i];
    return e;
}

double ber(const BitStream& tx_bits, const BitStream& rx_bits) {
    if (tx_bits.empty()) throw InvalidInput("empty bit stream");
    return static_cast<double>(count_bit_errors(tx_bits, rx_bits)) /
           static_cast<double>(tx_bits.size());
}

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, (centre - half) / denom), std::min(1.0, (centre + half) / denom)};
}

double qpsk_awgn_ber(double ebn0_db) {
    const double x = std::sqrt(2.0 * db_to_linear(ebn0_db));
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double evm_db(const ComplexVec& rx, const ComplexVec& ref) {
    if (rx.size() != ref.size()) throw InvalidInput("EVM length mismatch");
    const double pref = mean_power(ref);
    if (pref <= 0.0) throw InvalidInput("EVM reference has zero power");
    double err = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) err += std::norm(rx[i] - ref[i]);
    err /= static_cast<double>(rx.size());
    const double ratio = err / pref;
    if (ratio < std::pow(10.0, kEvmFloorDb / 10.0)) return kEvmFloorDb;
    return linear_to_db(ratio);
}

double block_papr_db(const ComplexVec& time_block, int oversample) {
    if (time_block.empty()) throw InvalidInput("empty PAPR block");
    const std::size_t n = time_block.size();
    ComplexVec x;
    if (oversample > 1) {
        Fft& fft_n = thread_fft(n);
        ComplexVec grid = fftshift(fft_n.forward(time_block));
        grid = zero_pad_symmetric(grid, static_cast<int>(n) * oversample);
        Fft& fft_os = thread_fft(n * static_cast<std::size_t>(oversample));
        x = fft_os.inverse(ifftshift(grid));
    } else {
        x = time_block;
    }
    double peak = 0.0, mean = 0.0;
    for (const auto& v : x) {
        const double p = std::norm(v);
        peak = std::max(peak, p);
        mean += p;
    }
    mean /= static_cast<double>(x.size());
    if (mean <= 0.0) throw InvalidInput("PAPR block has zero power");
    return linear_to_db(peak / mean);
}

std::vector<std::pair<double, double>> papr_ccdf(const std::vector<double>& papr_db,
                                                 const std::vector<double>& thresholds_db) {
    if (papr_db.empty()) throw InvalidInput("no PAPR samples");
    std::vector<std::pair<double, double>> out;
    out.reserve(thresholds_db.size());
    for (const double t : thresholds_db) {
        std::size_t above = 0;
        for (const double v : papr_db) above += v > t;
        out.emplace_back(t, static_cast<double>(above) / static_cast<double>(papr_db.size()));
    }
    return out;
}

double papr_at_ccdf(std::vector<double> papr_db, double ccdf) {
    if (papr_db.empty()) throw InvalidInput("no PAPR samples");
    if (ccdf <= 0.0 || ccdf >= 1.0) throw InvalidInput("ccdf must be in (0,1)");
    std::sort(papr_db.begin(), papr_db.end());
    const auto idx = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(papr_db.size()) - 1.0,
                         std::ceil((1.0 - ccdf) * static_cast<double>(papr_db.size()))));
    return papr_db[idx];
}

Psd psd_welch(const ComplexVec& samples, int seg_len, double overlap, double sample_rate_hz) {
    if (seg_len < 2 || static_cast<std::size_t>(seg_len) > samples.size())
        throw InvalidInput("segment length must be in [2, sample count]");
    if (overlap < 0.0 || overlap >= 1.0) throw InvalidInput("overlap must be in [0,1)");
    const std::size_t n = static_cast<std::size_t>(seg_len);
    const std::size_t hop =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround((1.0 - overlap) * seg_len)));

    RealVec window(n);
    for (std::size_t i = 0; i < n; ++i)
        window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                          static_cast<double>(n - 1)));

    Fft& fft = thread_fft(n);
    RealVec acc(n, 0.0);
    ComplexVec seg(n), spec(n);
    std::size_t count = 0;
    for (std::size_t start = 0; start + n <= samples.size(); start += hop) {
        for (std::size_t i = 0; i < n; ++i) seg[i] = samples[start + i] * window[i];
        fft.forward(seg.data(), spec.data());
        for (std::size_t i = 0; i < n; ++i) acc[i] += std::norm(spec[i]);
        ++count;
    }
    if (count == 0) throw InvalidInput("no full segment fits the sample stream");

    // centre and normalize to 0 dB peak
    Psd out;
    out.freq_hz.resize(n);
    out.power_db.resize(n);
    const double bin = sample_rate_hz / static_cast<double>(seg_len);
    double peak = 0.0;
    for (double v : acc) peak = std::max(peak, v);
    if (peak <= 0.0) peak = 1.0;
    const std::size_t shift = (n + 1) / 2;  // fftshift
    for (std::size_t i = 0; i < n; ++i) {
        const double p = acc[(i + shift) % n] / peak;
        out.freq_hz[i] = (static_cast<double>(i) - std::floor(static_cast<double>(n) / 2.0)) * bin;
        out.power_db[i] = p > 0.0 ? linear_to_db(p) : -300.0;
    }
    return out;
}

double occupied_bandwidth_hz(const Psd& psd, double threshold_db) {
    const std::size_t n = psd.power_db.size();
    std::size_t first = n, last = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (psd.power_db[i] >= threshold_db) {
            first = std::min(first, i);
            last = std::max(last, i);
        }
    }
    if (first >= n) return 0.0;
    const double bin = n > 1 ? psd.freq_hz[1] - psd.freq_hz[0] : 0.0;
    return (static_cast<double>(last - first) + 1.0) * bin;
}

std::uint64_t real_mult_count(const WaveformConfig& cfg, double prune_ratio) {
    if (prune_ratio < 0.0 || prune_ratio >= 1.0) throw InvalidInput("prune ratio must be in [0,1)");
    const auto m = static_cast<double>(cfg.data_symbols);
    const auto q = static_cast<double>(cfg.compressed_symbols);
    const auto n = static_cast<double>(cfg.fft_size);
    const double stage2 = 2.0 * n * std::log2(n);
    double stage1 = 0.0;
    bool has_stage2 = true;
    switch (cfg.scheme) {
        case Scheme::ofdm: stage1 = 0.0; break;
        case Scheme::sc_ofdm: stage1 = 4.0 * m * m; break;
        case Scheme::sinc_truncated: stage1 = 4.0 * q * m; break;
        case Scheme::sc_nofs: stage1 = 4.0 * q * m * (1.0 - prune_ratio); break;
        case Scheme::mc_nofs:
            stage1 = 4.0 * n * n * (1.0 - prune_ratio);
            has_stage2 = false;
            break;
    }
    return static_cast<std::uint64_t>(std::llround(stage1 + (has_stage2 ? stage2 : 0.0)));
}

LinkRecord link_budget(const WaveformConfig& cfg, const FrameConfig& fcfg) {
    fcfg.validate();
    LinkRecord out;
    const double spacing = cfg.subcarrier_spacing_hz;
    out.occupied_bw_hz = static_cast<double>(cfg.active_bins()) * spacing;
    out.raw_rate_bps = static_cast<double>(cfg.data_symbols) *
                       static_cast<double>(qam_bits_per_symbol(cfg.qam_order)) * spacing;
    const double cp_avg = cfg.cp.average_len();
    out.cp_adjusted_rate_bps =
        out.raw_rate_bps * static_cast<double>(cfg.fft_size) /
        (static_cast<double>(cfg.fft_size) + cp_avg);
    out.frame_s = fcfg.frame_duration_s;
    out.guard_s = fcfg.guard_gap_s;
    return out;
}

}  // namespace wavelab
