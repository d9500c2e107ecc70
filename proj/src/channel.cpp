#include "wavelab/channel.hpp"

#include <algorithm>
#include <cmath>

#include "wavelab/numerics.hpp"

namespace wavelab {

int ChannelSpec::max_delay() const {
    int d = 0;
    for (const auto& t : taps) d = std::max(d, t.delay);
    return d;
}

double ChannelSpec::total_power() const {
    double p = 0.0;
    for (const auto& t : taps) p += std::norm(t.gain);
    return p;
}

bool ChannelSpec::is_identity() const {
    return fading == FadingMode::static_taps && taps.size() == 1 && taps[0].delay == 0 &&
           std::abs(taps[0].gain - cplx(1.0, 0.0)) < 1e-15;
}

void ChannelSpec::validate() const {
    if (taps.empty()) throw InvalidInput("channel tap list must not be empty");
    int prev = -1;
    for (const auto& t : taps) {
        if (t.delay < 0) throw InvalidInput("tap delays must be non-negative");
        if (t.delay <= prev) throw InvalidInput("tap delays must be strictly increasing");
        prev = t.delay;
    }
    if (fading == FadingMode::rayleigh_block && fading_block_len < 1)
        throw InvalidInput("fading block length must be >= 1");
}

ChannelSpec ChannelSpec::profile_a() {
    ChannelSpec s;
    s.taps = {{0, {0.8765, 0.0}}, {1, {-0.2279, 0.0}}, {4, {0.1315, 0.0}}, {7, {0.0, -0.4032}}};
    return s;
}

ChannelSpec ChannelSpec::profile_b() {
    ChannelSpec s;
    s.taps = {{0, {0.6965, 0.0}},
              {1, {-0.3279, 0.0}},
              {3, {0.1765, 0.0}},
              {5, {0.5991, 0.0}},
              {7, {0.1315, 0.0}}};
    return s;
}

TapRealization draw_taps(const ChannelSpec& spec, std::uint64_t fading_block_index) {
    spec.validate();
    double scale = 1.0;
    if (spec.normalize_power) {
        const double p = spec.total_power();
        if (p > 0.0) scale = 1.0 / std::sqrt(p);
    }
    TapRealization out = spec.taps;
    if (spec.fading == FadingMode::static_taps) {
        for (auto& t : out) t.gain *= scale;
        return out;
    }
    SeededRng rng(SeededRng::derive(spec.seed, fading_block_index));
    for (auto& t : out) {
        const double mag = std::abs(t.gain) * scale;
        // magnitude from the profile, phase and fade from the draw; E|g|^2 = mag^2
        const cplx g(rng.normal(), rng.normal());
        t.gain = mag * g / std::sqrt(2.0);
    }
    return out;
}

ComplexVec apply_fir(const ComplexVec& samples, const TapRealization& taps) {
    if (taps.empty()) throw InvalidInput("channel tap list must not be empty");
    ComplexVec out(samples.size(), cplx(0.0, 0.0));
    for (const auto& t : taps) {
        const std::size_t d = static_cast<std::size_t>(t.delay);
        if (d >= samples.size()) continue;
        for (std::size_t i = d; i < samples.size(); ++i) out[i] += t.gain * samples[i - d];
    }
    return out;
}

ComplexVec apply_fir(const ComplexVec& samples, const ChannelSpec& spec) {
    return apply_fir(samples, draw_taps(spec, 0));
}

double AwgnSpec::noise_variance() const {
    double rate = static_cast<double>(bits_per_symbol) * alpha_rate;
    if (include_cp_overhead) rate *= cp_overhead_factor;
    return signal_power / (db_to_linear(ebn0_db) * rate);
}

void add_awgn_inplace(ComplexVec& samples, const AwgnSpec& spec, SeededRng& rng) {
    if (std::isinf(spec.ebn0_db)) return;
    const double var = spec.noise_variance();
    for (auto& x : samples) x += rng.normal_complex(var);
}

ComplexVec add_awgn(const ComplexVec& samples, const AwgnSpec& spec, SeededRng& rng) {
    ComplexVec out = samples;
    add_awgn_inplace(out, spec, rng);
    return out;
}

ComplexVec channel_freq_response(const TapRealization& taps, int n) {
    ComplexVec d(static_cast<std::size_t>(n), cplx(0.0, 0.0));
    for (const auto& t : taps) {
        if (t.delay >= n) throw InvalidInput("tap delay must be shorter than the FFT size");
        for (int k = 0; k < n; ++k) {
            const double a = -2.0 * kPi * static_cast<double>(k) * static_cast<double>(t.delay) /
                             static_cast<double>(n);
            d[static_cast<std::size_t>(k)] += t.gain * cplx(std::cos(a), std::sin(a));
        }
    }
    return d;
}

ComplexVec channel_freq_response(const ChannelSpec& spec, int n) {
    return channel_freq_response(draw_taps(spec, 0), n);
}

}  // namespace wavelab
