#include "wavelab/numerics.hpp"

#include <array>
#include <cmath>

namespace wavelab {

namespace {

// Per-axis Gray maps. First bit is the sign (0 positive), remaining bits
// select the magnitude level so that neighbouring levels differ in one bit.
struct AxisMap {
    int bits;
    double scale;              // 1/sqrt(mean symbol energy)
    std::array<double, 4> level;  // indexed by magnitude bits
};

const AxisMap& axis_map(int order) {
    static const AxisMap qpsk{1, 1.0 / std::sqrt(2.0), {1.0, 0, 0, 0}};
    // magnitude bits: 0 -> 1, 1 -> 3
    static const AxisMap qam16{2, 1.0 / std::sqrt(10.0), {1.0, 3.0, 0, 0}};
    // magnitude bits (b1 b2): 00 -> 1, 01 -> 3, 11 -> 5, 10 -> 7 (reflected Gray)
    static const AxisMap qam64{3, 1.0 / std::sqrt(42.0), {1.0, 3.0, 5.0, 7.0}};
    switch (order) {
        case 4: return qpsk;
        case 16: return qam16;
        case 64: return qam64;
        default: throw ConfigError("unsupported QAM order " + std::to_string(order));
    }
}

double axis_modulate(const AxisMap& m, const std::uint8_t* b) {
    const double sign = b[0] ? -1.0 : 1.0;
    int idx = 0;
    if (m.bits == 2) {
        idx = b[1];
    } else if (m.bits == 3) {
        // 00 -> 0(level 1), 01 -> 1(level 3), 11 -> 2(level 5), 10 -> 3(level 7)
        const int p = (b[1] << 1) | b[2];
        static const int lut[4] = {0, 1, 3, 2};
        idx = lut[p];
    }
    return sign * m.level[static_cast<std::size_t>(idx)] * m.scale;
}

void axis_demod(const AxisMap& m, double x, std::uint8_t* b) {
    b[0] = x < 0.0 ? 1 : 0;
    const double a = std::abs(x) / m.scale;
    int idx = 0;
    const int nlevels = 1 << (m.bits - 1);
    double best = 1e300;
    for (int i = 0; i < nlevels; ++i) {
        const double d = std::abs(a - m.level[static_cast<std::size_t>(i)]);
        if (d < best) {
            best = d;
            idx = i;
        }
    }
    if (m.bits == 2) {
        b[1] = static_cast<std::uint8_t>(idx);
    } else if (m.bits == 3) {
        static const int lut[4] = {0, 1, 3, 2};  // level index -> bit pattern
        b[1] = static_cast<std::uint8_t>(lut[idx] >> 1);
        b[2] = static_cast<std::uint8_t>(lut[idx] & 1);
    }
}

double axis_slice(const AxisMap& m, double x) {
    const double a = std::abs(x) / m.scale;
    const int nlevels = 1 << (m.bits - 1);
    double best = 1e300, lvl = m.level[0];
    for (int i = 0; i < nlevels; ++i) {
        const double d = std::abs(a - m.level[static_cast<std::size_t>(i)]);
        if (d < best) {
            best = d;
            lvl = m.level[static_cast<std::size_t>(i)];
        }
    }
    return (x < 0.0 ? -lvl : lvl) * m.scale;
}

}  // namespace

int qam_bits_per_symbol(int order) {
    switch (order) {
        case 4: return 2;
        case 16: return 4;
        case 64: return 6;
        default: throw ConfigError("unsupported QAM order " + std::to_string(order));
    }
}

double qam_axis_limit(int order) {
    const AxisMap& m = axis_map(order);
    const int nlevels = 1 << (m.bits - 1);
    return m.level[static_cast<std::size_t>(nlevels - 1)] * m.scale;
}

ComplexVec qam_modulate(const BitStream& bits, int order) {
    const int k = qam_bits_per_symbol(order);
    if (bits.size() % static_cast<std::size_t>(k) != 0)
        throw InvalidInput("bit count not a multiple of bits per symbol");
    const AxisMap& m = axis_map(order);
    ComplexVec out(bits.size() / static_cast<std::size_t>(k));
    const std::uint8_t* p = bits.data();
    for (auto& s : out) {
        const double re = axis_modulate(m, p);
        const double im = axis_modulate(m, p + m.bits);
        s = {re, im};
        p += k;
    }
    return out;
}

BitStream qam_hard_demod(const ComplexVec& symbols, int order) {
    const int k = qam_bits_per_symbol(order);
    const AxisMap& m = axis_map(order);
    BitStream out(symbols.size() * static_cast<std::size_t>(k));
    std::uint8_t* p = out.data();
    for (const auto& s : symbols) {
        axis_demod(m, s.real(), p);
        axis_demod(m, s.imag(), p + m.bits);
        p += k;
    }
    return out;
}

ComplexVec hard_slice(const ComplexVec& symbols, int order) {
    const AxisMap& m = axis_map(order);
    ComplexVec out(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i)
        out[i] = {axis_slice(m, symbols[i].real()), axis_slice(m, symbols[i].imag())};
    return out;
}

ComplexVec qam_constellation(int order) {
    const int k = qam_bits_per_symbol(order);
    ComplexVec pts(static_cast<std::size_t>(order));
    BitStream b(static_cast<std::size_t>(k));
    for (int v = 0; v < order; ++v) {
        for (int j = 0; j < k; ++j) b[static_cast<std::size_t>(j)] = (v >> (k - 1 - j)) & 1;
        pts[static_cast<std::size_t>(v)] = qam_modulate(b, order)[0];
    }
    return pts;
}

RealVec pack_complex_to_real(const ComplexVec& v) {
    const std::size_t k = v.size();
    RealVec out(2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = v[i].real();
        out[k + i] = v[i].imag();
    }
    return out;
}

ComplexVec unpack_real_to_complex(const RealVec& v) {
    if (v.size() % 2 != 0) throw InvalidInput("packed real vector must have even length");
    const std::size_t k = v.size() / 2;
    ComplexVec out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = {v[i], v[k + i]};
    return out;
}

double mean_power(const ComplexVec& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& x : v) acc += std::norm(x);
    return acc / static_cast<double>(v.size());
}

void assert_finite(const ComplexVec& v, const char* what) {
    for (const auto& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            throw InvalidInput(std::string("non-finite value in ") + what);
}

}  // namespace wavelab
