#pragma once

#include "wavelab/rng.hpp"
#include "wavelab/types.hpp"

namespace wavelab {

/// Bits per symbol for a supported QAM order (4, 16, 64).
int qam_bits_per_symbol(int order);

/// Largest per-dimension constellation amplitude (e.g. 1/sqrt(2) for QPSK).
/// Used as the soft-clamp limit in iterative detection.
double qam_axis_limit(int order);

/// Gray-mapped square QAM with unit average symbol energy. Bit groups are
/// [I bits..., Q bits...]; for QPSK the map is fixed to
/// 00 -> (+1+1i)/sqrt(2), 01 -> (+1-1i)/sqrt(2), 10 -> (-1+1i)/sqrt(2),
/// 11 -> (-1-1i)/sqrt(2).
ComplexVec qam_modulate(const BitStream& bits, int order);

/// Nearest-neighbour hard decisions back to bits. Total: any finite input
/// slices to some constellation point.
BitStream qam_hard_demod(const ComplexVec& symbols, int order);

/// Nearest constellation point per symbol; idempotent.
ComplexVec hard_slice(const ComplexVec& symbols, int order);

/// All constellation points of the order, indexed by the Gray-mapped bit
/// pattern read MSB-first. Exposed for table-driven tests.
ComplexVec qam_constellation(int order);

/// [a+bi, c+di] -> [a, c, b, d] (real parts first, then imaginary parts).
RealVec pack_complex_to_real(const ComplexVec& v);

/// Exact inverse of pack_complex_to_real. Rejects odd-length input.
ComplexVec unpack_real_to_complex(const RealVec& v);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Mean of |x|^2 over the vector.
double mean_power(const ComplexVec& v);

void assert_finite(const ComplexVec& v, const char* what);

}  // namespace wavelab
