#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wavelab/numerics.hpp"
#include "wavelab/types.hpp"

namespace wavelab {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using MaskMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

enum class DftDirection { forward, inverse };

/// Unitary DFT matrix (1/sqrt(n) both directions). forward uses the
/// negative exponent, inverse its conjugate; forward * inverse == identity.
ComplexMatrix dft_matrix(int n, DftDirection direction);

/// Real 2K x 2L block embedding of a complex K x L matrix:
/// [[Re G, -Im G], [Im G, Re G]]. Satisfies
/// real_block_of(G) * pack(v) == pack(G * v).
RealMatrix real_block_of(const ComplexMatrix& g);

enum class Activation : std::uint8_t { linear = 0 };

/// Real affine map with a per-connection prune mask: out = (W .* mask) s + b.
/// Immutable after construction; the masked weight matrix is cached, so
/// apply() is safe to call from parallel workers.
class LinearTransform {
public:
    LinearTransform(RealMatrix weights, Eigen::VectorXd bias,
                    Activation activation = Activation::linear);
    LinearTransform(RealMatrix weights, Eigen::VectorXd bias, MaskMatrix mask,
                    Activation activation);

    Eigen::Index rows() const { return weights_.rows(); }
    Eigen::Index cols() const { return weights_.cols(); }
    const RealMatrix& weights() const { return weights_; }
    const Eigen::VectorXd& bias() const { return bias_; }
    const MaskMatrix& mask() const { return mask_; }
    Activation activation() const { return activation_; }

    /// weights with the prune mask applied.
    const RealMatrix& effective() const { return effective_; }

    RealVec apply(const RealVec& s) const;
    void apply(const double* in, double* out) const;

    /// Fraction of connections removed by the mask.
    double prune_ratio() const;

    static LinearTransform identity(int n);

private:
    RealMatrix weights_;
    Eigen::VectorXd bias_;
    MaskMatrix mask_;
    Activation activation_;
    RealMatrix effective_;
};

/// New transform with mask[i,j] cleared exactly where
/// |weights[i,j]| < threshold * max|weights|. Weights are untouched.
LinearTransform prune(const LinearTransform& t, double threshold);

struct PairMeta {
    std::uint32_t data_symbols = 0;     // M
    std::uint32_t compressed_symbols = 0;  // Q
    std::uint32_t fft_size = 0;         // N the pair was trained for (0 = unspecified)
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;
};

/// Forward (2Q x 2M) and inverse (2M x 2Q) transforms of a two-stage chain.
struct TransformPair {
    LinearTransform forward;
    LinearTransform inverse;
    int data_symbols;        // M
    int compressed_symbols;  // Q
    PairMeta meta;

    double compression_factor() const {
        return static_cast<double>(compressed_symbols) / static_cast<double>(data_symbols);
    }
    void validate() const;

    /// Effective symbol-domain correlation inverse*forward (2M x 2M), biases
    /// excluded. This is what the iterative detector cancels against.
    RealMatrix correlation() const { return inverse.effective() * forward.effective(); }
};

/// Identity pair (plain OFDM mapping), Q = M.
TransformPair make_identity_pair(int m);

/// DFT-precoder pair (classic DFT-spread chain), Q = M.
TransformPair make_dft_precoder_pair(int m);

/// DFT precoder keeping only the Q outputs closest to DC (in centred
/// spectral order); inverse is the adjoint. The fixed-shape truncation
/// baseline that trained pairs are compared against.
TransformPair make_sinc_truncated_pair(int m, int q);

/// Full-size multicarrier generator with subcarrier spacing compressed by
/// alpha: G(n,k) = exp(+2*pi*i*n*k*alpha/N)/sqrt(N); inverse is the adjoint.
/// alpha = 1 reduces to the unitary inverse DFT.
TransformPair make_mc_pair(int n, double alpha);

/// Natural-order DFT output indices kept when a length-m spectrum is
/// truncated to its q centre bins (in fftshifted order). Shared by the
/// truncation baseline and warm-started training so both sides agree.
std::vector<int> center_kept_indices(int m, int q);

/// Payload placed on q contiguous centre positions of an n-length centred
/// grid; with odd n-q the extra zero trails. Energy preserved exactly.
ComplexVec zero_pad_symmetric(const ComplexVec& v, int n);

/// Exact left inverse of zero_pad_symmetric on its image.
ComplexVec truncate_symmetric(const ComplexVec& v, int q);

struct IrsincResponse {
    std::vector<double> magnitude;  // oversampled |spectrum|, peak-normalized
    bool degenerate = false;        // all-zero row, normalization skipped
};

/// Magnitude spectrum of the complex reconstruction of one transform row
/// (the per-subcarrier shaping realized by that row), oversampled and
/// normalized to peak 1. Shape inspection only.
IrsincResponse irsinc_response(const LinearTransform& t, int row_index, int oversample);

// Eigen <-> flat vector bridges.
Eigen::Map<const Eigen::VectorXd> as_eigen(const RealVec& v);
RealVec from_eigen(const Eigen::VectorXd& v);

}  // namespace wavelab
