#include "wavelab/transforms.hpp"

#include <cmath>

#include "wavelab/fft.hpp"

namespace wavelab {

ComplexMatrix dft_matrix(int n, DftDirection direction) {
    if (n < 1) throw InvalidInput("DFT size must be >= 1");
    const double sign = direction == DftDirection::forward ? -1.0 : 1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    ComplexMatrix w(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            // reduce j*k mod n first so large sizes keep full phase accuracy
            const long long jk = (static_cast<long long>(j) * k) % n;
            const double a = sign * 2.0 * kPi * static_cast<double>(jk) / static_cast<double>(n);
            w(j, k) = cplx(std::cos(a), std::sin(a)) * scale;
        }
    }
    return w;
}

RealMatrix real_block_of(const ComplexMatrix& g) {
    const Eigen::Index k = g.rows(), l = g.cols();
    RealMatrix out(2 * k, 2 * l);
    out.topLeftCorner(k, l) = g.real();
    out.topRightCorner(k, l) = -g.imag();
    out.bottomLeftCorner(k, l) = g.imag();
    out.bottomRightCorner(k, l) = g.real();
    return out;
}

LinearTransform::LinearTransform(RealMatrix weights, Eigen::VectorXd bias, Activation activation)
    : LinearTransform(std::move(weights), std::move(bias),
                      MaskMatrix(), activation) {}

LinearTransform::LinearTransform(RealMatrix weights, Eigen::VectorXd bias, MaskMatrix mask,
                                 Activation activation)
    : weights_(std::move(weights)), bias_(std::move(bias)), mask_(std::move(mask)),
      activation_(activation) {
    if (mask_.size() == 0) mask_ = MaskMatrix::Ones(weights_.rows(), weights_.cols());
    if (bias_.size() != weights_.rows())
        throw InvalidInput("bias length must equal transform rows");
    if (mask_.rows() != weights_.rows() || mask_.cols() != weights_.cols())
        throw InvalidInput("mask shape must equal weight shape");
    effective_ = weights_.cwiseProduct(mask_.cast<double>());
}

RealVec LinearTransform::apply(const RealVec& s) const {
    if (static_cast<Eigen::Index>(s.size()) != cols())
        throw InvalidInput("transform input length mismatch");
    RealVec out(static_cast<std::size_t>(rows()));
    apply(s.data(), out.data());
    return out;
}

void LinearTransform::apply(const double* in, double* out) const {
    Eigen::Map<const Eigen::VectorXd> s(in, cols());
    Eigen::Map<Eigen::VectorXd> o(out, rows());
    o.noalias() = effective_ * s;
    o += bias_;
    // activation tag: linear only, sigma is the identity
}

double LinearTransform::prune_ratio() const {
    const double total = static_cast<double>(mask_.size());
    double active = 0;
    for (Eigen::Index j = 0; j < mask_.cols(); ++j)
        for (Eigen::Index i = 0; i < mask_.rows(); ++i) active += mask_(i, j);
    return (total - active) / total;
}

LinearTransform LinearTransform::identity(int n) {
    return {RealMatrix::Identity(n, n), Eigen::VectorXd::Zero(n)};
}

LinearTransform prune(const LinearTransform& t, double threshold) {
    if (threshold < 0.0 || threshold >= 1.0) throw InvalidInput("prune threshold must be in [0,1)");
    const double wmax = t.weights().cwiseAbs().maxCoeff();
    const double cut = threshold * wmax;
    MaskMatrix mask(t.rows(), t.cols());
    for (Eigen::Index j = 0; j < t.cols(); ++j)
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            mask(i, j) = std::abs(t.weights()(i, j)) < cut ? 0 : 1;
    return {t.weights(), t.bias(), std::move(mask), t.activation()};
}

void TransformPair::validate() const {
    if (forward.cols() != 2 * data_symbols || forward.rows() != 2 * compressed_symbols)
        throw ConfigError("forward transform shape inconsistent with (M, Q)");
    if (inverse.rows() != 2 * data_symbols || inverse.cols() != 2 * compressed_symbols)
        throw ConfigError("inverse transform shape inconsistent with (M, Q)");
    if (compressed_symbols < 1 || compressed_symbols > data_symbols)
        throw ConfigError("compression factor must lie in (0, 1]");
}

TransformPair make_identity_pair(int m) {
    TransformPair p{LinearTransform::identity(2 * m), LinearTransform::identity(2 * m), m, m, {}};
    p.meta.data_symbols = static_cast<std::uint32_t>(m);
    p.meta.compressed_symbols = static_cast<std::uint32_t>(m);
    return p;
}

TransformPair make_dft_precoder_pair(int m) {
    RealMatrix f = real_block_of(dft_matrix(m, DftDirection::forward));
    RealMatrix r = real_block_of(dft_matrix(m, DftDirection::inverse));
    TransformPair p{LinearTransform(std::move(f), Eigen::VectorXd::Zero(2 * m)),
                    LinearTransform(std::move(r), Eigen::VectorXd::Zero(2 * m)), m, m, {}};
    p.meta.data_symbols = static_cast<std::uint32_t>(m);
    p.meta.compressed_symbols = static_cast<std::uint32_t>(m);
    return p;
}

std::vector<int> center_kept_indices(int m, int q) {
    if (q > m || q < 1) throw InvalidInput("kept count must satisfy 1 <= q <= m");
    std::vector<int> idx(static_cast<std::size_t>(q));
    const int start = (m - q) / 2;          // centre run in fftshifted order
    const int unshift = (m + 1) / 2;        // shifted position -> natural DFT index
    for (int j = 0; j < q; ++j) idx[static_cast<std::size_t>(j)] = (start + j + unshift) % m;
    return idx;
}

TransformPair make_sinc_truncated_pair(int m, int q) {
    if (q > m) throw InvalidInput("cannot keep more outputs than the precoder produces");
    const ComplexMatrix f = dft_matrix(m, DftDirection::forward);
    const std::vector<int> kept = center_kept_indices(m, q);
    ComplexMatrix g(q, m);
    for (int j = 0; j < q; ++j) g.row(j) = f.row(kept[static_cast<std::size_t>(j)]);
    RealMatrix fw = real_block_of(g);
    RealMatrix rv = fw.transpose();  // adjoint reconstruction
    TransformPair p{LinearTransform(std::move(fw), Eigen::VectorXd::Zero(2 * q)),
                    LinearTransform(std::move(rv), Eigen::VectorXd::Zero(2 * m)), m, q, {}};
    p.meta.data_symbols = static_cast<std::uint32_t>(m);
    p.meta.compressed_symbols = static_cast<std::uint32_t>(q);
    return p;
}

TransformPair make_mc_pair(int n, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0) throw InvalidInput("spacing compression must be in (0, 1]");
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    ComplexMatrix g(n, n);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < n; ++k) {
            const double a = 2.0 * kPi * alpha * static_cast<double>(r) * static_cast<double>(k) /
                             static_cast<double>(n);
            g(r, k) = cplx(std::cos(a), std::sin(a)) * scale;
        }
    RealMatrix fw = real_block_of(g);
    RealMatrix rv = real_block_of(g.adjoint());
    TransformPair p{LinearTransform(std::move(fw), Eigen::VectorXd::Zero(2 * n)),
                    LinearTransform(std::move(rv), Eigen::VectorXd::Zero(2 * n)), n, n, {}};
    p.meta.data_symbols = static_cast<std::uint32_t>(n);
    p.meta.compressed_symbols = static_cast<std::uint32_t>(n);
    return p;
}

ComplexVec zero_pad_symmetric(const ComplexVec& v, int n) {
    const int q = static_cast<int>(v.size());
    if (q > n) throw InvalidInput("payload longer than target grid");
    ComplexVec out(static_cast<std::size_t>(n), cplx(0.0, 0.0));
    const int start = (n - q) / 2;
    for (int i = 0; i < q; ++i) out[static_cast<std::size_t>(start + i)] = v[static_cast<std::size_t>(i)];
    return out;
}

ComplexVec truncate_symmetric(const ComplexVec& v, int q) {
    const int n = static_cast<int>(v.size());
    if (q > n) throw InvalidInput("cannot truncate to more than the input length");
    const int start = (n - q) / 2;
    return {v.begin() + start, v.begin() + start + q};
}

IrsincResponse irsinc_response(const LinearTransform& t, int row_index, int oversample) {
    if (row_index < 0 || row_index >= t.rows()) throw InvalidInput("row index out of range");
    if (oversample < 4) throw InvalidInput("oversampling factor must be >= 4");
    if (t.cols() % 2 != 0) throw InvalidInput("transform width must be even (packed complex)");
    const std::size_t m = static_cast<std::size_t>(t.cols()) / 2;

    // The row is itself in packed layout: first half real, second half imaginary.
    RealVec row(static_cast<std::size_t>(t.cols()));
    for (Eigen::Index j = 0; j < t.cols(); ++j)
        row[static_cast<std::size_t>(j)] = t.effective()(row_index, j);
    ComplexVec c = unpack_real_to_complex(row);

    const std::size_t nfft = m * static_cast<std::size_t>(oversample);
    ComplexVec padded(nfft, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < m; ++i) padded[i] = c[i];
    ComplexVec spec = thread_fft(nfft).forward(padded);

    IrsincResponse out;
    out.magnitude.resize(nfft);
    double peak = 0.0;
    for (std::size_t i = 0; i < nfft; ++i) {
        out.magnitude[i] = std::abs(spec[i]);
        peak = std::max(peak, out.magnitude[i]);
    }
    if (peak <= 0.0) {
        out.degenerate = true;
        return out;
    }
    for (auto& x : out.magnitude) x /= peak;
    return out;
}

Eigen::Map<const Eigen::VectorXd> as_eigen(const RealVec& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

RealVec from_eigen(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

}  // namespace wavelab
