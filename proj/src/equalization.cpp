#include "wavelab/equalization.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "wavelab/channel.hpp"
#include "wavelab/fft.hpp"

namespace wavelab {

namespace {
constexpr double kSingularTx = 1e-12;

OneTapEstimate divide_with_interpolation(const ComplexVec& num, const RealVec& den) {
    const std::size_t n = num.size();
    OneTapEstimate est;
    est.response.d.assign(n, cplx(0.0, 0.0));
    est.bin_valid.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (den[i] > kSingularTx) {
            est.response.d[i] = num[i] / den[i];
            est.bin_valid[i] = 1;
        }
    }
    // Linear interpolation across singular bins where both neighbours exist.
    for (std::size_t i = 0; i < n; ++i) {
        if (est.bin_valid[i]) continue;
        std::size_t lo = i;
        bool has_lo = false;
        for (std::size_t j = i; j-- > 0;)
            if (est.bin_valid[j]) {
                lo = j;
                has_lo = true;
                break;
            }
        std::size_t hi = i;
        bool has_hi = false;
        for (std::size_t j = i + 1; j < n; ++j)
            if (est.bin_valid[j]) {
                hi = j;
                has_hi = true;
                break;
            }
        if (has_lo && has_hi) {
            const double t = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
            est.response.d[i] = est.response.d[lo] * (1.0 - t) + est.response.d[hi] * t;
            est.bin_valid[i] = 1;
        }
        // isolated singular bin: stays invalid (uninterpolatable)
    }
    return est;
}
}  // namespace

OneTapEstimate estimate_one_tap(const ComplexVec& rx_pilot_freq, const ComplexVec& tx_pilot_freq) {
    if (rx_pilot_freq.size() != tx_pilot_freq.size())
        throw InvalidInput("pilot length mismatch");
    const std::size_t n = rx_pilot_freq.size();
    ComplexVec num(n);
    RealVec den(n);
    for (std::size_t i = 0; i < n; ++i) {
        num[i] = rx_pilot_freq[i] * std::conj(tx_pilot_freq[i]);
        den[i] = std::norm(tx_pilot_freq[i]);
    }
    return divide_with_interpolation(num, den);
}

void PilotAverager::accumulate(const ComplexVec& rx_pilot_freq, const ComplexVec& tx_pilot_freq) {
    if (rx_pilot_freq.size() != tx_pilot_freq.size())
        throw InvalidInput("pilot length mismatch");
    if (num_.empty()) {
        num_.assign(rx_pilot_freq.size(), cplx(0.0, 0.0));
        den_.assign(rx_pilot_freq.size(), 0.0);
    }
    if (rx_pilot_freq.size() != num_.size()) throw InvalidInput("pilot block size changed");
    for (std::size_t i = 0; i < num_.size(); ++i) {
        num_[i] += rx_pilot_freq[i] * std::conj(tx_pilot_freq[i]);
        den_[i] += std::norm(tx_pilot_freq[i]);
    }
}

OneTapEstimate PilotAverager::finalize() const {
    if (num_.empty()) throw InvalidInput("no pilot blocks accumulated");
    return divide_with_interpolation(num_, den_);
}

ComplexVec equalize_one_tap(const ComplexVec& r, const FreqResponse& d, std::size_t* erased) {
    if (r.size() != d.d.size()) throw InvalidInput("response length mismatch");
    ComplexVec out(r.size());
    std::size_t dead = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (std::abs(d.d[i]) < kSingularTx) {
            out[i] = cplx(0.0, 0.0);
            ++dead;
        } else {
            out[i] = r[i] / d.d[i];
        }
    }
    if (erased != nullptr) *erased += dead;
    return out;
}

TimeChannelEstimate mc_estimate_time_domain(const ComplexVec& rx_pilot,
                                            const ComplexVec& pilot_symbols,
                                            const LinearTransform& mc_tx, int n_taps) {
    const int n = static_cast<int>(rx_pilot.size());
    if (static_cast<int>(pilot_symbols.size()) != n)
        throw InvalidInput("pilot symbol count must match the block size");
    if (n_taps < 1 || n_taps > n) throw InvalidInput("tap count must satisfy 1 <= L <= N");
    if (mc_tx.rows() != 2 * n || mc_tx.cols() != 2 * n)
        throw InvalidInput("transform must be 2N x 2N for an N-sample pilot");

    // Pilot waveform through the generator (signal and bias together); the
    // circulant built from it equals the signal circulant plus the bias
    // circulant, since both share the same cyclic arrangement.
    const RealVec xp = mc_tx.apply(pack_complex_to_real(pilot_symbols));
    const ComplexVec xbar = unpack_real_to_complex(xp);

    ComplexMatrix p(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            p(i, j) = xbar[static_cast<std::size_t>(((i - j) % n + n) % n)];

    Eigen::Map<const Eigen::VectorXcd> y(rx_pilot.data(), n);
    const ComplexMatrix gram = p * p.adjoint();

    Eigen::LLT<ComplexMatrix> llt(gram);
    Eigen::VectorXcd u;
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
        u = llt.solve(y);
        ok = ((gram * u - y).norm() <= 1e-6 * (1.0 + y.norm()));
    }
    if (!ok) {
        // ridge fallback for rank-deficient pilots
        const double ridge = 1e-10 * gram.trace().real() / n;
        ComplexMatrix reg = gram;
        reg.diagonal().array() += ridge;
        Eigen::LLT<ComplexMatrix> llt2(reg);
        if (llt2.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram);
            const double lmax = es.eigenvalues().maxCoeff();
            const double lmin = std::max(es.eigenvalues().minCoeff(), 0.0);
            const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
            throw IllConditionedPilot("pilot correlation matrix is rank-deficient", cond);
        }
        u = llt2.solve(y);
    }
    const Eigen::VectorXcd h_full = p.adjoint() * u;

    TimeChannelEstimate est;
    est.taps.assign(h_full.data(), h_full.data() + n_taps);
    return est;
}

ComplexVec mc_equalize_time_domain(const ComplexVec& y, const TimeChannelEstimate& h,
                                   std::size_t* erased) {
    const int n = static_cast<int>(y.size());
    if (h.taps.empty() || std::abs(h.taps[0]) == 0.0)
        throw InvalidInput("channel estimate needs a nonzero leading tap");
    TapRealization taps;
    for (std::size_t d = 0; d < h.taps.size(); ++d)
        taps.push_back({static_cast<int>(d), h.taps[d]});
    const ComplexVec dfreq = channel_freq_response(taps, n);

    Fft& fft = thread_fft(static_cast<std::size_t>(n));
    ComplexVec r = fft.forward(y);
    r = equalize_one_tap(r, FreqResponse{dfreq}, erased);
    return fft.inverse(r);
}

}  // namespace wavelab
