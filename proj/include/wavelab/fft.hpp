#pragma once

#include <cstddef>

#include "wavelab/types.hpp"

namespace wavelab {

/// Unitary FFT of a fixed size, backed by FFTW (1/sqrt(n) scaling in both
/// directions). Plan creation is serialized internally; a constructed
/// instance must be used by one thread at a time (parallel workers each own
/// their instances, see FftCache).
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&& other) noexcept;
    Fft& operator=(Fft&&) = delete;

    std::size_t size() const { return n_; }

    void forward(const cplx* in, cplx* out);
    void inverse(const cplx* in, cplx* out);

    ComplexVec forward(const ComplexVec& in);
    ComplexVec inverse(const ComplexVec& in);

private:
    std::size_t n_;
    void* plan_fwd_;  // fftw_plan
    void* plan_inv_;
    cplx* buf_;
};

/// Thread-local cache of Fft instances keyed by size. The returned reference
/// stays valid for the lifetime of the calling thread.
Fft& thread_fft(std::size_t n);

/// Move the zero-frequency bin to the centre: out[i] = in[(i + ceil(n/2)) % n].
ComplexVec fftshift(const ComplexVec& v);

/// Inverse of fftshift: out[i] = in[(i + floor(n/2)) % n].
ComplexVec ifftshift(const ComplexVec& v);

}  // namespace wavelab
