#include "wavelab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

namespace wavelab {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidInput("FFT size must be >= 1");
    buf_ = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * 2 * n));
    auto* in = reinterpret_cast<fftw_complex*>(buf_);
    auto* out = reinterpret_cast<fftw_complex*>(buf_ + n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
    if (buf_ == nullptr) return;
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
    fftw_free(buf_);
}

Fft::Fft(Fft&& other) noexcept
    : n_(other.n_), plan_fwd_(other.plan_fwd_), plan_inv_(other.plan_inv_), buf_(other.buf_) {
    other.buf_ = nullptr;
}

void Fft::forward(const cplx* in, cplx* out) {
    std::memcpy(buf_, in, sizeof(cplx) * n_);
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    for (std::size_t i = 0; i < n_; ++i) out[i] = buf_[n_ + i] * s;
}

void Fft::inverse(const cplx* in, cplx* out) {
    std::memcpy(buf_, in, sizeof(cplx) * n_);
    fftw_execute(static_cast<fftw_plan>(plan_inv_));
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    for (std::size_t i = 0; i < n_; ++i) out[i] = buf_[n_ + i] * s;
}

ComplexVec Fft::forward(const ComplexVec& in) {
    if (in.size() != n_) throw InvalidInput("FFT input length mismatch");
    ComplexVec out(n_);
    forward(in.data(), out.data());
    return out;
}

ComplexVec Fft::inverse(const ComplexVec& in) {
    if (in.size() != n_) throw InvalidInput("FFT input length mismatch");
    ComplexVec out(n_);
    inverse(in.data(), out.data());
    return out;
}

Fft& thread_fft(std::size_t n) {
    thread_local std::map<std::size_t, Fft> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, Fft(n)).first;
    return it->second;
}

ComplexVec fftshift(const ComplexVec& v) {
    const std::size_t n = v.size();
    ComplexVec out(n);
    const std::size_t shift = (n + 1) / 2;
    for (std::size_t i = 0; i < n; ++i) out[i] = v[(i + shift) % n];
    return out;
}

ComplexVec ifftshift(const ComplexVec& v) {
    const std::size_t n = v.size();
    ComplexVec out(n);
    const std::size_t shift = n / 2;
    for (std::size_t i = 0; i < n; ++i) out[i] = v[(i + shift) % n];
    return out;
}

}  // namespace wavelab
