#pragma once

#include "wavelab/transforms.hpp"
#include "wavelab/types.hpp"

namespace wavelab {

enum class DetectionMode { hard, iterative };

struct DetectorConfig {
    int iterations = 20;
    DetectionMode mode = DetectionMode::iterative;
    /// Soft-limit magnitude per real dimension; <= 0 means derive from the
    /// QAM order (the outermost constellation level).
    double clamp = -1.0;
    /// Use hard interim decisions inside the recursion instead of the
    /// soft-clamped ones.
    bool interim_hard = false;
    int qam_order = 4;

    double clamp_for_order() const;
    void validate() const;
};

/// Successive-interference-cancellation fixed point over the symbol-domain
/// correlation C = inverse * forward (biases removed by the caller):
///   s(k) = y - (C - diag C) * limit(s(k-1)),  s(0) = y,
/// with early exit when the update falls below 1e-6 in the max norm. When C
/// is the identity the first iteration returns y unchanged.
class IterativeDetector {
public:
    IterativeDetector(const TransformPair& pair, const DetectorConfig& cfg);

    /// y and out have length 2M. Thread-safe (scratch is per call).
    void detect(const double* y, double* out) const;
    RealVec detect(const RealVec& y) const;

    const RealMatrix& correlation() const { return c_; }

private:
    RealMatrix c_;
    RealMatrix offdiag_;
    DetectorConfig cfg_;
    double clamp_;
    bool orthogonal_;
};

/// One-call convenience wrapper around IterativeDetector.
RealVec iterative_detect(const RealVec& y, const TransformPair& pair, const DetectorConfig& cfg);

}  // namespace wavelab
