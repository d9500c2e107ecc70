#include "wavelab/detection.hpp"

#include <cmath>

namespace wavelab {

double DetectorConfig::clamp_for_order() const {
    return clamp > 0.0 ? clamp : qam_axis_limit(qam_order);
}

void DetectorConfig::validate() const {
    if (iterations < 1) throw ConfigError("detector iterations must be >= 1");
}

IterativeDetector::IterativeDetector(const TransformPair& pair, const DetectorConfig& cfg)
    : c_(pair.correlation()), cfg_(cfg), clamp_(cfg.clamp_for_order()) {
    cfg_.validate();
    if (c_.rows() != c_.cols()) throw ConfigError("correlation matrix must be square");
    offdiag_ = c_;
    offdiag_.diagonal().setZero();
    orthogonal_ =
        (c_ - RealMatrix::Identity(c_.rows(), c_.cols())).cwiseAbs().maxCoeff() < 1e-8;
}

void IterativeDetector::detect(const double* y, double* out) const {
    const Eigen::Index n = c_.rows();
    Eigen::Map<const Eigen::VectorXd> yv(y, n);
    Eigen::Map<Eigen::VectorXd> ov(out, n);
    if (orthogonal_) {
        // matched-filter output is already interference-free
        ov = yv;
        return;
    }
    Eigen::VectorXd s = yv;
    Eigen::VectorXd limited(n), next(n);
    for (int k = 0; k < cfg_.iterations; ++k) {
        if (cfg_.interim_hard) {
            for (Eigen::Index i = 0; i < n; ++i) limited(i) = s(i) < 0.0 ? -clamp_ : clamp_;
        } else {
            limited = s.cwiseMax(-clamp_).cwiseMin(clamp_);
        }
        next.noalias() = -(offdiag_ * limited);
        next += yv;
        const double delta = (next - s).cwiseAbs().maxCoeff();
        s.swap(next);
        if (delta < 1e-6) break;
    }
    ov = s;
}

RealVec IterativeDetector::detect(const RealVec& y) const {
    if (static_cast<Eigen::Index>(y.size()) != c_.rows())
        throw InvalidInput("detector input length mismatch");
    RealVec out(y.size());
    detect(y.data(), out.data());
    return out;
}

RealVec iterative_detect(const RealVec& y, const TransformPair& pair, const DetectorConfig& cfg) {
    return IterativeDetector(pair, cfg).detect(y);
}

}  // namespace wavelab
