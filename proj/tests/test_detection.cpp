#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "wavelab/detection.hpp"
#include "wavelab/rng.hpp"

using namespace wavelab;

namespace {
TransformPair pair_from_matrices(RealMatrix fw, RealMatrix rv, int m, int q) {
    TransformPair p{LinearTransform(std::move(fw), Eigen::VectorXd::Zero(2 * q)),
                    LinearTransform(std::move(rv), Eigen::VectorXd::Zero(2 * m)), m, q, {}};
    return p;
}
}  // namespace

TEST_CASE("orthogonal pairs bypass after one iteration") {
    const TransformPair dft = make_dft_precoder_pair(8);
    DetectorConfig cfg;
    SeededRng rng(2);
    RealVec y(16);
    for (auto& v : y) v = rng.normal();
    const RealVec out = iterative_detect(y, dft, cfg);
    CHECK(out == y);  // matched-filter output returned untouched
}

TEST_CASE("fixed point matches the closed-form linear solve on a toy pair") {
    // M = Q = 2 with a known mild off-diagonal correlation
    RealMatrix fw(4, 4);
    fw << 1.0, 0.2, 0.0, 0.1,
          0.2, 1.0, -0.1, 0.0,
          0.0, -0.1, 1.0, 0.2,
          0.1, 0.0, 0.2, 1.0;
    const TransformPair p = pair_from_matrices(fw, RealMatrix::Identity(4, 4), 2, 2);
    const RealMatrix c = p.correlation();
    RealMatrix off = c;
    off.diagonal().setZero();
    // spectral radius well below 1 and clamp inactive for small y, so the
    // recursion converges to (I + offdiag)^{-1} y
    DetectorConfig cfg;
    cfg.iterations = 200;
    cfg.clamp = 10.0;
    RealVec y{0.1, -0.05, 0.08, 0.02};
    const RealVec got = iterative_detect(y, p, cfg);
    Eigen::Map<const Eigen::VectorXd> ye(y.data(), 4);
    const Eigen::VectorXd want =
        (RealMatrix::Identity(4, 4) + off).partialPivLu().solve(ye.eval());
    for (int i = 0; i < 4; ++i) CHECK(std::abs(got[static_cast<std::size_t>(i)] - want(i)) < 1e-6);
}

TEST_CASE("residual decreases geometrically on contractive instances") {
    RealMatrix fw(4, 4);
    fw << 1.0, 0.3, 0.0, 0.0,
          0.3, 1.0, 0.0, 0.0,
          0.0, 0.0, 1.0, -0.25,
          0.0, 0.0, -0.25, 1.0;
    const TransformPair p = pair_from_matrices(fw, RealMatrix::Identity(4, 4), 2, 2);
    const RealMatrix c = p.correlation();
    RealMatrix off = c;
    off.diagonal().setZero();
    Eigen::VectorXd y(4);
    y << 0.2, -0.1, 0.05, 0.12;
    const Eigen::VectorXd fixed =
        (RealMatrix::Identity(4, 4) + off).partialPivLu().solve(y);

    DetectorConfig base;
    base.clamp = 10.0;
    double prev = 1e300;
    for (int k = 1; k <= 6; ++k) {
        DetectorConfig cfg = base;
        cfg.iterations = k;
        const RealVec got = iterative_detect(RealVec{0.2, -0.1, 0.05, 0.12}, p, cfg);
        Eigen::Map<const Eigen::VectorXd> ge(got.data(), 4);
        const double err = (ge - fixed).norm();
        CHECK(err < prev + 1e-12);
        prev = err;
    }
}

TEST_CASE("detector input validation") {
    const TransformPair p = make_dft_precoder_pair(4);
    DetectorConfig cfg;
    cfg.iterations = 0;
    CHECK_THROWS_AS(iterative_detect(RealVec(8, 0.0), p, cfg), ConfigError);
    DetectorConfig ok;
    CHECK_THROWS_AS(iterative_detect(RealVec(6, 0.0), p, ok), InvalidInput);
    CHECK(ok.clamp_for_order() == doctest::Approx(1.0 / std::sqrt(2.0)));
}
