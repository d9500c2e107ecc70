#pragma once

#include <Eigen/Dense>

namespace wavelab::kernels {

using Mat = Eigen::MatrixXd;

/// Dense products parallelized over output columns with a fixed, serial
/// accumulation order over the inner dimension. Every output element is
/// produced by exactly one thread in the same floating-point order, so
/// results are bit-identical for any thread count (unlike blocked GEMMs).
/// beta == 0 overwrites, beta == 1 accumulates.

void gemm_nn(const Mat& a, const Mat& b, Mat& c, double alpha = 1.0, double beta = 0.0);
/// c = alpha * a * b^T + beta * c
void gemm_nt(const Mat& a, const Mat& b, Mat& c, double alpha = 1.0, double beta = 0.0);
/// c = alpha * a^T * b + beta * c
void gemm_tn(const Mat& a, const Mat& b, Mat& c, double alpha = 1.0, double beta = 0.0);

// Single-loop reference implementations (identical results, used by tests
// and the benchmark).
void gemm_nn_serial(const Mat& a, const Mat& b, Mat& c, double alpha = 1.0, double beta = 0.0);
void gemm_nt_serial(const Mat& a, const Mat& b, Mat& c, double alpha = 1.0, double beta = 0.0);
void gemm_tn_serial(const Mat& a, const Mat& b, Mat& c, double alpha = 1.0, double beta = 0.0);

}  // namespace wavelab::kernels
