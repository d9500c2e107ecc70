#include "wavelab/kernels.hpp"

#include "wavelab/types.hpp"

namespace wavelab::kernels {

namespace {

inline void check_nn(const Mat& a, const Mat& b, Mat& c) {
    if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols())
        throw InvalidInput("gemm_nn shape mismatch");
}
inline void check_nt(const Mat& a, const Mat& b, Mat& c) {
    if (a.cols() != b.cols() || c.rows() != a.rows() || c.cols() != b.rows())
        throw InvalidInput("gemm_nt shape mismatch");
}
inline void check_tn(const Mat& a, const Mat& b, Mat& c) {
    if (a.rows() != b.rows() || c.rows() != a.cols() || c.cols() != b.cols())
        throw InvalidInput("gemm_tn shape mismatch");
}

// one output column of a*b: axpy over columns of a, k ascending
inline void col_nn(const Mat& a, const Mat& b, Mat& c, double alpha, double beta,
                   Eigen::Index j) {
    const Eigen::Index rows = a.rows(), k = a.cols();
    double* cj = c.col(j).data();
    if (beta == 0.0)
        for (Eigen::Index i = 0; i < rows; ++i) cj[i] = 0.0;
    else if (beta != 1.0)
        for (Eigen::Index i = 0; i < rows; ++i) cj[i] *= beta;
    for (Eigen::Index kk = 0; kk < k; ++kk) {
        const double w = alpha * b(kk, j);
        const double* ak = a.col(kk).data();
#pragma omp simd
        for (Eigen::Index i = 0; i < rows; ++i) cj[i] += w * ak[i];
    }
}

inline void col_nt(const Mat& a, const Mat& b, Mat& c, double alpha, double beta,
                   Eigen::Index j) {
    const Eigen::Index rows = a.rows(), k = a.cols();
    double* cj = c.col(j).data();
    if (beta == 0.0)
        for (Eigen::Index i = 0; i < rows; ++i) cj[i] = 0.0;
    else if (beta != 1.0)
        for (Eigen::Index i = 0; i < rows; ++i) cj[i] *= beta;
    for (Eigen::Index kk = 0; kk < k; ++kk) {
        const double w = alpha * b(j, kk);
        const double* ak = a.col(kk).data();
#pragma omp simd
        for (Eigen::Index i = 0; i < rows; ++i) cj[i] += w * ak[i];
    }
}

inline void col_tn(const Mat& a, const Mat& b, Mat& c, double alpha, double beta,
                   Eigen::Index j) {
    const Eigen::Index rows = c.rows(), k = a.rows();
    const double* bj = b.col(j).data();
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double* ai = a.col(i).data();
        double acc = 0.0;
#pragma omp simd reduction(+ : acc)
        for (Eigen::Index kk = 0; kk < k; ++kk) acc += ai[kk] * bj[kk];
        c(i, j) = alpha * acc + (beta == 0.0 ? 0.0 : beta * c(i, j));
    }
}

}  // namespace

void gemm_nn(const Mat& a, const Mat& b, Mat& c, double alpha, double beta) {
    check_nn(a, b, c);
    const Eigen::Index cols = c.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j) col_nn(a, b, c, alpha, beta, j);
}

void gemm_nt(const Mat& a, const Mat& b, Mat& c, double alpha, double beta) {
    check_nt(a, b, c);
    const Eigen::Index cols = c.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j) col_nt(a, b, c, alpha, beta, j);
}

void gemm_tn(const Mat& a, const Mat& b, Mat& c, double alpha, double beta) {
    check_tn(a, b, c);
    const Eigen::Index cols = c.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j) col_tn(a, b, c, alpha, beta, j);
}

void gemm_nn_serial(const Mat& a, const Mat& b, Mat& c, double alpha, double beta) {
    check_nn(a, b, c);
    for (Eigen::Index j = 0; j < c.cols(); ++j) col_nn(a, b, c, alpha, beta, j);
}

void gemm_nt_serial(const Mat& a, const Mat& b, Mat& c, double alpha, double beta) {
    check_nt(a, b, c);
    for (Eigen::Index j = 0; j < c.cols(); ++j) col_nt(a, b, c, alpha, beta, j);
}

void gemm_tn_serial(const Mat& a, const Mat& b, Mat& c, double alpha, double beta) {
    check_tn(a, b, c);
    for (Eigen::Index j = 0; j < c.cols(); ++j) col_tn(a, b, c, alpha, beta, j);
}

}  // namespace wavelab::kernels
