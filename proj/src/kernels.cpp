#include "proxpen/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace proxpen::kernels {

namespace {

inline double row_dot(const double* row, const double* x, Index n)
{
    double s = 0.0;
    for (Index j = 0; j < n; ++j) s += row[j] * x[j];
    return s;
}

// out[lo, hi) += sum_i a(i, lo:hi) * x[i], rows visited in ascending order.
inline void column_block_accumulate(const Matrix& a, const double* x, double* out, Index lo, Index hi)
{
    const Index rows = a.rows();
    const Index cols = a.cols();
    const double* data = a.data();
    for (Index j = lo; j < hi; ++j) out[j] = 0.0;
    for (Index i = 0; i < rows; ++i) {
        const double xi = x[i];
        const double* row = data + i * cols;
        for (Index j = lo; j < hi; ++j) out[j] += row[j] * xi;
    }
}

void check_gemv(const Matrix& a, const Vector& x, Vector& out)
{
    require_same_size(a.cols(), x.size(), "gemv");
    out.resize(a.rows());
}

void check_gemv_t(const Matrix& a, const Vector& x, Vector& out)
{
    require_same_size(a.rows(), x.size(), "gemv_t");
    out.resize(a.cols());
}

} // namespace

namespace serial {

void gemv(const Matrix& a, const Vector& x, Vector& out)
{
    check_gemv(a, x, out);
    const Index n = a.cols();
    for (Index i = 0; i < a.rows(); ++i) out[i] = row_dot(a.data() + i * n, x.data(), n);
}

void gemv_t(const Matrix& a, const Vector& x, Vector& out)
{
    check_gemv_t(a, x, out);
    column_block_accumulate(a, x.data(), out.data(), 0, a.cols());
}

} // namespace serial

namespace omp {

void gemv(const Matrix& a, const Vector& x, Vector& out)
{
    check_gemv(a, x, out);
    const Index rows = a.rows();
    const Index n = a.cols();
    const double* data = a.data();
    const double* xd = x.data();
    double* od = out.data();
#pragma omp parallel for schedule(static) if (rows * n >= kParallelThreshold)
    for (Index i = 0; i < rows; ++i) od[i] = row_dot(data + i * n, xd, n);
}

void gemv_t(const Matrix& a, const Vector& x, Vector& out)
{
    check_gemv_t(a, x, out);
    const Index cols = a.cols();
    if (a.rows() * cols < kParallelThreshold) {
        column_block_accumulate(a, x.data(), out.data(), 0, cols);
        return;
    }
    const double* xd = x.data();
    double* od = out.data();
#pragma omp parallel
    {
        const Index nt = omp_get_num_threads();
        const Index t = omp_get_thread_num();
        const Index chunk = (cols + nt - 1) / nt;
        const Index lo = std::min(cols, t * chunk);
        const Index hi = std::min(cols, lo + chunk);
        if (lo < hi) column_block_accumulate(a, xd, od, lo, hi);
    }
}

} // namespace omp

int max_threads() { return omp_get_max_threads(); }

} // namespace proxpen::kernels
