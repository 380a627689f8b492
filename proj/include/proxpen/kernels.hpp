#pragma once

#include "proxpen/types.hpp"

// Dense matrix-vector kernels used by the quadratic oracles.
//
// Two implementations are kept side by side: `serial` is the reference and
// `omp` splits the output across OpenMP threads. Every output entry is
// accumulated in the same order by both, so results are bitwise identical;
// tests rely on this.
namespace proxpen::kernels {

// Problems smaller than this many matrix entries run single-threaded even
// through the OpenMP entry points.
inline constexpr Index kParallelThreshold = Index{1} << 16;

namespace serial {
// out = a * x
void gemv(const Matrix& a, const Vector& x, Vector& out);
// out = a^T * x
void gemv_t(const Matrix& a, const Vector& x, Vector& out);
} // namespace serial

namespace omp {
void gemv(const Matrix& a, const Vector& x, Vector& out);
void gemv_t(const Matrix& a, const Vector& x, Vector& out);
} // namespace omp

// Dispatching entry points used by the library.
inline void gemv(const Matrix& a, const Vector& x, Vector& out) { omp::gemv(a, x, out); }
inline void gemv_t(const Matrix& a, const Vector& x, Vector& out) { omp::gemv_t(a, x, out); }

// Number of worker threads OpenMP regions will use.
int max_threads();

} // namespace proxpen::kernels
