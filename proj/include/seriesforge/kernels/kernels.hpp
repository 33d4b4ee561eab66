#pragma once

// Dense double-precision inner loops used by the tensor primitives.
//
// Every kernel has a portable scalar reference implementation. Vectorized
// variants (AVX2+FMA on x86-64, NEON on AArch64) are compiled alongside it and
// one table is selected once per process from the running CPU's features.
// Setting SERIESFORGE_SIMD=scalar in the environment forces the reference path.

#include <cstddef>
#include <string_view>

namespace seriesforge::kernels {

struct KernelTable {
    std::string_view name;

    // c(m x n) = a(m x k) * b(k x n), or += when accumulate is set.
    void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
                    bool accumulate);
    // c(m x n) = a(m x k) * b(n x k)^T
    void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
                    bool accumulate);
    // c(m x n) = a(k x m)^T * b(k x n)
    void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
                    bool accumulate);

    void (*add)(std::size_t n, const double* a, const double* b, double* out);
    void (*sub)(std::size_t n, const double* a, const double* b, double* out);
    void (*mul)(std::size_t n, const double* a, const double* b, double* out);
    // y += alpha * x
    void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
    // y += a * b (elementwise)
    void (*mul_acc)(std::size_t n, const double* a, const double* b, double* y);
    double (*sum)(std::size_t n, const double* x);
    double (*dot)(std::size_t n, const double* x, const double* y);
    // Elementwise logistic and hyperbolic tangent; out may alias x.
    void (*sigmoid)(std::size_t n, const double* x, double* out);
    void (*tanh)(std::size_t n, const double* x, double* out);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// The table every primitive dispatches through; chosen on first use.
const KernelTable& active();

}  // namespace seriesforge::kernels
