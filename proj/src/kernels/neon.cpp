#include "seriesforge/kernels/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace seriesforge::kernels {
namespace {

inline void gemm_rowblock(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_i_stride,
                          std::size_t a_p_stride, const double* b, double* c, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* abase = a + i * a_i_stride;
        double* crow = c + i * n;
        std::size_t j = 0;
        for (; j + 8 <= n; j += 8) {
            float64x2_t c0 = accumulate ? vld1q_f64(crow + j) : vdupq_n_f64(0.0);
            float64x2_t c1 = accumulate ? vld1q_f64(crow + j + 2) : vdupq_n_f64(0.0);
            float64x2_t c2 = accumulate ? vld1q_f64(crow + j + 4) : vdupq_n_f64(0.0);
            float64x2_t c3 = accumulate ? vld1q_f64(crow + j + 6) : vdupq_n_f64(0.0);
            for (std::size_t p = 0; p < k; ++p) {
                const float64x2_t av = vdupq_n_f64(abase[p * a_p_stride]);
                const double* brow = b + p * n + j;
                c0 = vfmaq_f64(c0, av, vld1q_f64(brow));
                c1 = vfmaq_f64(c1, av, vld1q_f64(brow + 2));
                c2 = vfmaq_f64(c2, av, vld1q_f64(brow + 4));
                c3 = vfmaq_f64(c3, av, vld1q_f64(brow + 6));
            }
            vst1q_f64(crow + j, c0);
            vst1q_f64(crow + j + 2, c1);
            vst1q_f64(crow + j + 4, c2);
            vst1q_f64(crow + j + 6, c3);
        }
        for (; j < n; ++j) {
            double acc = accumulate ? crow[j] : 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += abase[p * a_p_stride] * b[p * n + j];
            crow[j] = acc;
        }
    }
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
             bool accumulate) {
    gemm_rowblock(m, n, k, a, k, 1, b, c, accumulate);
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
             bool accumulate) {
    gemm_rowblock(m, n, k, a, 1, m, b, c, accumulate);
}

double dot(std::size_t n, const double* x, const double* y) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
    double r = vaddvq_f64(acc);
    for (; i < n; ++i) r += x[i] * y[i];
    return r;
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
             bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = dot(k, a + i * k, b + j * k);
            c[i * n + j] = accumulate ? c[i * n + j] + v : v;
        }
    }
}

void add(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
    const float64x2_t av = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_acc(std::size_t n, const double* a, const double* b, double* y) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) y[i] += a[i] * b[i];
}

double sum(std::size_t n, const double* x) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
    double r = vaddvq_f64(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

// The transcendental loops stay scalar here; libm is already vectorized on
// most AArch64 toolchains.
void sigmoid(std::size_t n, const double* x, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double v = x[i];
        if (v >= 0.0) {
            out[i] = 1.0 / (1.0 + std::exp(-v));
        } else {
            const double e = std::exp(v);
            out[i] = e / (1.0 + e);
        }
    }
}

void tanh(std::size_t n, const double* x, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(x[i]);
}

constexpr KernelTable kNeon{
    "neon", gemm_nn, gemm_nt, gemm_tn, add, sub, mul, axpy, mul_acc, sum, dot, sigmoid, tanh,
};

}  // namespace

const KernelTable* neon_table() { return &kNeon; }

}  // namespace seriesforge::kernels

#else

namespace seriesforge::kernels {
const KernelTable* neon_table() { return nullptr; }
}  // namespace seriesforge::kernels

#endif
