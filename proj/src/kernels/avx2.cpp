#include "seriesforge/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define SERIESFORGE_HAVE_AVX2_TU 1
#else
#define SERIESFORGE_HAVE_AVX2_TU 0
#endif

#if SERIESFORGE_HAVE_AVX2_TU

#include <immintrin.h>


#if defined(__clang__)
#pragma clang attribute push(__attribute__((target("avx2,fma"))), apply_to = function)
#elif defined(__GNUC__)
#pragma GCC push_options
#pragma GCC target("avx2,fma")
#endif

namespace seriesforge::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// Shared body of gemm_nn / gemm_tn / gemm_nt: a(i, p) is read through
// a_i_stride and a_p_stride so one register-blocked loop serves every layout.
// Rows are taken four at a time against 8-column panels of b.
inline void gemm_rowblock(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_i_stride,
                          std::size_t a_p_stride, const double* b, double* c, bool accumulate) {
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const double* a0 = a + i * a_i_stride;
        const double* a1 = a0 + a_i_stride;
        const double* a2 = a1 + a_i_stride;
        const double* a3 = a2 + a_i_stride;
        double* c0 = c + i * n;
        double* c1 = c0 + n;
        double* c2 = c1 + n;
        double* c3 = c2 + n;
        std::size_t j = 0;
        for (; j + 8 <= n; j += 8) {
            __m256d x00 = _mm256_setzero_pd(), x01 = _mm256_setzero_pd();
            __m256d x10 = _mm256_setzero_pd(), x11 = _mm256_setzero_pd();
            __m256d x20 = _mm256_setzero_pd(), x21 = _mm256_setzero_pd();
            __m256d x30 = _mm256_setzero_pd(), x31 = _mm256_setzero_pd();
            for (std::size_t p = 0; p < k; ++p) {
                const double* brow = b + p * n + j;
                const __m256d b0 = _mm256_loadu_pd(brow);
                const __m256d b1 = _mm256_loadu_pd(brow + 4);
                const std::size_t off = p * a_p_stride;
                __m256d av = _mm256_broadcast_sd(a0 + off);
                x00 = _mm256_fmadd_pd(av, b0, x00);
                x01 = _mm256_fmadd_pd(av, b1, x01);
                av = _mm256_broadcast_sd(a1 + off);
                x10 = _mm256_fmadd_pd(av, b0, x10);
                x11 = _mm256_fmadd_pd(av, b1, x11);
                av = _mm256_broadcast_sd(a2 + off);
                x20 = _mm256_fmadd_pd(av, b0, x20);
                x21 = _mm256_fmadd_pd(av, b1, x21);
                av = _mm256_broadcast_sd(a3 + off);
                x30 = _mm256_fmadd_pd(av, b0, x30);
                x31 = _mm256_fmadd_pd(av, b1, x31);
            }
            if (accumulate) {
                x00 = _mm256_add_pd(x00, _mm256_loadu_pd(c0 + j));
                x01 = _mm256_add_pd(x01, _mm256_loadu_pd(c0 + j + 4));
                x10 = _mm256_add_pd(x10, _mm256_loadu_pd(c1 + j));
                x11 = _mm256_add_pd(x11, _mm256_loadu_pd(c1 + j + 4));
                x20 = _mm256_add_pd(x20, _mm256_loadu_pd(c2 + j));
                x21 = _mm256_add_pd(x21, _mm256_loadu_pd(c2 + j + 4));
                x30 = _mm256_add_pd(x30, _mm256_loadu_pd(c3 + j));
                x31 = _mm256_add_pd(x31, _mm256_loadu_pd(c3 + j + 4));
            }
            _mm256_storeu_pd(c0 + j, x00);
            _mm256_storeu_pd(c0 + j + 4, x01);
            _mm256_storeu_pd(c1 + j, x10);
            _mm256_storeu_pd(c1 + j + 4, x11);
            _mm256_storeu_pd(c2 + j, x20);
            _mm256_storeu_pd(c2 + j + 4, x21);
            _mm256_storeu_pd(c3 + j, x30);
            _mm256_storeu_pd(c3 + j + 4, x31);
        }
        for (; j + 4 <= n; j += 4) {
            __m256d x0 = _mm256_setzero_pd(), x1 = _mm256_setzero_pd();
            __m256d x2 = _mm256_setzero_pd(), x3 = _mm256_setzero_pd();
            for (std::size_t p = 0; p < k; ++p) {
                const __m256d bv = _mm256_loadu_pd(b + p * n + j);
                const std::size_t off = p * a_p_stride;
                x0 = _mm256_fmadd_pd(_mm256_broadcast_sd(a0 + off), bv, x0);
                x1 = _mm256_fmadd_pd(_mm256_broadcast_sd(a1 + off), bv, x1);
                x2 = _mm256_fmadd_pd(_mm256_broadcast_sd(a2 + off), bv, x2);
                x3 = _mm256_fmadd_pd(_mm256_broadcast_sd(a3 + off), bv, x3);
            }
            if (accumulate) {
                x0 = _mm256_add_pd(x0, _mm256_loadu_pd(c0 + j));
                x1 = _mm256_add_pd(x1, _mm256_loadu_pd(c1 + j));
                x2 = _mm256_add_pd(x2, _mm256_loadu_pd(c2 + j));
                x3 = _mm256_add_pd(x3, _mm256_loadu_pd(c3 + j));
            }
            _mm256_storeu_pd(c0 + j, x0);
            _mm256_storeu_pd(c1 + j, x1);
            _mm256_storeu_pd(c2 + j, x2);
            _mm256_storeu_pd(c3 + j, x3);
        }
        for (; j < n; ++j) {
            double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                const double bv = b[p * n + j];
                const std::size_t off = p * a_p_stride;
                s0 += a0[off] * bv;
                s1 += a1[off] * bv;
                s2 += a2[off] * bv;
                s3 += a3[off] * bv;
            }
            c0[j] = accumulate ? c0[j] + s0 : s0;
            c1[j] = accumulate ? c1[j] + s1 : s1;
            c2[j] = accumulate ? c2[j] + s2 : s2;
            c3[j] = accumulate ? c3[j] + s3 : s3;
        }
    }
    for (; i < m; ++i) {
        const double* abase = a + i * a_i_stride;
        double* crow = c + i * n;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            __m256d x0 = _mm256_setzero_pd();
            for (std::size_t p = 0; p < k; ++p) {
                x0 = _mm256_fmadd_pd(_mm256_broadcast_sd(abase + p * a_p_stride), _mm256_loadu_pd(b + p * n + j), x0);
            }
            if (accumulate) x0 = _mm256_add_pd(x0, _mm256_loadu_pd(crow + j));
            _mm256_storeu_pd(crow + j, x0);
        }
        for (; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += abase[p * a_p_stride] * b[p * n + j];
            crow[j] = accumulate ? crow[j] + acc : acc;
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
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
             bool accumulate) {
    // b is (n, k); transpose it once so the row-blocked kernel applies.
    // Raw buffer: no library templates get instantiated under this target.
    thread_local double* bt = nullptr;
    thread_local std::size_t capacity = 0;
    if (capacity < k * n) {
        delete[] bt;
        capacity = k * n;
        bt = new double[capacity];
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = 0; p < k; ++p) bt[p * n + j] = b[j * k + p];
    }
    gemm_rowblock(m, n, k, a, k, 1, bt, c, accumulate);
}

void add(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_acc(std::size_t n, const double* a, const double* b, double* y) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i,
                         _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += a[i] * b[i];
}

double sum(std::size_t n, const double* x) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

// For x in [-700, 0]: x = n ln2 + r with |r| <= ln2/2, q = expm1(r) from a
// degree-13 Taylor polynomial, scale = 2^n. Then exp(x) = scale (1 + q) and
// expm1(x) = scale q + (scale - 1), which keeps small |x| accurate.
inline void exp_parts(__m256d x, __m256d& scale, __m256d& q) {
    x = _mm256_max_pd(x, _mm256_set1_pd(-700.0));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

    static constexpr double kInvFact[] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
        1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
        1.0 / 6.0,          0.5,               1.0,
    };
    q = _mm256_set1_pd(kInvFact[0]);
    for (std::size_t i = 1; i < sizeof(kInvFact) / sizeof(double); ++i) {
        q = _mm256_fmadd_pd(q, r, _mm256_set1_pd(kInvFact[i]));
    }
    q = _mm256_mul_pd(q, r);

    const __m256i bits = _mm256_castpd_si256(_mm256_add_pd(n, _mm256_set1_pd(6755399441055744.0)));
    scale = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52));
}

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline __m256d sigmoid4(__m256d x) {
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d scale, q;
    exp_parts(_mm256_sub_pd(_mm256_setzero_pd(), abs_pd(x)), scale, q);
    const __m256d e = _mm256_fmadd_pd(scale, q, scale);
    const __m256d inv = _mm256_div_pd(one, _mm256_add_pd(one, e));
    const __m256d neg = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ);
    return _mm256_blendv_pd(inv, _mm256_mul_pd(e, inv), neg);
}

inline __m256d tanh4(__m256d x) {
    const __m256d sign = _mm256_and_pd(x, _mm256_set1_pd(-0.0));
    __m256d scale, q;
    exp_parts(_mm256_mul_pd(_mm256_set1_pd(-2.0), abs_pd(x)), scale, q);
    const __m256d m = _mm256_fmadd_pd(scale, q, _mm256_sub_pd(scale, _mm256_set1_pd(1.0)));
    const __m256d t = _mm256_div_pd(_mm256_sub_pd(_mm256_setzero_pd(), m), _mm256_add_pd(_mm256_set1_pd(2.0), m));
    return _mm256_or_pd(t, sign);
}

void sigmoid(std::size_t n, const double* x, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, sigmoid4(_mm256_loadu_pd(x + i)));
    if (i < n) {
        alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
        _mm256_store_pd(buf, sigmoid4(_mm256_load_pd(buf)));
        for (std::size_t j = i; j < n; ++j) out[j] = buf[j - i];
    }
}

void tanh(std::size_t n, const double* x, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, tanh4(_mm256_loadu_pd(x + i)));
    if (i < n) {
        alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
        _mm256_store_pd(buf, tanh4(_mm256_load_pd(buf)));
        for (std::size_t j = i; j < n; ++j) out[j] = buf[j - i];
    }
}

constexpr KernelTable kAvx2{
    "avx2", gemm_nn, gemm_nt, gemm_tn, add, sub, mul, axpy, mul_acc, sum, dot, sigmoid, tanh,
};

}  // namespace
}  // namespace seriesforge::kernels

#if defined(__clang__)
#pragma clang attribute pop
#elif defined(__GNUC__)
#pragma GCC pop_options
#endif

namespace seriesforge::kernels {

const KernelTable* avx2_table() {
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return supported ? &kAvx2 : nullptr;
}

}  // namespace seriesforge::kernels

#else

namespace seriesforge::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace seriesforge::kernels

#endif
