#include "seriesforge/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace seriesforge::kernels {
namespace {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
             bool accumulate) {
    if (!accumulate) std::fill(c, c + m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[i * k + p];
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
             bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
            c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
        }
    }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
             bool accumulate) {
    if (!accumulate) std::fill(c, c + m * n, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
        const double* arow = a + p * m;
        const double* brow = b + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double av = arow[i];
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void add(std::size_t n, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(std::size_t n, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(std::size_t n, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul_acc(std::size_t n, const double* a, const double* b, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * b[i];
}

double sum(std::size_t n, const double* x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double dot(std::size_t n, const double* x, const double* y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

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

constexpr KernelTable kScalar{
    "scalar", gemm_nn, gemm_nt, gemm_tn, add, sub, mul, axpy, mul_acc, sum, dot, sigmoid, tanh,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace seriesforge::kernels
