#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "seriesforge/numkit/tensor.hpp"

// Differentiable primitives. Elementwise binary primitives require equal
// shapes; broadcasting is explicit through broadcast_to. Shape violations
// throw ShapeError naming the primitive and both shapes.
namespace seriesforge::numkit {

// a(..., K) x b(K, M) -> (..., M). Leading axes of a are treated as rows.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor shift(const Tensor& a, double offset);

Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor square(const Tensor& a);
// Throws DomainError on negative input. The derivative at 0 is taken as 0.
Tensor sqrt(const Tensor& a);
// Derivative at 0 is taken as 0.
Tensor abs(const Tensor& a);
// log(1 + exp(a)), evaluated stably.
Tensor softplus(const Tensor& a);

Tensor concat_last(std::span<const Tensor> parts);
// x(N, T, ...) -> (N, ...) at time index t.
Tensor slice_time(const Tensor& x, std::size_t t);
// x(N, T, ...) -> (N, end - begin, ...) over time indices [begin, end).
Tensor slice_time_range(const Tensor& x, std::size_t begin, std::size_t end);
// steps[t](N, ...) -> (N, T, ...).
Tensor stack_time(std::span<const Tensor> steps);

// A whole GRU layer as one primitive, with the gate convention of
// nets::GruParams. seq (N, T, I), w_* (I, H), u_* (H, H), b_* (H),
// h0 (N, H) -> hidden states (N, T, H).
struct GruWeights {
    Tensor w_z, w_r, w_h;
    Tensor u_z, u_r, u_h;
    Tensor b_z, b_r, b_h;
};
Tensor gru_sequence(const Tensor& seq, const GruWeights& weights, const Tensor& h0);

// Reductions drop the reduced axes; reducing every axis yields shape ().
Tensor reduce_sum(const Tensor& a, std::span<const std::size_t> axes);
Tensor reduce_mean(const Tensor& a, std::span<const std::size_t> axes);
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);

// Repeats v over leading axes; v.shape() must equal the trailing axes of shape.
Tensor broadcast_to(const Tensor& v, const Shape& shape);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return scale(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }

}  // namespace seriesforge::numkit
