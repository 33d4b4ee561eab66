#include "seriesforge/numkit/ops.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <cmath>
#include <string>

#include "seriesforge/error.hpp"
#include "seriesforge/kernels/kernels.hpp"
#include "seriesforge/numkit/graph.hpp"

namespace seriesforge::numkit {
namespace {

using detail::BackwardContext;
using detail::BackwardFn;

Tensor emit(std::string_view kind, Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
            BackwardFn backward) {
    auto node = std::make_shared<detail::Node>();
    node->shape = std::move(shape);
    node->value = std::move(value);
    node->kind = kind;
    Graph* graph = Graph::active();
    const bool needs = graph != nullptr && std::any_of(inputs.begin(), inputs.end(),
                                                       [](const Tensor& t) { return t.requires_grad(); });
    if (needs) {
        node->requires_grad = true;
        node->inputs.reserve(inputs.size());
        for (auto& t : inputs) {
            node->inputs.push_back(t.node());
            node->input_requires_grad.push_back(t.requires_grad());
        }
        node->backward = std::move(backward);
        graph->record(node);
    }
    return Tensor(std::move(node));
}

[[noreturn]] void shape_mismatch(std::string_view kind, const Shape& a, const Shape& b, std::string_view why = {}) {
    std::string msg = std::string(kind) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b);
    if (!why.empty()) msg += " (" + std::string(why) + ")";
    throw ShapeError(msg);
}

const kernels::KernelTable& K() { return kernels::active(); }

template <class Fwd, class Deriv>
Tensor unary(std::string_view kind, const Tensor& a, Fwd fwd, Deriv deriv) {
    const auto src = a.data();
    std::vector<double> out(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) out[i] = fwd(src[i]);
    return emit(kind, a.shape(), std::move(out), {a}, [deriv](std::span<const double> g, BackwardContext& ctx) {
        auto ga = ctx.input_grad(0);
        if (ga.empty()) return;
        const auto& x = ctx.input(0).value;
        const auto& y = ctx.output().value;
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * deriv(x[i], y[i]);
    });
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    const Shape& as = a.shape();
    const Shape& bs = b.shape();
    if (as.empty() || bs.size() != 2 || as.back() != bs[0]) shape_mismatch("matmul", as, bs);
    const std::size_t k = bs[0];
    const std::size_t m = bs[1];
    const std::size_t rows = a.size() / k;
    Shape out_shape = as;
    out_shape.back() = m;
    std::vector<double> out(rows * m);
    K().gemm_nn(rows, m, k, a.data().data(), b.data().data(), out.data(), false);
    return emit("matmul", std::move(out_shape), std::move(out), {a, b},
                [rows, m, k](std::span<const double> g, BackwardContext& ctx) {
                    const auto& av = ctx.input(0).value;
                    const auto& bv = ctx.input(1).value;
                    if (auto ga = ctx.input_grad(0); !ga.empty()) {
                        K().gemm_nt(rows, k, m, g.data(), bv.data(), ga.data(), true);
                    }
                    if (auto gb = ctx.input_grad(1); !gb.empty()) {
                        K().gemm_tn(k, m, rows, av.data(), g.data(), gb.data(), true);
                    }
                });
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_mismatch("add", a.shape(), b.shape());
    std::vector<double> out(a.size());
    K().add(out.size(), a.data().data(), b.data().data(), out.data());
    return emit("add", a.shape(), std::move(out), {a, b}, [](std::span<const double> g, BackwardContext& ctx) {
        for (std::size_t k = 0; k < 2; ++k) {
            if (auto gi = ctx.input_grad(k); !gi.empty()) K().axpy(g.size(), 1.0, g.data(), gi.data());
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_mismatch("sub", a.shape(), b.shape());
    std::vector<double> out(a.size());
    K().sub(out.size(), a.data().data(), b.data().data(), out.data());
    return emit("sub", a.shape(), std::move(out), {a, b}, [](std::span<const double> g, BackwardContext& ctx) {
        if (auto ga = ctx.input_grad(0); !ga.empty()) K().axpy(g.size(), 1.0, g.data(), ga.data());
        if (auto gb = ctx.input_grad(1); !gb.empty()) K().axpy(g.size(), -1.0, g.data(), gb.data());
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_mismatch("mul", a.shape(), b.shape());
    std::vector<double> out(a.size());
    K().mul(out.size(), a.data().data(), b.data().data(), out.data());
    return emit("mul", a.shape(), std::move(out), {a, b}, [](std::span<const double> g, BackwardContext& ctx) {
        const auto& av = ctx.input(0).value;
        const auto& bv = ctx.input(1).value;
        if (auto ga = ctx.input_grad(0); !ga.empty()) K().mul_acc(g.size(), g.data(), bv.data(), ga.data());
        if (auto gb = ctx.input_grad(1); !gb.empty()) K().mul_acc(g.size(), g.data(), av.data(), gb.data());
    });
}

Tensor scale(const Tensor& a, double factor) {
    std::vector<double> out(a.size(), 0.0);
    K().axpy(out.size(), factor, a.data().data(), out.data());
    return emit("scale", a.shape(), std::move(out), {a}, [factor](std::span<const double> g, BackwardContext& ctx) {
        if (auto ga = ctx.input_grad(0); !ga.empty()) K().axpy(g.size(), factor, g.data(), ga.data());
    });
}

Tensor shift(const Tensor& a, double offset) {
    const auto src = a.data();
    std::vector<double> out(src.begin(), src.end());
    for (double& v : out) v += offset;
    return emit("shift", a.shape(), std::move(out), {a}, [](std::span<const double> g, BackwardContext& ctx) {
        if (auto ga = ctx.input_grad(0); !ga.empty()) K().axpy(g.size(), 1.0, g.data(), ga.data());
    });
}

Tensor sigmoid(const Tensor& a) {
    return unary("sigmoid", a, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
    return unary(
        "tanh", a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor square(const Tensor& a) {
    return unary(
        "square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor sqrt(const Tensor& a) {
    for (double v : a.data()) {
        if (!(v >= 0.0)) throw DomainError("sqrt: negative or NaN input " + std::to_string(v));
    }
    return unary(
        "sqrt", a, [](double x) { return std::sqrt(x); },
        [](double, double y) { return y > 0.0 ? 0.5 / y : 0.0; });
}

Tensor abs(const Tensor& a) {
    return unary(
        "abs", a, [](double x) { return std::fabs(x); },
        [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor softplus(const Tensor& a) {
    return unary(
        "softplus", a, [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); },
        [](double x, double) { return stable_sigmoid(x); });
}

Tensor concat_last(std::span<const Tensor> parts) {
    if (parts.empty()) throw ShapeError("concat_last: no operands");
    const Shape& first = parts[0].shape();
    if (first.empty()) throw ShapeError("concat_last: scalar operand");
    const std::size_t rows = parts[0].size() / first.back();
    std::vector<std::size_t> widths;
    std::size_t total = 0;
    for (const auto& p : parts) {
        const Shape& s = p.shape();
        if (s.size() != first.size() || !std::equal(s.begin(), s.end() - 1, first.begin())) {
            shape_mismatch("concat_last", first, s, "leading axes differ");
        }
        widths.push_back(s.back());
        total += s.back();
    }
    Shape out_shape = first;
    out_shape.back() = total;
    std::vector<double> out(rows * total);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto src = parts[k].data();
        for (std::size_t r = 0; r < rows; ++r) {
            std::copy_n(src.data() + r * widths[k], widths[k], out.data() + r * total + offset);
        }
        offset += widths[k];
    }
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    return emit("concat_last", std::move(out_shape), std::move(out), std::move(inputs),
                [rows, total, widths](std::span<const double> g, BackwardContext& ctx) {
                    std::size_t off = 0;
                    for (std::size_t k = 0; k < widths.size(); ++k) {
                        if (auto gk = ctx.input_grad(k); !gk.empty()) {
                            for (std::size_t r = 0; r < rows; ++r) {
                                K().axpy(widths[k], 1.0, g.data() + r * total + off, gk.data() + r * widths[k]);
                            }
                        }
                        off += widths[k];
                    }
                });
}

Tensor slice_time(const Tensor& x, std::size_t t) {
    const Shape& s = x.shape();
    if (s.size() < 2) throw ShapeError("slice_time: need rank >= 2, got " + shape_str(s));
    const std::size_t n = s[0];
    const std::size_t steps = s[1];
    if (t >= steps) throw ShapeError("slice_time: index " + std::to_string(t) + " outside time axis of " + shape_str(s));
    const std::size_t inner = x.size() / (n * steps);
    Shape out_shape{n};
    out_shape.insert(out_shape.end(), s.begin() + 2, s.end());
    std::vector<double> out(n * inner);
    const auto src = x.data();
    for (std::size_t i = 0; i < n; ++i) {
        std::copy_n(src.data() + (i * steps + t) * inner, inner, out.data() + i * inner);
    }
    return emit("slice_time", std::move(out_shape), std::move(out), {x},
                [n, steps, inner, t](std::span<const double> g, BackwardContext& ctx) {
                    auto gx = ctx.input_grad(0);
                    if (gx.empty()) return;
                    for (std::size_t i = 0; i < n; ++i) {
                        K().axpy(inner, 1.0, g.data() + i * inner, gx.data() + (i * steps + t) * inner);
                    }
                });
}

Tensor slice_time_range(const Tensor& x, std::size_t begin, std::size_t end) {
    const Shape& s = x.shape();
    if (s.size() < 2) throw ShapeError("slice_time_range: need rank >= 2, got " + shape_str(s));
    const std::size_t n = s[0];
    const std::size_t steps = s[1];
    if (begin >= end || end > steps) {
        throw ShapeError("slice_time_range: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") invalid for " + shape_str(s));
    }
    const std::size_t inner = x.size() / (n * steps);
    const std::size_t len = end - begin;
    Shape out_shape = s;
    out_shape[1] = len;
    std::vector<double> out(n * len * inner);
    const auto src = x.data();
    for (std::size_t i = 0; i < n; ++i) {
        std::copy_n(src.data() + (i * steps + begin) * inner, len * inner, out.data() + i * len * inner);
    }
    return emit("slice_time_range", std::move(out_shape), std::move(out), {x},
                [n, steps, inner, begin, len](std::span<const double> g, BackwardContext& ctx) {
                    auto gx = ctx.input_grad(0);
                    if (gx.empty()) return;
                    for (std::size_t i = 0; i < n; ++i) {
                        K().axpy(len * inner, 1.0, g.data() + i * len * inner, gx.data() + (i * steps + begin) * inner);
                    }
                });
}

Tensor stack_time(std::span<const Tensor> steps) {
    if (steps.empty()) throw ShapeError("stack_time: no operands");
    const Shape& s0 = steps[0].shape();
    if (s0.empty()) throw ShapeError("stack_time: scalar operand");
    for (const auto& st : steps) {
        if (st.shape() != s0) shape_mismatch("stack_time", s0, st.shape());
    }
    const std::size_t n = s0[0];
    const std::size_t count = steps.size();
    const std::size_t inner = steps[0].size() / n;
    Shape out_shape{n, count};
    out_shape.insert(out_shape.end(), s0.begin() + 1, s0.end());
    std::vector<double> out(n * count * inner);
    for (std::size_t t = 0; t < count; ++t) {
        const auto src = steps[t].data();
        for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(src.data() + i * inner, inner, out.data() + (i * count + t) * inner);
        }
    }
    std::vector<Tensor> inputs(steps.begin(), steps.end());
    return emit("stack_time", std::move(out_shape), std::move(out), std::move(inputs),
                [n, count, inner](std::span<const double> g, BackwardContext& ctx) {
                    for (std::size_t t = 0; t < count; ++t) {
                        auto gt = ctx.input_grad(t);
                        if (gt.empty()) continue;
                        for (std::size_t i = 0; i < n; ++i) {
                            K().axpy(inner, 1.0, g.data() + (i * count + t) * inner, gt.data() + i * inner);
                        }
                    }
                });
}

namespace {

// For every flat input index, the flat output index it reduces into.
std::pair<Shape, std::vector<std::size_t>> reduction_map(const Shape& s, std::span<const std::size_t> axes,
                                                         std::string_view kind) {
    std::vector<bool> reduced(s.size(), false);
    for (std::size_t ax : axes) {
        if (ax >= s.size() || reduced[ax]) {
            throw ShapeError(std::string(kind) + ": invalid axis " + std::to_string(ax) + " for " + shape_str(s));
        }
        reduced[ax] = true;
    }
    Shape out_shape;
    for (std::size_t d = 0; d < s.size(); ++d) {
        if (!reduced[d]) out_shape.push_back(s[d]);
    }
    // Output stride contributed by each input axis (0 for reduced axes).
    std::vector<std::size_t> ostride(s.size(), 0);
    std::size_t acc = 1;
    for (std::size_t d = s.size(); d-- > 0;) {
        if (!reduced[d]) {
            ostride[d] = acc;
            acc *= s[d];
        }
    }
    const std::size_t total = shape_size(s);
    std::vector<std::size_t> map(total);
    std::vector<std::size_t> idx(s.size(), 0);
    std::size_t out = 0;
    for (std::size_t i = 0; i < total; ++i) {
        map[i] = out;
        for (std::size_t d = s.size(); d-- > 0;) {
            ++idx[d];
            out += ostride[d];
            if (idx[d] < s[d]) break;
            out -= ostride[d] * idx[d];
            idx[d] = 0;
        }
    }
    return {std::move(out_shape), std::move(map)};
}

Tensor reduce(std::string_view kind, const Tensor& a, std::span<const std::size_t> axes, bool mean) {
    auto [out_shape, map] = reduction_map(a.shape(), axes, kind);
    const std::size_t out_size = shape_size(out_shape);
    const double factor = mean ? static_cast<double>(out_size) / static_cast<double>(a.size()) : 1.0;
    std::vector<double> out(out_size, 0.0);
    const auto src = a.data();
    for (std::size_t i = 0; i < src.size(); ++i) out[map[i]] += src[i];
    if (mean) {
        for (double& v : out) v *= factor;
    }
    return emit(kind, std::move(out_shape), std::move(out), {a},
                [map = std::move(map), factor](std::span<const double> g, BackwardContext& ctx) {
                    auto ga = ctx.input_grad(0);
                    if (ga.empty()) return;
                    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[map[i]] * factor;
                });
}

}  // namespace

Tensor reduce_sum(const Tensor& a, std::span<const std::size_t> axes) { return reduce("reduce_sum", a, axes, false); }

Tensor reduce_mean(const Tensor& a, std::span<const std::size_t> axes) { return reduce("reduce_mean", a, axes, true); }

Tensor sum_all(const Tensor& a) {
    const double total = K().sum(a.size(), a.data().data());
    return emit("reduce_sum", Shape{}, {total}, {a}, [](std::span<const double> g, BackwardContext& ctx) {
        auto ga = ctx.input_grad(0);
        for (double& v : ga) v += g[0];
    });
}

Tensor mean_all(const Tensor& a) {
    const double inv = 1.0 / static_cast<double>(a.size());
    const double total = K().sum(a.size(), a.data().data()) * inv;
    return emit("reduce_mean", Shape{}, {total}, {a}, [inv](std::span<const double> g, BackwardContext& ctx) {
        auto ga = ctx.input_grad(0);
        for (double& v : ga) v += g[0] * inv;
    });
}

Tensor broadcast_to(const Tensor& v, const Shape& shape) {
    const Shape& vs = v.shape();
    if (vs.size() > shape.size() || !std::equal(vs.begin(), vs.end(), shape.end() - static_cast<long>(vs.size()))) {
        shape_mismatch("broadcast_to", vs, shape, "operand must match trailing axes");
    }
    const std::size_t inner = v.size();
    const std::size_t reps = shape_size(shape) / inner;
    std::vector<double> out(reps * inner);
    const auto src = v.data();
    for (std::size_t r = 0; r < reps; ++r) std::copy_n(src.data(), inner, out.data() + r * inner);
    return emit("broadcast_to", shape, std::move(out), {v}, [inner, reps](std::span<const double> g, BackwardContext& ctx) {
        auto gv = ctx.input_grad(0);
        if (gv.empty()) return;
        for (std::size_t r = 0; r < reps; ++r) K().axpy(inner, 1.0, g.data() + r * inner, gv.data());
    });
}

namespace {

struct GruTape {
    std::vector<double> w_pack;  // (I, 3H): [w_z | w_r | w_h]
    std::vector<double> u_zr;    // (H, 2H): [u_z | u_r]
    std::vector<double> gates;   // (T, N, 3H): z | r | c
    std::vector<double> states;  // (T + 1, N, H); states[0] = h0
    std::vector<double> rh;      // (T, N, H): r * h_{t-1}
};

void require_shape(const Tensor& t, const Shape& expected, std::string_view what) {
    if (t.shape() != expected) shape_mismatch("gru_sequence", t.shape(), expected, what);
}

}  // namespace

Tensor gru_sequence(const Tensor& seq, const GruWeights& w, const Tensor& h0) {
    if (seq.rank() != 3) throw ShapeError("gru_sequence: expected (N, T, I), got " + shape_str(seq.shape()));
    const std::size_t n = seq.dim(0);
    const std::size_t steps = seq.dim(1);
    const std::size_t in = seq.dim(2);
    if (w.u_z.rank() != 2) throw ShapeError("gru_sequence: u_z must be (H, H), got " + shape_str(w.u_z.shape()));
    const std::size_t hd = w.u_z.dim(0);
    for (const Tensor* t : {&w.w_z, &w.w_r, &w.w_h}) require_shape(*t, {in, hd}, "input weights must be (I, H)");
    for (const Tensor* t : {&w.u_z, &w.u_r, &w.u_h}) require_shape(*t, {hd, hd}, "recurrent weights must be (H, H)");
    for (const Tensor* t : {&w.b_z, &w.b_r, &w.b_h}) require_shape(*t, {hd}, "biases must be (H)");
    require_shape(h0, {n, hd}, "h0 must be (N, H)");

    const std::size_t h3 = 3 * hd;
    const std::size_t h2 = 2 * hd;
    const std::size_t nh = n * hd;
    auto tape = std::make_shared<GruTape>();
    tape->w_pack.resize(in * h3);
    {
        const std::array<std::span<const double>, 3> ws{w.w_z.data(), w.w_r.data(), w.w_h.data()};
        for (std::size_t i = 0; i < in; ++i) {
            for (std::size_t g = 0; g < 3; ++g) std::copy_n(ws[g].data() + i * hd, hd, &tape->w_pack[i * h3 + g * hd]);
        }
    }
    tape->u_zr.resize(hd * h2);
    for (std::size_t j = 0; j < hd; ++j) {
        std::copy_n(w.u_z.data().data() + j * hd, hd, &tape->u_zr[j * h2]);
        std::copy_n(w.u_r.data().data() + j * hd, hd, &tape->u_zr[j * h2 + hd]);
    }

    // Input projections for every (sample, step) row at once, biases added.
    std::vector<double> proj(n * steps * h3);
    K().gemm_nn(n * steps, h3, in, seq.data().data(), tape->w_pack.data(), proj.data(), false);
    {
        const std::array<std::span<const double>, 3> bs{w.b_z.data(), w.b_r.data(), w.b_h.data()};
        for (std::size_t row = 0; row < n * steps; ++row) {
            for (std::size_t g = 0; g < 3; ++g) K().axpy(hd, 1.0, bs[g].data(), &proj[row * h3 + g * hd]);
        }
    }

    tape->gates.resize(steps * n * h3);
    tape->states.resize((steps + 1) * nh);
    tape->rh.resize(steps * nh);
    std::copy(h0.data().begin(), h0.data().end(), tape->states.begin());
    std::vector<double> rec_zr(n * h2);
    std::vector<double> rec_h(nh);
    const double* u_h = w.u_h.data().data();
    for (std::size_t t = 0; t < steps; ++t) {
        const double* hp = &tape->states[t * nh];
        double* hn = &tape->states[(t + 1) * nh];
        double* gt = &tape->gates[t * n * h3];
        double* rht = &tape->rh[t * nh];
        K().gemm_nn(n, h2, hd, hp, tape->u_zr.data(), rec_zr.data(), false);
        for (std::size_t i = 0; i < n; ++i) {
            const double* p = &proj[(i * steps + t) * h3];
            double* zr = &gt[i * h3];
            K().add(h2, p, &rec_zr[i * h2], zr);
            K().sigmoid(h2, zr, zr);
            K().mul(hd, zr + hd, &hp[i * hd], &rht[i * hd]);
        }
        K().gemm_nn(n, hd, hd, rht, u_h, rec_h.data(), false);
        for (std::size_t i = 0; i < n; ++i) {
            const double* p = &proj[(i * steps + t) * h3];
            double* c = &gt[i * h3 + 2 * hd];
            K().add(hd, p + 2 * hd, &rec_h[i * hd], c);
            K().tanh(hd, c, c);
            const double* z = &gt[i * h3];
            const double* prev = &hp[i * hd];
            double* next = &hn[i * hd];
            for (std::size_t j = 0; j < hd; ++j) next[j] = prev[j] + z[j] * (c[j] - prev[j]);
        }
    }

    std::vector<double> out(n * steps * hd);
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(&tape->states[(t + 1) * nh + i * hd], hd, &out[(i * steps + t) * hd]);
        }
    }

    auto backward = [tape, n, steps, in, hd](std::span<const double> g, BackwardContext& ctx) {
        const std::size_t h3 = 3 * hd;
        const std::size_t h2 = 2 * hd;
        const std::size_t nh = n * hd;
        const double* u_h = ctx.input(6).value.data();
        const bool need_u = ctx.input(4).requires_grad || ctx.input(5).requires_grad || ctx.input(6).requires_grad;

        std::vector<double> d_proj(n * steps * h3, 0.0);
        std::vector<double> dh(nh, 0.0);
        std::vector<double> d_uzr(need_u ? hd * h2 : 0, 0.0);
        std::vector<double> d_uh(need_u ? hd * hd : 0, 0.0);
        std::vector<double> dzr(n * h2);
        std::vector<double> dac(nh);
        std::vector<double> drh(nh);

        for (std::size_t t = steps; t-- > 0;) {
            const double* hp = &tape->states[t * nh];
            const double* gt = &tape->gates[t * n * h3];
            const double* rht = &tape->rh[t * nh];
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < hd; ++j) {
                    const double dht = g[(i * steps + t) * hd + j] + dh[i * hd + j];
                    const double z = gt[i * h3 + j];
                    const double c = gt[i * h3 + 2 * hd + j];
                    const double prev = hp[i * hd + j];
                    dac[i * hd + j] = dht * z * (1.0 - c * c);
                    dzr[i * h2 + j] = dht * (c - prev) * z * (1.0 - z);
                    dh[i * hd + j] = dht * (1.0 - z);
                }
            }
            K().gemm_nt(n, hd, hd, dac.data(), u_h, drh.data(), false);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < hd; ++j) {
                    const double r = gt[i * h3 + hd + j];
                    dzr[i * h2 + hd + j] = drh[i * hd + j] * hp[i * hd + j] * r * (1.0 - r);
                    dh[i * hd + j] += drh[i * hd + j] * r;
                }
            }
            K().gemm_nt(n, hd, h2, dzr.data(), tape->u_zr.data(), dh.data(), true);
            if (need_u) {
                K().gemm_tn(hd, h2, n, hp, dzr.data(), d_uzr.data(), true);
                K().gemm_tn(hd, hd, n, rht, dac.data(), d_uh.data(), true);
            }
            for (std::size_t i = 0; i < n; ++i) {
                double* row = &d_proj[(i * steps + t) * h3];
                std::copy_n(&dzr[i * h2], h2, row);
                std::copy_n(&dac[i * hd], hd, row + h2);
            }
        }

        if (auto gh0 = ctx.input_grad(10); !gh0.empty()) K().axpy(nh, 1.0, dh.data(), gh0.data());
        if (auto gs = ctx.input_grad(0); !gs.empty()) {
            K().gemm_nt(n * steps, in, h3, d_proj.data(), tape->w_pack.data(), gs.data(), true);
        }
        if (ctx.input(1).requires_grad || ctx.input(2).requires_grad || ctx.input(3).requires_grad) {
            std::vector<double> dw(in * h3);
            K().gemm_tn(in, h3, n * steps, ctx.input(0).value.data(), d_proj.data(), dw.data(), false);
            for (std::size_t gi = 0; gi < 3; ++gi) {
                auto gw = ctx.input_grad(1 + gi);
                if (gw.empty()) continue;
                for (std::size_t i = 0; i < in; ++i) K().axpy(hd, 1.0, &dw[i * h3 + gi * hd], &gw[i * hd]);
            }
        }
        for (std::size_t gi = 0; gi < 3; ++gi) {
            auto gb = ctx.input_grad(7 + gi);
            if (gb.empty()) continue;
            for (std::size_t row = 0; row < n * steps; ++row) K().axpy(hd, 1.0, &d_proj[row * h3 + gi * hd], gb.data());
        }
        if (need_u) {
            if (auto gz = ctx.input_grad(4); !gz.empty()) {
                for (std::size_t j = 0; j < hd; ++j) K().axpy(hd, 1.0, &d_uzr[j * h2], &gz[j * hd]);
            }
            if (auto gr = ctx.input_grad(5); !gr.empty()) {
                for (std::size_t j = 0; j < hd; ++j) K().axpy(hd, 1.0, &d_uzr[j * h2 + hd], &gr[j * hd]);
            }
            if (auto gh = ctx.input_grad(6); !gh.empty()) K().axpy(hd * hd, 1.0, d_uh.data(), gh.data());
        }
    };

    return emit("gru_sequence", {n, steps, hd}, std::move(out),
                {seq, w.w_z, w.w_r, w.w_h, w.u_z, w.u_r, w.u_h, w.b_z, w.b_r, w.b_h, h0}, std::move(backward));
}

}  // namespace seriesforge::numkit
