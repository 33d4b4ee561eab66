#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "seriesforge/error.hpp"
#include "seriesforge/numkit/graph.hpp"
#include "seriesforge/numkit/ops.hpp"
#include "seriesforge/numkit/rng.hpp"

using namespace seriesforge;
using namespace seriesforge::numkit;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, bool param = false) {
    std::vector<double> v(shape_size(shape));
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return param ? Tensor::parameter(std::move(shape), std::move(v)) : Tensor(std::move(shape), std::move(v));
}

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST(Tensor, ShapeMustMatchData) {
    EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), ShapeError);
    EXPECT_THROW(Tensor({2, 0}, {}), ShapeError);
    const Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
    EXPECT_EQ(t.size(), 6u);
    EXPECT_EQ(t.rank(), 2u);
    EXPECT_EQ(t.dim(1), 3u);
    EXPECT_EQ(shape_str(t.shape()), "(2,3)");
}

TEST(Tensor, ScalarHasEmptyShape) {
    const Tensor s = Tensor::scalar(4.5);
    EXPECT_EQ(s.rank(), 0u);
    EXPECT_EQ(s.item(), 4.5);
    EXPECT_THROW(Tensor({2}, {1, 2}).item(), ContractError);
}

TEST(Tensor, DetachAndCloneCopyStorage) {
    Tensor p = Tensor::parameter({2}, {1, 2});
    Tensor d = p.detach();
    Tensor c = p.clone();
    p.mutable_data()[0] = 9;
    EXPECT_EQ(d.at(0), 1);
    EXPECT_EQ(c.at(0), 1);
    EXPECT_FALSE(d.requires_grad());
    EXPECT_TRUE(c.requires_grad());
}

TEST(Ops, MatmulIdentityReturnsOperand) {
    const Tensor eye({2, 2}, {1, 0, 0, 1});
    const Tensor a({2, 2}, {3.5, -1, 2, 7});
    EXPECT_EQ(values(matmul(eye, a)), values(a));
}

TEST(Ops, MatmulTreatsLeadingAxesAsRows) {
    const Tensor a({2, 2, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    const Tensor b({3, 1}, {1, 0, -1});
    const Tensor c = matmul(a, b);
    EXPECT_EQ(c.shape(), (Shape{2, 2, 1}));
    EXPECT_EQ(values(c), (std::vector<double>{-2, -2, -2, -2}));
}

TEST(Ops, SigmoidAndTanhAtOrigin) {
    const Tensor z({1}, {0.0});
    EXPECT_EQ(sigmoid(z).at(0), 0.5);
    EXPECT_EQ(numkit::tanh(z).at(0), 0.0);
}

TEST(Ops, SigmoidIsStableForLargeMagnitudes) {
    const Tensor x({2}, {-800.0, 800.0});
    const Tensor y = sigmoid(x);
    EXPECT_EQ(y.at(0), 0.0);
    EXPECT_EQ(y.at(1), 1.0);
    const Tensor s = softplus(Tensor({2}, {-800.0, 800.0}));
    EXPECT_EQ(s.at(0), 0.0);
    EXPECT_EQ(s.at(1), 800.0);
}

TEST(Ops, ReduceMeanOfFourValues) {
    const Tensor x({4}, {1, 2, 3, 6});
    EXPECT_EQ(mean_all(x).item(), 3.0);
    EXPECT_EQ(sum_all(x).item(), 12.0);
}

TEST(Ops, ReduceOverChosenAxes) {
    const Tensor x({2, 3}, {1, 2, 3, 4, 5, 6});
    const std::array<std::size_t, 1> rows{0};
    const std::array<std::size_t, 1> cols{1};
    EXPECT_EQ(values(reduce_sum(x, rows)), (std::vector<double>{5, 7, 9}));
    EXPECT_EQ(values(reduce_mean(x, cols)), (std::vector<double>{2, 5}));
    const std::array<std::size_t, 2> both{0, 1};
    EXPECT_EQ(reduce_sum(x, both).rank(), 0u);
}

TEST(Ops, ElementwiseArithmetic) {
    const Tensor a({3}, {1, 2, 3});
    const Tensor b({3}, {4, 5, 6});
    EXPECT_EQ(values(a + b), (std::vector<double>{5, 7, 9}));
    EXPECT_EQ(values(a - b), (std::vector<double>{-3, -3, -3}));
    EXPECT_EQ(values(a * b), (std::vector<double>{4, 10, 18}));
    EXPECT_EQ(values(a * 2.0), (std::vector<double>{2, 4, 6}));
    EXPECT_EQ(values(shift(a, -1.0)), (std::vector<double>{0, 1, 2}));
    EXPECT_EQ(values(square(a)), (std::vector<double>{1, 4, 9}));
    EXPECT_EQ(values(numkit::abs(Tensor({2}, {-2, 3}))), (std::vector<double>{2, 3}));
    EXPECT_EQ(values(numkit::sqrt(Tensor({2}, {4, 0}))), (std::vector<double>{2, 0}));
}

TEST(Ops, ShapeMismatchNamesPrimitiveAndShapes) {
    const Tensor a({2, 3}, std::vector<double>(6, 1.0));
    const Tensor b({3, 2}, std::vector<double>(6, 1.0));
    try {
        add(a, b);
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("add"), std::string::npos) << msg;
        EXPECT_NE(msg.find("(2,3)"), std::string::npos) << msg;
        EXPECT_NE(msg.find("(3,2)"), std::string::npos) << msg;
    }
    EXPECT_THROW(matmul(a, a), ShapeError);
    EXPECT_THROW(broadcast_to(Tensor({2}, {1, 2}), {3, 3}), ShapeError);
}

TEST(Ops, SqrtOfNegativeIsDomainError) { EXPECT_THROW(numkit::sqrt(Tensor({2}, {1.0, -1e-3})), DomainError); }

TEST(Ops, ConcatSliceStack) {
    const Tensor a({1, 2, 1}, {1, 2});
    const Tensor b({1, 2, 2}, {3, 4, 5, 6});
    const std::array<Tensor, 2> parts{a, b};
    const Tensor c = concat_last(parts);
    EXPECT_EQ(c.shape(), (Shape{1, 2, 3}));
    EXPECT_EQ(values(c), (std::vector<double>{1, 3, 4, 2, 5, 6}));

    const Tensor s = slice_time(c, 1);
    EXPECT_EQ(s.shape(), (Shape{1, 3}));
    EXPECT_EQ(values(s), (std::vector<double>{2, 5, 6}));
    EXPECT_EQ(values(slice_time_range(c, 1, 2)), values(s));
    EXPECT_THROW(slice_time(c, 2), ShapeError);

    const std::array<Tensor, 2> steps{slice_time(c, 0), slice_time(c, 1)};
    EXPECT_EQ(values(stack_time(steps)), values(c));
}

TEST(Ops, BroadcastRepeatsOverLeadingAxes) {
    const Tensor v({2}, {1, -1});
    const Tensor b = broadcast_to(v, {2, 2, 2});
    EXPECT_EQ(values(b), (std::vector<double>{1, -1, 1, -1, 1, -1, 1, -1}));
}

TEST(Ops, ForwardIsPure) {
    Rng rng(3);
    const Tensor a = random_tensor({4, 5}, rng);
    const Tensor w = random_tensor({5, 3}, rng);
    const auto once = values(numkit::tanh(matmul(a, w)));
    const auto twice = values(numkit::tanh(matmul(a, w)));
    EXPECT_EQ(once, twice);
}

TEST(Graph, RecordsOnlyWhenAnOperandRequiresGrad) {
    Graph graph;
    const Tensor c({2}, {1, 2});
    const Tensor p = Tensor::parameter({2}, {3, 4});
    (void)(c + c);
    EXPECT_EQ(graph.size(), 0u);
    (void)(c + p);
    EXPECT_EQ(graph.size(), 1u);
    {
        NoGradGuard guard;
        (void)(p * p);
    }
    EXPECT_EQ(graph.size(), 1u);
}

TEST(Graph, InputsPrecedeOutputs) {
    Graph graph;
    Rng rng(5);
    const Tensor x = random_tensor({3, 4}, rng, true);
    const Tensor w = random_tensor({4, 2}, rng, true);
    (void)mean_all(square(sigmoid(matmul(x, w))));
    const auto& nodes = graph.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const auto& in : nodes[i]->inputs) {
            if (in->leaf) continue;
            bool earlier = false;
            for (std::size_t j = 0; j < i; ++j) earlier = earlier || nodes[j] == in;
            EXPECT_TRUE(earlier);
        }
    }
}

TEST(Backward, SquareAtThree) {
    Graph graph;
    const Tensor x = Tensor::parameter({}, {3.0});
    const auto grads = backward(graph, square(x));
    EXPECT_EQ(grads.of(x).item(), 6.0);
}

TEST(Backward, MeanSigmoidAtZero) {
    Graph graph;
    const Tensor x = Tensor::parameter({4}, {0, 0, 0, 0});
    const auto grads = backward(graph, mean_all(sigmoid(x)));
    const Tensor gx = grads.of(x);
    for (double g : gx.data()) EXPECT_DOUBLE_EQ(g, 0.0625);
}

TEST(Backward, UnusedLeafGetsExactZero) {
    Graph graph;
    const Tensor x = Tensor::parameter({2}, {1, 2});
    const Tensor unused = Tensor::parameter({3}, {1, 2, 3});
    const auto grads = backward(graph, sum_all(square(x)));
    EXPECT_FALSE(grads.reached(unused));
    const Tensor g = grads.of(unused);
    EXPECT_EQ(g.shape(), unused.shape());
    for (double v : g.data()) EXPECT_EQ(v, 0.0);
}

TEST(Backward, NonScalarLossIsContractError) {
    Graph graph;
    const Tensor x = Tensor::parameter({2}, {1, 2});
    EXPECT_THROW(backward(graph, square(x)), ContractError);
}

TEST(Backward, ReusedParameterAccumulates) {
    Graph graph;
    const Tensor x = Tensor::parameter({}, {2.0});
    const auto grads = backward(graph, x * x + x * 3.0);
    EXPECT_EQ(grads.of(x).item(), 7.0);
}

TEST(Backward, FreezeGuardStopsWeightGradientButPassesThrough) {
    Rng rng(9);
    const Tensor x = random_tensor({2, 3}, rng, true);
    const Tensor w = random_tensor({3, 1}, rng, true);
    Graph graph;
    Tensor loss;
    {
        FreezeGuard freeze({w});
        EXPECT_FALSE(w.requires_grad());
        loss = sum_all(matmul(x, w));
    }
    EXPECT_TRUE(w.requires_grad());
    const auto grads = backward(graph, loss);
    EXPECT_FALSE(grads.reached(w));
    // d/dx_ij sum(x w) = w_j
    const Tensor gx = grads.of(x);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(gx.at(i * 3 + j), w.at(j));
    }
}

TEST(Backward, AbsAndSqrtDerivativeAtZeroIsZero) {
    Graph graph;
    const Tensor x = Tensor::parameter({2}, {0.0, 0.0});
    const auto grads = backward(graph, sum_all(numkit::abs(x)) + sum_all(numkit::sqrt(x)));
    const Tensor gx = grads.of(x);
    for (double g : gx.data()) EXPECT_EQ(g, 0.0);
}

TEST(Rng, EqualSeedsGiveEqualStreams) {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1'000'000; ++i) {
        const auto va = a.next_u64();
        ASSERT_EQ(va, b.next_u64());
        differs = differs || va != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, StateRoundTrips) {
    Rng a(7);
    for (int i = 0; i < 100; ++i) a.uniform();
    Rng b = Rng::from_state(a.state());
    EXPECT_EQ(a, b);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(Rng, UniformRangeAndBelow) {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_LT(rng.below(7), 7u);
    }
}
