#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "seriesforge/numkit/tensor.hpp"

namespace seriesforge::numkit {

// Tape of primitive applications in creation (hence topological) order.
// Constructing a Graph makes it the active tape of the calling thread until
// it is destroyed; graphs nest. A graph is meant to live for one training
// step: destroying it releases every intermediate value it recorded.
class Graph {
public:
    Graph();
    ~Graph();
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<detail::NodePtr>& nodes() const noexcept { return nodes_; }

    static Graph* active() noexcept;

    void record(const detail::NodePtr& node);

private:
    friend class NoGradGuard;
    std::vector<detail::NodePtr> nodes_;
    Graph* previous_;
};

// Suspends recording on this thread for its lifetime.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    Graph* saved_;
};

// Temporarily clears requires_grad on a set of leaves (e.g. a frozen network
// that gradients must pass through but whose weights are not updated).
class FreezeGuard {
public:
    explicit FreezeGuard(std::vector<Tensor> leaves);
    ~FreezeGuard();
    FreezeGuard(const FreezeGuard&) = delete;
    FreezeGuard& operator=(const FreezeGuard&) = delete;

private:
    std::vector<Tensor> leaves_;
    std::vector<bool> saved_;
};

class Gradients {
public:
    // d loss / d leaf; an exactly-zero tensor when the loss does not depend on it.
    Tensor of(const Tensor& leaf) const;
    bool reached(const Tensor& leaf) const { return grads_.count(leaf.id()) != 0; }

private:
    friend Gradients backward(Graph& graph, const Tensor& loss);
    std::unordered_map<const detail::Node*, std::vector<double>> grads_;
};

// Reverse sweep over graph from a scalar loss. Throws ContractError when loss
// is not a scalar.
Gradients backward(Graph& graph, const Tensor& loss);

}  // namespace seriesforge::numkit
