#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seriesforge::numkit {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

class Graph;

namespace detail {

struct Node;
using NodePtr = std::shared_ptr<Node>;

// Gives a primitive's backward rule access to its operands and to the
// gradient buffers of those operands that require a gradient.
class BackwardContext {
public:
    virtual ~BackwardContext() = default;
    virtual const Node& input(std::size_t k) const = 0;
    virtual const Node& output() const = 0;
    // Empty span when operand k does not require a gradient.
    virtual std::span<double> input_grad(std::size_t k) = 0;
};

using BackwardFn = std::function<void(std::span<const double> grad_out, BackwardContext& ctx)>;

struct Node {
    Shape shape;
    std::vector<double> value;
    bool requires_grad = false;
    bool leaf = true;
    std::string_view kind = "leaf";
    Graph* graph = nullptr;
    std::size_t slot = 0;
    std::vector<NodePtr> inputs;
    // requires_grad of each input when the node was recorded.
    std::vector<bool> input_requires_grad;
    BackwardFn backward;
};

}  // namespace detail

// Dense row-major array of doubles. A Tensor is a cheap handle: copies share
// the same node. Leaves created with parameter() take part in differentiation;
// results of primitives are recorded on the thread's active Graph when one of
// their operands requires a gradient.
class Tensor {
public:
    Tensor() = default;
    Tensor(Shape shape, std::vector<double> data);
    explicit Tensor(detail::NodePtr node) : node_(std::move(node)) {}

    static Tensor zeros(Shape shape);
    static Tensor full(Shape shape, double value);
    static Tensor scalar(double value);
    static Tensor parameter(Shape shape, std::vector<double> data);

    bool defined() const noexcept { return node_ != nullptr; }
    const Shape& shape() const;
    std::size_t rank() const { return shape().size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t size() const;

    std::span<const double> data() const;
    // Writable view of a leaf's storage; results of primitives are immutable.
    std::span<double> mutable_data();
    double item() const;
    double at(std::size_t flat_index) const { return data()[flat_index]; }

    bool requires_grad() const;
    void set_requires_grad(bool on);

    // Constant leaf holding a copy of the value.
    Tensor detach() const;
    // Independent leaf with copied storage and the same requires_grad flag.
    Tensor clone() const;

    const detail::NodePtr& node() const { return node_; }
    const detail::Node* id() const noexcept { return node_.get(); }

private:
    detail::NodePtr node_;
};

}  // namespace seriesforge::numkit
