#include "seriesforge/numkit/tensor.hpp"

#include <sstream>

#include "seriesforge/error.hpp"

namespace seriesforge::numkit {

std::size_t shape_size(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ')';
    return os.str();
}

namespace {

detail::NodePtr make_leaf(Shape shape, std::vector<double> data, bool requires_grad) {
    for (std::size_t d : shape) {
        if (d == 0) throw ShapeError("tensor: zero extent in shape " + shape_str(shape));
    }
    if (shape_size(shape) != data.size()) {
        throw ShapeError("tensor: shape " + shape_str(shape) + " holds " + std::to_string(shape_size(shape)) +
                         " values, got " + std::to_string(data.size()));
    }
    auto node = std::make_shared<detail::Node>();
    node->shape = std::move(shape);
    node->value = std::move(data);
    node->requires_grad = requires_grad;
    return node;
}

const detail::Node& checked(const detail::NodePtr& node) {
    if (!node) throw ContractError("tensor: use of an undefined tensor");
    return *node;
}

}  // namespace

Tensor::Tensor(Shape shape, std::vector<double> data) : node_(make_leaf(std::move(shape), std::move(data), false)) {}

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(Shape shape, double value) {
    const std::size_t n = shape_size(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, {value}); }

Tensor Tensor::parameter(Shape shape, std::vector<double> data) {
    return Tensor(make_leaf(std::move(shape), std::move(data), true));
}

const Shape& Tensor::shape() const { return checked(node_).shape; }

std::size_t Tensor::dim(std::size_t axis) const {
    const Shape& s = shape();
    if (axis >= s.size()) throw ShapeError("tensor: axis " + std::to_string(axis) + " out of range for " + shape_str(s));
    return s[axis];
}

std::size_t Tensor::size() const { return checked(node_).value.size(); }

std::span<const double> Tensor::data() const { return checked(node_).value; }

std::span<double> Tensor::mutable_data() {
    checked(node_);
    if (!node_->leaf) throw ContractError("tensor: cannot write into the result of a primitive");
    return node_->value;
}

double Tensor::item() const {
    const auto& n = checked(node_);
    if (n.value.size() != 1) throw ContractError("tensor: item() on non-scalar shape " + shape_str(n.shape));
    return n.value[0];
}

bool Tensor::requires_grad() const { return checked(node_).requires_grad; }

void Tensor::set_requires_grad(bool on) {
    checked(node_);
    if (!node_->leaf) throw ContractError("tensor: requires_grad can only be toggled on leaves");
    node_->requires_grad = on;
}

Tensor Tensor::detach() const {
    const auto& n = checked(node_);
    return Tensor(n.shape, n.value);
}

Tensor Tensor::clone() const {
    const auto& n = checked(node_);
    return Tensor(make_leaf(n.shape, n.value, n.leaf && n.requires_grad));
}

}  // namespace seriesforge::numkit
