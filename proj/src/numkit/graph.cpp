#include "seriesforge/numkit/graph.hpp"

#include <algorithm>

#include "seriesforge/error.hpp"

namespace seriesforge::numkit {
namespace {

thread_local Graph* t_active = nullptr;

class SweepContext final : public detail::BackwardContext {
public:
    SweepContext(Graph& graph, std::vector<std::vector<double>>& slots,
                 std::unordered_map<const detail::Node*, std::vector<double>>& leaves)
        : graph_(graph), slots_(slots), leaves_(leaves) {}

    void bind(const detail::Node* node) { node_ = node; }

    const detail::Node& input(std::size_t k) const override { return *node_->inputs[k]; }
    const detail::Node& output() const override { return *node_; }

    std::span<double> input_grad(std::size_t k) override {
        const detail::Node& in = *node_->inputs[k];
        if (!node_->input_requires_grad[k]) return {};
        std::vector<double>* buf = nullptr;
        if (!in.leaf && in.graph == &graph_) {
            buf = &slots_[in.slot];
        } else {
            buf = &leaves_[&in];
        }
        if (buf->empty()) buf->assign(in.value.size(), 0.0);
        return *buf;
    }

private:
    Graph& graph_;
    std::vector<std::vector<double>>& slots_;
    std::unordered_map<const detail::Node*, std::vector<double>>& leaves_;
    const detail::Node* node_ = nullptr;
};

}  // namespace

Graph::Graph() : previous_(t_active) { t_active = this; }

Graph::~Graph() {
    // Detach every recorded node so tensors that outlive the tape become
    // plain values and the closures' captures are released.
    for (auto& node : nodes_) {
        node->graph = nullptr;
        node->inputs.clear();
        node->input_requires_grad.clear();
        node->backward = nullptr;
        node->requires_grad = false;
        node->leaf = true;
    }
    if (t_active == this) t_active = previous_;
}

Graph* Graph::active() noexcept { return t_active; }

void Graph::record(const detail::NodePtr& node) {
    node->graph = this;
    node->slot = nodes_.size();
    node->leaf = false;
    nodes_.push_back(node);
}

NoGradGuard::NoGradGuard() : saved_(t_active) { t_active = nullptr; }
NoGradGuard::~NoGradGuard() { t_active = saved_; }

FreezeGuard::FreezeGuard(std::vector<Tensor> leaves) : leaves_(std::move(leaves)) {
    saved_.reserve(leaves_.size());
    for (auto& t : leaves_) {
        saved_.push_back(t.requires_grad());
        t.set_requires_grad(false);
    }
}

FreezeGuard::~FreezeGuard() {
    for (std::size_t i = 0; i < leaves_.size(); ++i) leaves_[i].set_requires_grad(saved_[i]);
}

Tensor Gradients::of(const Tensor& leaf) const {
    auto it = grads_.find(leaf.id());
    if (it == grads_.end()) return Tensor::zeros(leaf.shape());
    return Tensor(leaf.shape(), it->second);
}

Gradients backward(Graph& graph, const Tensor& loss) {
    if (loss.size() != 1) {
        throw ContractError("backward: loss must be a scalar, got shape " + shape_str(loss.shape()));
    }
    Gradients out;
    const detail::Node* root = loss.id();
    if (!root->requires_grad) return out;
    if (root->leaf) {
        out.grads_[root] = {1.0};
        return out;
    }
    if (root->graph != &graph) throw ContractError("backward: loss was not recorded on this graph");

    const auto& nodes = graph.nodes();
    std::vector<std::vector<double>> slots(nodes.size());
    slots[root->slot] = {1.0};
    SweepContext ctx(graph, slots, out.grads_);
    for (std::size_t i = root->slot + 1; i-- > 0;) {
        if (slots[i].empty()) continue;
        const detail::Node* node = nodes[i].get();
        ctx.bind(node);
        node->backward(slots[i], ctx);
        std::vector<double>().swap(slots[i]);
    }
    return out;
}

}  // namespace seriesforge::numkit
