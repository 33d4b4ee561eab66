#include "seriesforge/numkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "seriesforge/error.hpp"
#include "seriesforge/numkit/graph.hpp"

namespace seriesforge::numkit {

double grad_check(const GraphBuilder& builder, const std::vector<Tensor>& points, double eps) {
    if (!(eps > 0.0)) throw ContractError("grad_check: eps must be positive");
    std::vector<Tensor> leaves;
    leaves.reserve(points.size());
    for (const auto& p : points) leaves.push_back(Tensor::parameter(p.shape(), {p.data().begin(), p.data().end()}));

    std::vector<Tensor> analytic;
    {
        Graph graph;
        Tensor loss = builder(leaves);
        Gradients grads = backward(graph, loss);
        for (const auto& leaf : leaves) analytic.push_back(grads.of(leaf));
    }

    auto evaluate = [&] {
        NoGradGuard guard;
        return builder(leaves).item();
    };

    double worst = 0.0;
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        auto values = leaves[k].mutable_data();
        const auto exact = analytic[k].data();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            values[i] = saved + eps;
            const double up = evaluate();
            values[i] = saved - eps;
            const double down = evaluate();
            values[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double err = std::fabs(exact[i] - numeric) / std::max(1.0, std::fabs(exact[i]));
            worst = std::max(worst, err);
        }
    }
    return worst;
}

double grad_check(const std::function<Tensor(const Tensor&)>& builder, const Tensor& point, double eps) {
    return grad_check([&](const std::vector<Tensor>& xs) { return builder(xs[0]); }, std::vector<Tensor>{point}, eps);
}

}  // namespace seriesforge::numkit
