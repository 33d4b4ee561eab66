#pragma once

#include <functional>
#include <vector>

#include "seriesforge/numkit/tensor.hpp"

namespace seriesforge::numkit {

using GraphBuilder = std::function<Tensor(const std::vector<Tensor>&)>;

// Compares reverse-mode gradients of a scalar-valued builder against central
// differences at every coordinate of every point. Returns
// max |analytic - numeric| / max(1, |analytic|). The points are not modified.
double grad_check(const GraphBuilder& builder, const std::vector<Tensor>& points, double eps = 1e-5);

double grad_check(const std::function<Tensor(const Tensor&)>& builder, const Tensor& point, double eps = 1e-5);

}  // namespace seriesforge::numkit
