#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace forkvol {

using ScalarFunction = std::function<double(std::span<const double>)>;
using VectorFunction = std::function<std::vector<double>(std::span<const double>)>;

/// h_k = cbrt(machine epsilon) * max(1, |x_k|).
std::vector<double> central_steps(std::span<const double> x);

std::vector<double> central_gradient(const ScalarFunction& f, std::span<const double> x,
                                     std::span<const double> steps);

/// Four-point central second differences; symmetric by construction.
Eigen::MatrixXd central_hessian(const ScalarFunction& f, std::span<const double> x,
                                std::span<const double> steps);

/// Rows are outputs of `f`, columns are coordinates of `x`.
Eigen::MatrixXd central_jacobian(const VectorFunction& f, std::span<const double> x,
                                 std::span<const double> steps);

}  // namespace forkvol
