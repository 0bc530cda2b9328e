#pragma once

#include <functional>

#include <Eigen/Dense>

namespace compreg {

/// Objective callback: returns f(x) and, when `gradient` is non-null, writes
/// the gradient into it. Returning a non-finite value marks x infeasible.
using SmoothObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* gradient)>;

struct MinimizeOptions {
    int max_iterations = 2000;
    double function_tolerance = 1e-12;
    double gradient_tolerance = 1e-10;
    double parameter_tolerance = 1e-12;
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// One BFGS run with a Wolfe line search. The returned point never has a
/// larger objective than the start point.
MinimizeResult minimize_bfgs(const SmoothObjective& objective, const Eigen::VectorXd& start,
                             const MinimizeOptions& options = {});

} // namespace compreg
