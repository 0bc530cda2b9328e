#include "compreg/optimizer.hpp"

#include <cmath>

#include <ceres/ceres.h>

namespace compreg {

namespace {

class CallbackFunction final : public ceres::FirstOrderFunction {
public:
    CallbackFunction(const SmoothObjective& objective, int size)
        : objective_(objective), size_(size), gradient_(size) {}

    bool Evaluate(const double* parameters, double* cost, double* gradient) const override
    {
        const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(parameters, size_);
        const double value = objective_(x, gradient ? &gradient_ : nullptr);
        if (!std::isfinite(value)) {
            return false;
        }
        cost[0] = value;
        if (gradient) {
            if (!gradient_.allFinite()) {
                return false;
            }
            Eigen::Map<Eigen::VectorXd>(gradient, size_) = gradient_;
        }
        return true;
    }

    int NumParameters() const override { return size_; }

private:
    const SmoothObjective& objective_;
    int size_;
    mutable Eigen::VectorXd gradient_;
};

} // namespace

MinimizeResult minimize_bfgs(const SmoothObjective& objective, const Eigen::VectorXd& start,
                             const MinimizeOptions& options)
{
    MinimizeResult result;
    result.x = start;
    result.value = objective(start, nullptr);

    ceres::GradientProblemSolver::Options solver_options;
    solver_options.line_search_direction_type = ceres::BFGS;
    solver_options.line_search_type = ceres::WOLFE;
    solver_options.max_num_iterations = options.max_iterations;
    solver_options.function_tolerance = options.function_tolerance;
    solver_options.gradient_tolerance = options.gradient_tolerance;
    solver_options.parameter_tolerance = options.parameter_tolerance;
    solver_options.logging_type = ceres::SILENT;
    solver_options.minimizer_progress_to_stdout = false;

    // GradientProblem owns the function object.
    ceres::GradientProblem problem(new CallbackFunction(objective, static_cast<int>(start.size())));
    Eigen::VectorXd x = start;
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(solver_options, problem, x.data(), &summary);

    result.iterations = static_cast<int>(summary.iterations.size());
    result.converged = summary.termination_type == ceres::CONVERGENCE;

    const double value = objective(x, nullptr);
    if (std::isfinite(value) && (!std::isfinite(result.value) || value <= result.value)) {
        result.x = std::move(x);
        result.value = value;
    }
    return result;
}

} // namespace compreg
